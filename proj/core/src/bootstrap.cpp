#include "stratanet/bootstrap.hpp"

#include <algorithm>

#include <tbb/parallel_for.h>

namespace stratanet {

EdgeDistribution::EdgeDistribution(const WeightedDigraph& g)
    : names_(g.vertex_names()), edges_(g.edges().begin(), g.edges().end()), metadata_(g.metadata()) {
    if (edges_.empty()) throw DegenerateError("cannot build an edge distribution for a graph without edges");
    cumulative_.reserve(edges_.size());
    for (const auto& e : edges_) {
        total_ += e.weight;
        cumulative_.push_back(total_);
    }
}

double EdgeDistribution::probability(std::size_t edge) const {
    return static_cast<double>(edges_[edge].weight) / static_cast<double>(total_);
}

std::size_t EdgeDistribution::draw(Rng& rng) const {
    const auto u = static_cast<Weight>(rng.below(static_cast<std::uint64_t>(total_)));
    return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
}

WeightedDigraph sample_graph(const EdgeDistribution& dist, Weight m, Rng& rng) {
    if (m < 0) throw InputError("sample size must be non-negative");
    std::vector<Weight> counts(dist.size(), 0);
    for (Weight i = 0; i < m; ++i) ++counts[dist.draw(rng)];
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] > 0) edges.push_back({dist.edge(i).src, dist.edge(i).dst, counts[i]});
    return WeightedDigraph(dist.vertex_names(), std::move(edges), dist.metadata());
}

WeightedDigraph sample_graph(const EdgeDistribution& dist, Weight m, std::uint64_t seed) {
    Rng rng(seed);
    return sample_graph(dist, m, rng);
}

Rng ensemble_stream(std::uint64_t master_seed, std::string_view label, std::uint64_t index) {
    return Rng(derive_key(master_seed, label), index);
}

std::vector<WeightedDigraph> ensemble(const WeightedDigraph& g, Weight m, std::size_t n_samples,
                                      std::uint64_t master_seed, std::string_view label) {
    const EdgeDistribution dist(g);
    std::vector<WeightedDigraph> out(n_samples);
    tbb::parallel_for(std::size_t{0}, n_samples, [&](std::size_t i) {
        Rng rng = ensemble_stream(master_seed, label, i);
        out[i] = sample_graph(dist, m, rng);
    });
    return out;
}

}  // namespace stratanet
