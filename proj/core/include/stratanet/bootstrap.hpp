#pragma once

#include <string_view>
#include <vector>

#include "stratanet/graph.hpp"
#include "stratanet/random.hpp"

namespace stratanet {

inline constexpr std::size_t kDefaultBootstrapSamples = 300;

/// Categorical distribution over a graph's edges with p_e = w_e / W. Draws are made
/// on the integer cumulative weights, so the probabilities are exact ratios.
class EdgeDistribution {
public:
    /// Throws DegenerateError for a graph without edges.
    explicit EdgeDistribution(const WeightedDigraph& g);

    std::size_t size() const { return edges_.size(); }
    Weight total_weight() const { return total_; }
    double probability(std::size_t edge) const;
    const Edge& edge(std::size_t i) const { return edges_[i]; }
    const std::vector<std::string>& vertex_names() const { return names_; }
    const GraphMetadata& metadata() const { return metadata_; }

    std::size_t draw(Rng& rng) const;

private:
    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<Weight> cumulative_;
    Weight total_ = 0;
    GraphMetadata metadata_;
};

/// m i.i.d. draws with replacement; edge weight = times drawn. All source vertices are
/// kept (zero-weight vertices become isolates).
WeightedDigraph sample_graph(const EdgeDistribution& dist, Weight m, Rng& rng);
WeightedDigraph sample_graph(const EdgeDistribution& dist, Weight m, std::uint64_t seed);

/// Random stream of sample `index` of an ensemble; distinct indices never share a stream.
Rng ensemble_stream(std::uint64_t master_seed, std::string_view label, std::uint64_t index);

/// n_samples resampled graphs of size m. Sample i depends only on (master_seed, label, i),
/// so the ensemble is reproducible regardless of scheduling.
std::vector<WeightedDigraph> ensemble(const WeightedDigraph& g, Weight m, std::size_t n_samples,
                                      std::uint64_t master_seed, std::string_view label = "bootstrap");

}  // namespace stratanet
