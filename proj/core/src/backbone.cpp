#include "stratanet/backbone.hpp"

#include <algorithm>
#include <ostream>

#include <boost/math/special_functions/beta.hpp>

#include "stratanet/csv.hpp"
#include "stratanet/format.hpp"

namespace stratanet {

double binomial_upper_tail(std::int64_t k, std::int64_t trials, double p) {
    if (k <= 0) return 1.0;
    if (k > trials || p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    // P[X >= k] = I_p(k, n - k + 1)
    return boost::math::ibeta(static_cast<double>(k), static_cast<double>(trials - k + 1), p);
}

std::vector<EdgeScore> score_edges(const WeightedDigraph& g) {
    std::vector<EdgeScore> scores;
    const Weight total = g.total_weight();
    if (total <= 0) return scores;
    const auto s = strengths(g);
    const double w_total = static_cast<double>(total);
    scores.reserve(g.edge_count());
    for (const auto& e : g.edges()) {
        const double p = std::min(
            1.0, static_cast<double>(s[e.src].out_strength) * static_cast<double>(s[e.dst].in_strength) /
                     (w_total * w_total));
        scores.push_back({e.src, e.dst, e.weight, w_total * p, binomial_upper_tail(e.weight, total, p)});
    }
    return scores;
}

WeightedDigraph extract_backbone(const WeightedDigraph& g, std::span<const EdgeScore> scores, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
    std::vector<Edge> kept;
    for (const auto& sc : scores)
        if (sc.p_value < alpha || alpha == 1.0) kept.push_back({sc.src, sc.dst, 1});
    return WeightedDigraph(g.vertex_names(), std::move(kept), g.metadata());
}

WeightedDigraph extract_backbone(const WeightedDigraph& g, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");
    const auto scores = score_edges(g);
    return extract_backbone(g, scores, alpha);
}

void write_scores_csv(std::ostream& out, const WeightedDigraph& g, std::span<const EdgeScore> scores) {
    out << "src,dst,weight,expected,p\n";
    for (const auto& sc : scores)
        out << csv::quote(g.name(sc.src)) << ',' << csv::quote(g.name(sc.dst)) << ',' << sc.weight << ','
            << fmt_double(sc.expected_weight) << ',' << fmt_double(sc.p_value) << '\n';
}

}  // namespace stratanet
