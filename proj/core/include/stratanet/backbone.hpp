#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "stratanet/graph.hpp"

namespace stratanet {

struct EdgeScore {
    VertexId src = 0;
    VertexId dst = 0;
    Weight weight = 0;
    double expected_weight = 0;
    double p_value = 1;
};

/// Significance of every edge under the strength-preserving binomial null: with
/// W = total weight, X ~ Binomial(W, s_out(src) s_in(dst) / W^2) and
/// p = P[X >= w]. Output follows the graph's (src, dst) edge order.
std::vector<EdgeScore> score_edges(const WeightedDigraph& g);

/// Upper binomial tail P[X >= k] for X ~ Binomial(trials, p), via the regularized
/// incomplete beta function.
double binomial_upper_tail(std::int64_t k, std::int64_t trials, double p);

/// Keeps edges with p < alpha as unit-weight edges; every vertex is preserved.
/// Throws InputError unless alpha lies in (0, 1].
WeightedDigraph extract_backbone(const WeightedDigraph& g, double alpha = 0.1);
WeightedDigraph extract_backbone(const WeightedDigraph& g, std::span<const EdgeScore> scores, double alpha);

void write_scores_csv(std::ostream& out, const WeightedDigraph& g, std::span<const EdgeScore> scores);

}  // namespace stratanet
