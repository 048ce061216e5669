#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <set>

#include "stratanet/backbone.hpp"
#include "stratanet/synthetic.hpp"

using namespace stratanet;

namespace {

WeightedDigraph ring_noise(std::size_t n, std::size_t out_degree) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    std::vector<Edge> edges;
    for (VertexId i = 0; i < n; ++i)
        for (std::size_t d = 1; d <= out_degree; ++d) edges.push_back({i, static_cast<VertexId>((i + d) % n), 1});
    return WeightedDigraph(names, edges);
}

}  // namespace

// Frozen reference values: scipy.stats.binom.sf(k - 1, n, p).
TEST_CASE("binomial upper tail") {
    CHECK(binomial_upper_tail(5, 100, 0.01) == doctest::Approx(0.0034323215877545207).epsilon(1e-10));
    CHECK(binomial_upper_tail(10, 1000, 0.002) == doctest::Approx(4.517468831622144e-05).epsilon(1e-10));
    CHECK(binomial_upper_tail(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(binomial_upper_tail(30, 5000, 0.001) == doctest::Approx(2.6518096131981067e-14).epsilon(1e-9));
    CHECK(binomial_upper_tail(3, 10, 0.5) == doctest::Approx(0.9453125).epsilon(1e-12));
    CHECK(binomial_upper_tail(0, 10, 0.5) == 1.0);
    CHECK(binomial_upper_tail(11, 10, 0.5) == 0.0);
}

TEST_CASE("a single edge is never significant") {
    for (Weight w : {Weight{1}, Weight{5}, Weight{100}}) {
        const WeightedDigraph g({"a", "b"}, {{0, 1, w}});
        const auto s = score_edges(g);
        REQUIRE(s.size() == 1);
        CHECK(s[0].expected_weight == doctest::Approx(static_cast<double>(w)));
        CHECK(s[0].p_value >= 0.5);
        CHECK(extract_backbone(g).edge_count() == 0);
    }
}

TEST_CASE("uniform complete graph has an empty backbone") {
    std::vector<std::string> names;
    std::vector<Edge> edges;
    for (VertexId i = 0; i < 8; ++i) {
        names.push_back("c" + std::to_string(i));
        for (VertexId j = 0; j < 8; ++j)
            if (i != j) edges.push_back({i, j, 3});
    }
    const WeightedDigraph g(names, edges);
    for (const auto& s : score_edges(g)) CHECK(s.p_value > 0.1);
    CHECK(extract_backbone(g).edge_count() == 0);
}

TEST_CASE("a heavily over-weighted edge is significant") {
    auto base = ring_noise(50, 8);
    std::vector<Edge> edges(base.edges().begin(), base.edges().end());
    edges.push_back({0, 25, 10});
    const WeightedDigraph g(base.vertex_names(), edges);
    const auto scores = score_edges(g);
    const auto it = std::find_if(scores.begin(), scores.end(), [](const EdgeScore& s) { return s.src == 0 && s.dst == 25; });
    REQUIRE(it != scores.end());
    CHECK(it->weight >= 10 * it->expected_weight);
    CHECK(it->p_value < 1e-4);
}

TEST_CASE("alpha extremes") {
    const auto planted = synthetic::planted_backbone({}, 3);
    const auto all = extract_backbone(planted.graph, 1.0);
    CHECK(all.edge_count() == planted.graph.edge_count());
    for (const auto& e : all.edges()) CHECK(e.weight == 1);
    CHECK(extract_backbone(planted.graph, 1e-300).edge_count() == 0);
}

TEST_CASE("planted signal is recovered") {
    const auto planted = synthetic::planted_backbone({}, 9);
    CHECK(planted.graph.edge_count() == 420);
    const auto bb = extract_backbone(planted.graph, 0.1);
    std::set<std::pair<VertexId, VertexId>> kept;
    for (const auto& e : bb.edges()) kept.emplace(e.src, e.dst);
    std::size_t hit = 0;
    for (const auto& s : planted.signal) hit += kept.contains(s);
    CHECK(static_cast<double>(hit) / static_cast<double>(planted.signal.size()) >= 0.9);
    CHECK(static_cast<double>(hit) / static_cast<double>(kept.size()) >= 0.9);
}

TEST_CASE("backbone keeps every vertex") {
    const auto planted = synthetic::planted_backbone({}, 4);
    const auto bb = extract_backbone(planted.graph);
    CHECK(bb.vertex_names() == planted.graph.vertex_names());
    CHECK_THROWS_AS(extract_backbone(planted.graph, 0.0), InputError);
}
