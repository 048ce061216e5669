#include <doctest.h>

#include <cmath>

#include "stratanet/ergm.hpp"
#include "stratanet/random.hpp"
#include "stratanet/synthetic.hpp"

using namespace stratanet;

namespace {

const std::vector<ErgmTerm> kEhc{ErgmTerm::edges(), ErgmTerm::homophily(), ErgmTerm::closure()};

SimpleGraph graph(std::size_t n, std::vector<std::pair<VertexId, VertexId>> edges) { return SimpleGraph(n, edges); }

std::vector<Sector> random_sectors(Rng& rng, std::size_t n, std::size_t kinds) {
    std::vector<Sector> s(n);
    for (auto& x : s) x = static_cast<Sector>(rng.below(kinds));
    return s;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("term names") {
    CHECK(term_name(ErgmTerm::activity(Sector::CivilSociety)) == "activity_civil_society");
    CHECK(parse_term("closure") == ErgmTerm::closure());
    CHECK(parse_term("activity_media") == ErgmTerm::activity(Sector::Media));
    CHECK_THROWS_AS(parse_term("gwesp"), InputError);

    const std::vector<Sector> sectors{Sector::Media, Sector::Government, Sector::Media, Sector::Science};
    const auto terms = default_terms(sectors);
    REQUIRE(terms.size() == 5);
    CHECK(terms[0] == ErgmTerm::edges());
    CHECK(terms[1] == ErgmTerm::activity(Sector::Science));
    CHECK(terms[2] == ErgmTerm::activity(Sector::Media));
    CHECK(terms[3] == ErgmTerm::homophily());
    CHECK(terms[4] == ErgmTerm::closure());
}

TEST_CASE("statistics on hand graphs") {
    const std::vector<Sector> gov(4, Sector::Government);
    CHECK(count_statistics(SimpleGraph(4), kEhc, gov) == std::vector<double>{0, 0, 0});
    CHECK(count_statistics(graph(4, {{0, 1}, {1, 2}, {0, 2}}), kEhc, gov) == std::vector<double>{3, 3, 3});
    const auto path = count_statistics(graph(4, {{0, 1}, {1, 2}, {2, 3}}), kEhc, gov);
    CHECK(path[0] == 3);
    CHECK(path[2] == 0);

    const std::vector<Sector> mixed{Sector::Media, Sector::Media, Sector::Science, Sector::Science};
    const std::vector<ErgmTerm> act{ErgmTerm::activity(Sector::Media), ErgmTerm::homophily()};
    CHECK(count_statistics(graph(4, {{0, 1}, {1, 2}, {2, 3}}), act, mixed) == std::vector<double>{3, 2});
    CHECK_THROWS_AS(count_statistics(SimpleGraph(5), kEhc, gov), InputError);
}

TEST_CASE("change statistics on hand graphs") {
    const std::vector<Sector> gov(3, Sector::Government);
    CHECK(change_statistics(SimpleGraph(3), 0, 1, kEhc, gov) == std::vector<double>{1, 1, 0});
    const auto path = graph(3, {{0, 1}, {1, 2}});
    CHECK(change_statistics(path, 0, 2, kEhc, gov)[2] == 3);
    // The dyad's current state does not matter.
    const auto closed = graph(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(change_statistics(closed, 0, 2, kEhc, gov)[2] == 3);
}

TEST_CASE("change statistics equal brute-force differences") {
    Rng rng(31);
    const std::vector<ErgmTerm> all{ErgmTerm::edges(), ErgmTerm::activity(Sector::Science),
                                    ErgmTerm::activity(Sector::Media), ErgmTerm::homophily(), ErgmTerm::closure()};
    for (int t = 0; t < 30; ++t) {
        const auto sectors = random_sectors(rng, 8, 3);
        SimpleGraph g(8);
        const double p = rng.uniform();
        for (VertexId i = 0; i < 8; ++i)
            for (VertexId j = i + 1; j < 8; ++j)
                if (rng.bernoulli(p)) g.add_edge(i, j);
        for (VertexId i = 0; i < 8; ++i)
            for (VertexId j = i + 1; j < 8; ++j) {
                SimpleGraph on = g, off = g;
                if (!on.has_edge(i, j)) on.add_edge(i, j);
                if (off.has_edge(i, j)) off.remove_edge(i, j);
                const auto a = count_statistics(on, all, sectors);
                const auto b = count_statistics(off, all, sectors);
                const auto d = change_statistics(g, i, j, all, sectors);
                for (std::size_t k = 0; k < all.size(); ++k) CHECK(d[k] == a[k] - b[k]);
            }
    }
}

TEST_CASE("degeneracy checks") {
    const std::vector<Sector> sectors{Sector::Media, Sector::Media, Sector::Science, Sector::Science};
    CHECK(degeneracy(SimpleGraph(4), kEhc, sectors).has_value());
    SimpleGraph complete(4);
    for (VertexId i = 0; i < 4; ++i)
        for (VertexId j = i + 1; j < 4; ++j) complete.add_edge(i, j);
    CHECK(degeneracy(complete, kEhc, sectors).has_value());
    CHECK(degeneracy(graph(4, {{0, 1}, {1, 2}, {0, 2}}), kEhc, sectors) == std::nullopt);
    CHECK(statistic_maxima(kEhc, sectors) == std::vector<double>{6, 2, 6});
}

TEST_CASE("MPLE equals the closed-form logistic MLE for edges and homophily") {
    Rng rng(41);
    const std::vector<ErgmTerm> terms{ErgmTerm::edges(), ErgmTerm::homophily()};
    const std::vector<double> theta{-1.5, 1.0};
    for (int r = 0; r < 10; ++r) {
        const auto sectors = random_sectors(rng, 80, 3);
        const auto g = simulate_ergm(theta, terms, sectors, static_cast<std::uint64_t>(r), 1);
        const auto fit = fit_mple(g, terms, sectors);
        REQUIRE(fit.converged);
        double same = 0, same_on = 0, diff = 0, diff_on = 0;
        for (VertexId i = 0; i < 80; ++i)
            for (VertexId j = i + 1; j < 80; ++j) {
                const bool s = sectors[i] == sectors[j];
                (s ? same : diff) += 1;
                if (g.has_edge(i, j)) (s ? same_on : diff_on) += 1;
            }
        const double e = std::log(diff_on / (diff - diff_on));
        const double h = std::log(same_on / (same - same_on)) - e;
        CHECK(fit.theta[0] == doctest::Approx(e).epsilon(1e-9));
        CHECK(fit.theta[1] == doctest::Approx(h).epsilon(1e-9));
        // Standard errors of the two-class logistic model.
        const double se_e = std::sqrt(1 / diff_on + 1 / (diff - diff_on));
        CHECK(fit.standard_errors[0] == doctest::Approx(se_e).epsilon(1e-6));
    }
}

TEST_CASE("separated data are flagged") {
    const std::vector<Sector> sectors(6, Sector::Government);
    SimpleGraph complete(6);
    for (VertexId i = 0; i < 6; ++i)
        for (VertexId j = i + 1; j < 6; ++j) complete.add_edge(i, j);
    const std::vector<ErgmTerm> edges_only{ErgmTerm::edges()};
    const auto fit = fit_mple(complete, edges_only, sectors);
    CHECK_FALSE(fit.converged);
    CHECK_FALSE(fit.message.empty());
    REQUIRE(fit.divergence.size() == 1);
    CHECK(fit.divergence[0] == 1);

    const auto empty = fit_mple(SimpleGraph(6), edges_only, sectors);
    CHECK_FALSE(empty.converged);
    CHECK(empty.divergence[0] == -1);
}

TEST_CASE("simulation limits") {
    Rng rng(51);
    const auto sectors = random_sectors(rng, 40, 2);
    const std::vector<ErgmTerm> edges_only{ErgmTerm::edges()};
    const std::vector<double> very_negative{-30.0};
    CHECK(simulate_ergm(very_negative, edges_only, sectors, 1, 3).edge_count() == 0);

    const std::vector<double> zero{0.0};
    const auto g = simulate_ergm(zero, edges_only, sectors, 2, 1);
    const double dyads = 40.0 * 39 / 2;
    CHECK(std::abs(static_cast<double>(g.edge_count()) - dyads / 2) <= 3 * std::sqrt(dyads / 4));
    CHECK(simulate_ergm(zero, edges_only, sectors, 2, 1) == g);
}

TEST_CASE("dyad-independent simulation matches logistic probabilities") {
    Rng rng(61);
    const auto sectors = random_sectors(rng, 100, 3);
    const std::vector<ErgmTerm> terms{ErgmTerm::edges(), ErgmTerm::homophily()};
    const std::vector<double> theta{-2.0, 1.5};
    double same = 0, same_on = 0, diff = 0, diff_on = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = simulate_ergm(theta, terms, sectors, seed, 1);
        for (VertexId i = 0; i < 100; ++i)
            for (VertexId j = i + 1; j < 100; ++j) {
                const bool s = sectors[i] == sectors[j];
                (s ? same : diff) += 1;
                if (g.has_edge(i, j)) (s ? same_on : diff_on) += 1;
            }
    }
    const double p_same = logistic(-0.5), p_diff = logistic(-2.0);
    CHECK(std::abs(same_on / same - p_same) <= 4 * std::sqrt(p_same * (1 - p_same) / same));
    CHECK(std::abs(diff_on / diff - p_diff) <= 4 * std::sqrt(p_diff * (1 - p_diff) / diff));
}

TEST_CASE("bootstrap of identical graphs has zero width") {
    Rng rng(71);
    const auto sectors = random_sectors(rng, 30, 3);
    const auto g = simulate_ergm(std::vector<double>{-1.5, 1.0, 0.2}, kEhc, sectors, 3, 5);
    const std::vector<SimpleGraph> graphs(10, g);
    const auto ens = bootstrap_ergm(graphs, kEhc, sectors);
    REQUIRE(ens.summary.size() == 3);
    for (const auto& s : ens.summary) {
        CHECK(s.count == 10);
        CHECK(s.width() == 0.0);
        CHECK(s.sd <= 1e-12);
    }
    CHECK(ens.mean_width() == 0.0);
    CHECK_FALSE(ens.wide);
}

TEST_CASE("planted homophily is detected across an ensemble") {
    Rng rng(81);
    const auto sectors = random_sectors(rng, 60, 4);
    const std::vector<ErgmTerm> terms{ErgmTerm::edges(), ErgmTerm::homophily()};
    const std::vector<double> theta{-3.0, 1.5};
    std::vector<SimpleGraph> graphs;
    for (std::uint64_t s = 0; s < 300; ++s) graphs.push_back(simulate_ergm(theta, terms, sectors, s, 1));
    const auto ens = bootstrap_ergm(graphs, terms, sectors);
    CHECK(ens.summary[1].q025 > 0.0);
    CHECK(ens.summary[1].q50 == doctest::Approx(1.5).epsilon(0.2));
    CHECK_FALSE(ens.wide);
}

TEST_CASE("sparse ensembles are flagged or rejected") {
    Rng rng(91);
    const auto sectors = random_sectors(rng, 40, 3);
    std::vector<SimpleGraph> graphs(7, SimpleGraph(40));
    for (std::uint64_t s = 0; s < 3; ++s) graphs.push_back(simulate_ergm(std::vector<double>{-2.0, 1.0, 0.5}, kEhc, sectors, s, 10));
    const auto ens = bootstrap_ergm(graphs, kEhc, sectors);
    CHECK(ens.degenerate == 7);
    CHECK(ens.wide);
    CHECK_FALSE(ens.samples[0].fit.has_value());
    CHECK_FALSE(ens.samples[0].degenerate_reason.empty());

    ErgmBootstrapOptions strict;
    strict.width_threshold = 1e-6;
    std::vector<SimpleGraph> varied;
    for (std::uint64_t s = 0; s < 10; ++s) varied.push_back(simulate_ergm(std::vector<double>{-2.0, 1.0, 0.5}, kEhc, sectors, s, 10));
    CHECK(bootstrap_ergm(varied, kEhc, sectors, strict).wide);

    const std::vector<SimpleGraph> empties(5, SimpleGraph(40));
    try {
        bootstrap_ergm(empties, kEhc, sectors);
        FAIL("expected DegenerateError");
    } catch (const DegenerateError& e) {
        CHECK(std::string(e.what()).find("level too sparse") != std::string::npos);
    }
}
