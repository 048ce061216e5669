// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero if any fails.
//
//   acceptance --cli <stratanet binary> --fixture <dir with config.json> --work <scratch dir> [--only N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stratanet/backbone.hpp"
#include "stratanet/blockmodel.hpp"
#include "stratanet/bootstrap.hpp"
#include "stratanet/ergm.hpp"
#include "stratanet/ingest.hpp"
#include "stratanet/metrics.hpp"
#include "stratanet/pipeline.hpp"
#include "stratanet/random.hpp"
#include "stratanet/synthetic.hpp"
#include "stratanet/temporal.hpp"

namespace fs = std::filesystem;
using namespace stratanet;

namespace {

struct Options {
    std::string cli;
    fs::path fixture;
    fs::path work = fs::temp_directory_path() / "stratanet-acceptance";
    int only = 0;
};

// Collects failed checks for one criterion.
struct Check {
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void note(std::string s) { notes.push_back(std::move(s)); }
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

// ---------------------------------------------------------------------------

void criterion1(Check& c) {
    const std::vector<double> regular(50, 3600.0);
    const auto r = burstiness_from_gaps(regular);
    c.expect(r && r->coefficient == -1.0, "regular gaps give B = -1");

    Rng rng(derive_key(1, "acceptance/exponential"));
    std::vector<double> exp_gaps(10000);
    for (auto& g : exp_gaps) g = rng.exponential(1.0 / 600.0);
    const auto e = burstiness_from_gaps(exp_gaps);
    c.expect(e && std::abs(e->coefficient) < 0.05, "exponential gaps give |B| < 0.05");
    if (e) c.note("exponential B = " + fmt(e->coefficient));

    const std::vector<double> hand{1.0, 3.0};
    const auto h = burstiness_from_gaps(hand, 2);
    c.expect(h && h->coefficient == -1.0 / 3.0, "gaps [1, 3] give B = -1/3");

    std::vector<double> mixed(200);
    for (auto& g : mixed) g = rng.exponential(1.0) * (rng.bernoulli(0.1) ? 50.0 : 1.0);
    const auto base = burstiness_from_gaps(mixed);
    for (double scale : {0.1, 7.0, 1000.0}) {
        std::vector<double> scaled(mixed);
        for (auto& g : scaled) g *= scale;
        const auto s = burstiness_from_gaps(scaled);
        c.expect(base && s && std::abs(s->coefficient - base->coefficient) <= 1e-12,
                 "B invariant under scaling by " + fmt(scale));
    }
}

// ---------------------------------------------------------------------------

WeightedDigraph random_digraph(Rng& rng, std::size_t n, double p, Weight max_weight) {
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) names[i] = "a" + std::to_string(i);
    std::vector<Edge> edges;
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = 0; j < n; ++j)
            if (i != j && rng.bernoulli(p))
                edges.push_back({i, j, 1 + static_cast<Weight>(rng.below(static_cast<std::uint64_t>(max_weight)))});
    return WeightedDigraph(std::move(names), std::move(edges));
}

void criterion2(Check& c) {
    const WeightedDigraph triangle({"a", "b", "c"}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}});
    const UndirectedView tv(triangle);
    c.expect(std::abs(overlap(tv, 0, 1, OverlapMode::Weighted) - 1.0 / 3.0) < 1e-15, "triangle weighted overlap 1/3");
    c.expect(overlap(tv, 0, 1, OverlapMode::Unweighted) == 1.0, "triangle unweighted overlap 1");

    std::vector<RosterEntry> entries;
    std::vector<Edge> edges;
    for (int i = 0; i < 5; ++i)
        entries.push_back({"u" + std::to_string(i), "org", Level::IndMain, Sector::Science, OrgType::Science});
    for (VertexId i = 0; i < 5; ++i)
        for (VertexId j = 0; j < 5; ++j)
            if (i != j) edges.push_back({i, j, 2});
    const Roster roster(entries);
    const WeightedDigraph complete({"u0", "u1", "u2", "u3", "u4"}, edges);
    c.expect(org_density(complete, roster, Level::IndMain).mean == 1.0, "complete directed organization has density 1");

    Rng rng(derive_key(2, "acceptance/overlap"));
    bool bounded = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto g = random_digraph(rng, 6 + rng.below(10), 0.1 + 0.5 * rng.uniform(), 9);
        const UndirectedView view(g);
        for (VertexId i = 0; i < g.vertex_count(); ++i)
            for (VertexId j = i + 1; j < g.vertex_count(); ++j) {
                const double o = overlap(view, i, j, OverlapMode::Weighted);
                bounded = bounded && o >= 0.0 && o <= 1.0;
            }
    }
    c.expect(bounded, "0 <= weighted overlap <= 1 on 1000 random graphs");

    bool invariant = true;
    for (int trial = 0; trial < 500; ++trial) {
        const auto g = random_digraph(rng, 5 + rng.below(8), 0.2 + 0.5 * rng.uniform(), 6);
        const Weight factor = 2 + static_cast<Weight>(rng.below(20));
        std::vector<Edge> scaled(g.edges().begin(), g.edges().end());
        for (auto& e : scaled) e.weight *= factor;
        const WeightedDigraph h(g.vertex_names(), scaled);
        const UndirectedView vg(g), vh(h);
        for (VertexId i = 0; i < g.vertex_count(); ++i)
            for (VertexId j = i + 1; j < g.vertex_count(); ++j)
                invariant = invariant && std::abs(overlap(vg, i, j, OverlapMode::Weighted) -
                                                  overlap(vh, i, j, OverlapMode::Weighted)) <= 1e-12;
    }
    c.expect(invariant, "weighted overlap invariant under weight scaling (500 cases)");
}

// ---------------------------------------------------------------------------

// Binomial upper tail by direct summation of the pmf in log space.
double oracle_upper_tail(std::int64_t k, std::int64_t n, double p) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    const double lnf = std::lgamma(static_cast<double>(n) + 1);
    double sum = 0;
    for (std::int64_t x = k; x <= n; ++x) {
        const double term = lnf - std::lgamma(static_cast<double>(x) + 1) - std::lgamma(static_cast<double>(n - x) + 1) +
                            static_cast<double>(x) * lp + static_cast<double>(n - x) * lq;
        sum += std::exp(term);
    }
    return std::min(sum, 1.0);
}

void criterion3(Check& c) {
    double precision_sum = 0, recall_sum = 0, worst_rel = 0;
    const int seeds = 50;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto planted = synthetic::planted_backbone({}, static_cast<std::uint64_t>(seed));
        const auto scores = score_edges(planted.graph);
        const std::set<std::pair<VertexId, VertexId>> truth(planted.signal.begin(), planted.signal.end());
        std::size_t kept = 0, hit = 0;
        const double w = static_cast<double>(planted.graph.total_weight());
        const auto s = strengths(planted.graph);
        for (const auto& sc : scores) {
            const double p = static_cast<double>(s[sc.src].out_strength) * static_cast<double>(s[sc.dst].in_strength) / (w * w);
            const double oracle = oracle_upper_tail(sc.weight, planted.graph.total_weight(), p);
            worst_rel = std::max(worst_rel, std::abs(sc.p_value - oracle) / std::max(oracle, 1e-300));
            if (sc.p_value < 0.1) {
                ++kept;
                hit += truth.contains({sc.src, sc.dst});
            }
        }
        precision_sum += kept ? static_cast<double>(hit) / static_cast<double>(kept) : 0.0;
        recall_sum += static_cast<double>(hit) / static_cast<double>(truth.size());
    }
    const double precision = precision_sum / seeds;
    const double recall = recall_sum / seeds;
    c.note("precision " + fmt(precision) + ", recall " + fmt(recall) + ", max rel. p deviation " + fmt(worst_rel, 2));
    c.expect(precision >= 0.9, "mean precision >= 0.9");
    c.expect(recall >= 0.9, "mean recall >= 0.9");
    c.expect(worst_rel <= 1e-9, "p-values match the direct binomial-tail oracle");

    std::vector<std::string> names;
    std::vector<Edge> edges;
    for (VertexId i = 0; i < 12; ++i) names.push_back("c" + std::to_string(i));
    for (VertexId i = 0; i < 12; ++i)
        for (VertexId j = 0; j < 12; ++j)
            if (i != j) edges.push_back({i, j, 4});
    const WeightedDigraph uniform(names, edges);
    c.expect(extract_backbone(uniform, 0.1).edge_count() == 0, "uniform complete graph gives an empty backbone");
}

// ---------------------------------------------------------------------------

void criterion4(Check& c) {
    std::vector<Edge> edges;
    for (VertexId i = 0; i < 10; ++i) edges.push_back({i, static_cast<VertexId>((i + 1) % 11), static_cast<Weight>(i + 1)});
    std::vector<std::string> names;
    for (int i = 0; i < 11; ++i) names.push_back("n" + std::to_string(i));
    const WeightedDigraph g(names, edges);
    const EdgeDistribution dist(g);
    const Weight m = 10000;
    const auto sample = sample_graph(dist, m, 42);
    bool banded = true;
    for (std::size_t e = 0; e < dist.size(); ++e) {
        const double p = dist.probability(e);
        const double mean = static_cast<double>(m) * p;
        const double sd = std::sqrt(static_cast<double>(m) * p * (1 - p));
        const double observed = static_cast<double>(sample.weight(dist.edge(e).src, dist.edge(e).dst));
        banded = banded && std::abs(observed - mean) <= 4 * sd;
    }
    c.expect(banded, "edge frequencies within 4 sigma over 10^4 draws");

    bool totals = true;
    for (Weight size : {Weight{0}, Weight{1}, Weight{17}, Weight{55}, Weight{1000}}) {
        for (const auto& s : ensemble(g, size, 40, 9))
            totals = totals && s.total_weight() == size;
    }
    c.expect(totals, "every sample has total weight m");

    const auto a = ensemble(g, 500, 50, 1234);
    const auto b = ensemble(g, 500, 50, 1234);
    c.expect(a == b, "fixed seed reproduces the ensemble bit-exactly");
    const auto other = ensemble(g, 500, 50, 1235);
    c.expect(a != other, "a different seed changes the ensemble");
}

// ---------------------------------------------------------------------------

void criterion5(Check& c) {
    int recovered = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const auto pp = synthetic::planted_partition(100, 2, 0.3, 0.01, static_cast<std::uint64_t>(seed));
        SbmConfig config;
        config.n_sweeps = 1000;
        config.seed = static_cast<std::uint64_t>(seed);
        const auto fit = fit_sbm(pp.graph, config);
        if (rmi(fit.partition, pp.truth).normalized >= 0.9) ++recovered;
    }
    c.note(std::to_string(recovered) + "/100 planted partitions recovered");
    c.expect(recovered >= 95, "planted 2-block graphs recovered in >= 95 of 100 seeds");

    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId base : {0u, 10u})
        for (VertexId i = 0; i < 10; ++i)
            for (VertexId j = i + 1; j < 10; ++j) edges.emplace_back(base + i, base + j);
    const SimpleGraph cliques(20, edges);
    SbmConfig config;
    config.n_sweeps = 1000;
    const auto fit = fit_sbm(cliques, config);
    std::vector<std::uint32_t> truth(20, 0);
    std::fill(truth.begin() + 10, truth.end(), 1u);
    c.expect(fit.partition.block_count() == 2 && rmi(fit.partition, Partition(truth)).normalized == 1.0,
             "two disconnected 10-cliques recovered exactly");

    const auto empty = fit_sbm(SimpleGraph(30), config);
    c.expect(empty.partition.block_count() == 1, "empty graph gives one block");

    const auto pp = synthetic::planted_partition(60, 3, 0.3, 0.05, 5);
    Rng rng(derive_key(5, "acceptance/moves"));
    std::vector<std::uint32_t> start(60);
    for (auto& b : start) b = static_cast<std::uint32_t>(rng.below(4));
    SbmState state(pp.graph, Partition::from_labels(std::vector<std::int64_t>(start.begin(), start.end())));
    double worst = 0;
    for (int move = 0; move < 10000; ++move) {
        const auto v = static_cast<VertexId>(rng.below(60));
        const auto blocks = state.nonempty_blocks();
        std::uint32_t to = blocks[rng.below(blocks.size())];
        if (rng.bernoulli(0.1) && state.empty_block()) to = *state.empty_block();
        state.move(v, to);
        const double scratch = description_length(pp.graph, state.partition());
        worst = std::max(worst, std::abs(state.description_length() - scratch) / std::abs(scratch));
    }
    c.note("max relative incremental-DL drift " + fmt(worst, 2));
    c.expect(worst <= 1e-9, "incremental DL matches recomputation across 10^4 moves");
}

// ---------------------------------------------------------------------------

void criterion6(Check& c) {
    Rng rng(derive_key(6, "acceptance/rmi"));
    auto random_partition = [&](std::size_t n, std::size_t blocks) {
        std::vector<std::int64_t> labels(n);
        for (auto& l : labels) l = static_cast<std::int64_t>(rng.below(blocks));
        return Partition::from_labels(labels);
    };
    bool identity = true;
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_partition(40 + rng.below(60), 1 + rng.below(6));
        std::vector<std::uint32_t> perm(p.block_count());
        std::iota(perm.begin(), perm.end(), 0u);
        shuffle(perm, rng);
        std::vector<std::int64_t> relabeled(p.vertex_count());
        for (std::size_t v = 0; v < p.vertex_count(); ++v) relabeled[v] = 100 + perm[p[v]];
        identity = identity && std::abs(rmi(p, p).normalized - 1.0) <= 1e-9 &&
                   std::abs(rmi(p, Partition::from_labels(relabeled)).normalized - 1.0) <= 1e-9;
    }
    c.expect(identity, "identical and relabeled partitions give normalized RMI 1");

    double abs_sum = 0, sum = 0;
    int negative = 0;
    for (int pair = 0; pair < 100; ++pair) {
        const double v = rmi(random_partition(100, 5), random_partition(100, 5)).normalized;
        abs_sum += std::abs(v);
        sum += v;
        negative += v < 0;
    }
    c.note("independent partitions: mean " + fmt(sum / 100) + ", mean |.| " + fmt(abs_sum / 100) + ", " +
           std::to_string(negative) + " negative");
    c.expect(abs_sum / 100 < 0.05, "mean |normalized RMI| < 0.05 for independent partitions");
    c.expect(negative >= 1, "at least one negative value");

    const std::vector<std::int64_t> two{2, 2}, one{1, 1};
    c.expect(std::abs(log_omega_exact(two, two) - std::log(3.0)) < 1e-12, "log Omega((2,2),(2,2)) = log 3");
    c.expect(std::abs(log_omega_exact(one, one) - std::log(2.0)) < 1e-12, "log Omega((1,1),(1,1)) = log 2");
}

// ---------------------------------------------------------------------------

std::vector<Sector> random_sectors(Rng& rng, std::size_t n, std::size_t kinds) {
    std::vector<Sector> s(n);
    for (auto& x : s) x = static_cast<Sector>(rng.below(kinds));
    return s;
}

void criterion7(Check& c) {
    Rng rng(derive_key(7, "acceptance/ergm"));
    const std::vector<ErgmTerm> all{ErgmTerm::edges(), ErgmTerm::activity(Sector::Science), ErgmTerm::homophily(),
                                    ErgmTerm::closure()};
    bool consistent = true;
    for (int trial = 0; trial < 100; ++trial) {
        const auto sectors = random_sectors(rng, 8, 3);
        SimpleGraph g(8);
        const double p = rng.uniform();
        for (VertexId i = 0; i < 8; ++i)
            for (VertexId j = i + 1; j < 8; ++j)
                if (rng.bernoulli(p)) g.add_edge(i, j);
        for (VertexId i = 0; i < 8; ++i) {
            for (VertexId j = i + 1; j < 8; ++j) {
                SimpleGraph with = g, without = g;
                if (!with.has_edge(i, j)) with.add_edge(i, j);
                if (without.has_edge(i, j)) without.remove_edge(i, j);
                const auto hw = count_statistics(with, all, sectors);
                const auto ho = count_statistics(without, all, sectors);
                const auto d = change_statistics(g, i, j, all, sectors);
                for (std::size_t t = 0; t < all.size(); ++t) consistent = consistent && d[t] == hw[t] - ho[t];
            }
        }
    }
    c.expect(consistent, "change statistics equal brute-force differences on all dyads of 100 graphs");

    // Dyad-independent model: the MLE has a closed form in the two dyad classes.
    const std::vector<ErgmTerm> dyad_independent{ErgmTerm::edges(), ErgmTerm::homophily()};
    const std::vector<double> truth{-2.0, 1.0};
    double worst_closed_form = 0, err_edges = 0, err_homophily = 0;
    const int replicates = 100;
    for (int r = 0; r < replicates; ++r) {
        const auto sectors = random_sectors(rng, 200, 4);
        const auto g = simulate_ergm(truth, dyad_independent, sectors, static_cast<std::uint64_t>(r), 1);
        const auto fit = fit_mple(g, dyad_independent, sectors);
        double same = 0, same_on = 0, diff = 0, diff_on = 0;
        for (VertexId i = 0; i < 200; ++i)
            for (VertexId j = i + 1; j < 200; ++j) {
                const bool s = sectors[i] == sectors[j];
                (s ? same : diff) += 1;
                if (g.has_edge(i, j)) (s ? same_on : diff_on) += 1;
            }
        const double logit_diff = std::log(diff_on / (diff - diff_on));
        const double logit_same = std::log(same_on / (same - same_on));
        worst_closed_form = std::max({worst_closed_form, std::abs(fit.theta[0] - logit_diff),
                                      std::abs(fit.theta[1] - (logit_same - logit_diff))});
        err_edges += std::abs(fit.theta[0] - truth[0]);
        err_homophily += std::abs(fit.theta[1] - truth[1]);
    }
    c.note("MPLE vs closed-form MLE max deviation " + fmt(worst_closed_form, 2) + "; MAE edges " +
           fmt(err_edges / replicates) + ", homophily " + fmt(err_homophily / replicates));
    c.expect(worst_closed_form <= 1e-8, "MPLE equals the logistic MLE on dyad-independent models");
    c.expect(err_edges / replicates <= 0.15 && err_homophily / replicates <= 0.15,
             "simulate-fit recovery within 0.15 mean absolute error");

    const std::vector<ErgmTerm> null_terms{ErgmTerm::edges(), ErgmTerm::homophily(), ErgmTerm::closure()};
    std::vector<double> hom, clo;
    for (int r = 0; r < 100; ++r) {
        const auto sectors = random_sectors(rng, 50, 3);
        const auto g = synthetic::erdos_renyi(50, 0.1, static_cast<std::uint64_t>(1000 + r));
        const auto fit = fit_mple(g, null_terms, sectors);
        if (!fit.converged) continue;
        hom.push_back(fit.theta[1]);
        clo.push_back(fit.theta[2]);
    }
    auto centered = [&](const std::vector<double>& v, const char* name) {
        const double n = static_cast<double>(v.size());
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double se = std::sqrt(ss / (n - 1)) / std::sqrt(n);
        c.note(std::string(name) + " mean " + fmt(mean) + " (SE " + fmt(se) + ")");
        return std::abs(mean) < 2 * se;
    };
    c.expect(hom.size() >= 95, "ER fits converge");
    c.expect(centered(hom, "ER homophily") && centered(clo, "ER closure"), "ER null coefficients centered on 0");
}

// ---------------------------------------------------------------------------

struct ShapeResult {
    bool density = false, sbm = false, ergm = false, widths = false;
    std::string detail;
};

ShapeResult four_level_run(const fs::path& dir, std::uint64_t seed) {
    ShapeResult out;
    fs::create_directories(dir);
    const auto data = synthetic::four_level({}, seed);
    {
        std::ofstream roster(dir / "roster.csv", std::ios::binary);
        write_roster_csv(roster, data.roster);
        std::ofstream events(dir / "events.csv", std::ios::binary);
        write_events_csv(events, data.events);
    }
    PipelineConfig config;
    config.events = {"events.csv"};
    config.roster = "roster.csv";
    config.base_dir = dir;
    config.keywords = {"climate"};
    config.seed = seed;
    config.bootstrap_n = 100;

    Pipeline unfixed(config);
    std::ostringstream detail;

    // (a) within-organization density ordering.
    const double d_ind_main = org_density(unfixed.level_graph(Level::IndMain), unfixed.roster(), Level::IndMain).mean;
    const double d_ind_side = org_density(unfixed.level_graph(Level::IndSide), unfixed.roster(), Level::IndSide).mean;
    const double d_org_side = org_density(unfixed.level_graph(Level::OrgSide), unfixed.roster(), Level::OrgSide).mean;
    out.density = d_ind_main > d_ind_side && d_ind_main > d_org_side && d_org_side < 0.05;
    detail << "density im/is/os " << fmt(d_ind_main, 3) << "/" << fmt(d_ind_side, 3) << "/" << fmt(d_org_side, 3);

    // (b) one block with a sparsity warning on the organization side.
    const auto& side_fit = unfixed.sbm(Level::OrgSide);
    out.sbm = side_fit.partition.block_count() == 1 && side_fit.sparse;
    detail << "; side B " << side_fit.partition.block_count() << (side_fit.sparse ? " sparse" : "");

    // (c) homophily higher and closure lower for organization main than individual side.
    const auto terms = unfixed.ergm_terms();
    const auto sectors = unfixed.organization_sectors();
    const auto main_fit = fit_mple(unfixed.collapsed(Level::OrgMain).to_simple(), terms, sectors);
    const auto side_ind_fit = fit_mple(unfixed.collapsed(Level::IndSide).to_simple(), terms, sectors);
    const auto index = [&](ErgmTerm::Kind k) {
        return static_cast<std::size_t>(std::find_if(terms.begin(), terms.end(),
                                                     [&](const ErgmTerm& t) { return t.kind == k; }) -
                                        terms.begin());
    };
    const auto h = index(ErgmTerm::Kind::SectorHomophily);
    const auto cl = index(ErgmTerm::Kind::TriadicClosure);
    out.ergm = main_fit.converged && side_ind_fit.converged && main_fit.theta[h] > side_ind_fit.theta[h] &&
               main_fit.theta[cl] < side_ind_fit.theta[cl];
    detail << "; homophily om/is " << fmt(main_fit.theta[h], 3) << "/" << fmt(side_ind_fit.theta[h], 3)
           << ", closure om/is " << fmt(main_fit.theta[cl], 3) << "/" << fmt(side_ind_fit.theta[cl], 3);

    // (d) resampling the organization side at the organization main size narrows the
    // coefficient distributions.
    auto width = [&](Pipeline& p) {
        try {
            return bootstrap_ergm(p.bootstrap_collapsed(Level::OrgSide), terms, sectors).mean_width();
        } catch (const DegenerateError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    PipelineConfig fixed_config = config;
    fixed_config.fix_size_to = Level::OrgMain;
    Pipeline fixed(fixed_config);
    const double w_unfixed = width(unfixed);
    const double w_fixed = width(fixed);
    out.widths = std::isfinite(w_fixed) && w_fixed < w_unfixed;
    detail << "; side width unfixed/fixed " << fmt(w_unfixed, 3) << "/" << fmt(w_fixed, 3);
    out.detail = detail.str();
    return out;
}

void criterion8(Check& c, const Options& o) {
    int density = 0, sbm = 0, ergm = 0, widths = 0;
    const int seeds = 20;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto r = four_level_run(o.work / ("four_level_" + std::to_string(seed)), static_cast<std::uint64_t>(seed));
        density += r.density;
        sbm += r.sbm;
        ergm += r.ergm;
        widths += r.widths;
        if (std::getenv("STRATANET_ACCEPTANCE_VERBOSE")) std::cerr << "seed " << seed << ": " << r.detail << '\n';
    }
    c.note("(a) " + std::to_string(density) + "/20, (b) " + std::to_string(sbm) + "/20, (c) " + std::to_string(ergm) +
           "/20, (d) " + std::to_string(widths) + "/20");
    const int need = 16;
    c.expect(density >= need, "(a) density ordering in >= 80% of seeds");
    c.expect(sbm >= need, "(b) one-block sparse organization side in >= 80% of seeds");
    c.expect(ergm >= need, "(c) homophily/closure ordering in >= 80% of seeds");
    c.expect(widths >= need, "(d) size fixing narrows distributions in >= 80% of seeds");
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> read_artifacts(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (ext != ".csv" && ext != ".json") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream body;
        body << in.rdbuf();
        files[entry.path().filename().string()] = body.str();
    }
    return files;
}

void criterion9(Check& c, const Options& o) {
    if (o.cli.empty() || o.fixture.empty()) {
        c.expect(false, "--cli and --fixture are required");
        return;
    }
    const auto config = o.fixture / "config.json";
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* name : {"run1", "run2"}) {
        const auto out = o.work / "determinism" / name;
        fs::remove_all(out);
        const std::string cmd = "\"" + o.cli + "\" pipeline --config \"" + config.string() + "\" --out-dir \"" +
                                out.string() + "\" > \"" + (o.work / "determinism" / (std::string(name) + ".log")).string() +
                                "\" 2>&1";
        fs::create_directories(o.work / "determinism");
        const int rc = std::system(cmd.c_str());
        c.expect(rc == 0, std::string("pipeline ") + name + " exited with status 0");
        runs.push_back(read_artifacts(out));
    }
    c.note(std::to_string(runs[0].size()) + " CSV/JSON artifacts");
    c.expect(runs[0].size() >= 30, "pipeline produced the full artifact set");
    c.expect(runs[0] == runs[1], "two runs give byte-identical artifacts");
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--cli") o.cli = argv[i + 1];
        else if (key == "--fixture") o.fixture = argv[i + 1];
        else if (key == "--work") o.work = argv[i + 1];
        else if (key == "--only") o.only = std::atoi(argv[i + 1]);
        else {
            std::cerr << "unknown option " << key << '\n';
            return 2;
        }
    }
    fs::create_directories(o.work);

    const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria{
        {"burstiness", criterion1},
        {"overlap and density", criterion2},
        {"backbone calibration", criterion3},
        {"bootstrap correctness", criterion4},
        {"SBM recovery", criterion5},
        {"RMI", criterion6},
        {"ERGM", criterion7},
        {"four-level shape", [&](Check& c) { criterion8(c, o); }},
        {"pipeline determinism", [&](Check& c) { criterion9(c, o); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (o.only && o.only != static_cast<int>(i + 1)) continue;
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = check.failures.empty();
        failed += !pass;
        std::printf("criterion %zu (%s): %s [%.1f s]\n", i + 1, criteria[i].first, pass ? "PASS" : "FAIL", seconds);
        for (const auto& n : check.notes) std::printf("    %s\n", n.c_str());
        for (const auto& f : check.failures) std::printf("    failed: %s\n", f.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
