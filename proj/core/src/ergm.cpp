#include "stratanet/ergm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <tbb/parallel_for.h>

#include "stratanet/random.hpp"

namespace stratanet {

std::string term_name(const ErgmTerm& term) {
    switch (term.kind) {
        case ErgmTerm::Kind::Edges: return "edges";
        case ErgmTerm::Kind::SectorActivity: return "activity_" + std::string(to_string(term.sector));
        case ErgmTerm::Kind::SectorHomophily: return "homophily";
        case ErgmTerm::Kind::TriadicClosure: return "closure";
    }
    return "";
}

ErgmTerm parse_term(std::string_view name) {
    if (name == "edges") return ErgmTerm::edges();
    if (name == "homophily") return ErgmTerm::homophily();
    if (name == "closure") return ErgmTerm::closure();
    constexpr std::string_view prefix = "activity_";
    if (name.starts_with(prefix)) return ErgmTerm::activity(parse_sector(name.substr(prefix.size())));
    throw InputError("unknown ERGM term '" + std::string(name) + "'");
}

std::vector<ErgmTerm> default_terms(std::span<const Sector> sectors) {
    std::vector<ErgmTerm> terms{ErgmTerm::edges()};
    std::array<bool, kSectorCount> present{};
    for (auto s : sectors) present[index_of(s)] = true;
    bool baseline_skipped = false;
    for (std::size_t s = 0; s < kSectorCount; ++s) {
        if (!present[s]) continue;
        if (!baseline_skipped) {
            baseline_skipped = true;
            continue;
        }
        terms.push_back(ErgmTerm::activity(static_cast<Sector>(s)));
    }
    terms.push_back(ErgmTerm::homophily());
    terms.push_back(ErgmTerm::closure());
    return terms;
}

namespace {

void check_sectors(const SimpleGraph& g, std::span<const Sector> sectors) {
    if (sectors.size() != g.vertex_count())
        throw InputError("sector map covers " + std::to_string(sectors.size()) + " vertices, graph has " +
                         std::to_string(g.vertex_count()));
}

bool has_term(std::span<const ErgmTerm> terms, ErgmTerm::Kind kind) {
    return std::any_of(terms.begin(), terms.end(), [&](const ErgmTerm& t) { return t.kind == kind; });
}

}  // namespace

std::vector<double> count_statistics(const SimpleGraph& g, std::span<const ErgmTerm> terms,
                                     std::span<const Sector> sectors) {
    check_sectors(g, sectors);
    std::vector<double> h(terms.size(), 0.0);
    const bool closure = has_term(terms, ErgmTerm::Kind::TriadicClosure);
    for (const auto& [a, b] : g.edge_list()) {
        const bool closed = closure && g.shared_partners(a, b) > 0;
        for (std::size_t t = 0; t < terms.size(); ++t) {
            switch (terms[t].kind) {
                case ErgmTerm::Kind::Edges: h[t] += 1; break;
                case ErgmTerm::Kind::SectorActivity:
                    h[t] += (sectors[a] == terms[t].sector) + (sectors[b] == terms[t].sector);
                    break;
                case ErgmTerm::Kind::SectorHomophily: h[t] += sectors[a] == sectors[b]; break;
                case ErgmTerm::Kind::TriadicClosure: h[t] += closed; break;
            }
        }
    }
    return h;
}

namespace {

// Closure change for adding ij to G - ij: the new edge itself, plus each edge ik / jk
// to a common neighbour k that had no shared partner before.
double closure_change(const SimpleGraph& g, VertexId i, VertexId j) {
    const bool present = g.has_edge(i, j);
    const VertexId a = g.degree(i) <= g.degree(j) ? i : j;
    const VertexId b = a == i ? j : i;
    double delta = 0;
    bool any_common = false;
    for (VertexId k : g.neighbors(a)) {
        if (k == b || !g.has_edge(b, k)) continue;
        any_common = true;
        const std::size_t offset = present ? 1 : 0;
        if (g.shared_partners(i, k) - offset == 0) delta += 1;
        if (g.shared_partners(j, k) - offset == 0) delta += 1;
    }
    return delta + (any_common ? 1.0 : 0.0);
}

void change_into(const SimpleGraph& g, VertexId i, VertexId j, std::span<const ErgmTerm> terms,
                 std::span<const Sector> sectors, double* out) {
    for (std::size_t t = 0; t < terms.size(); ++t) {
        switch (terms[t].kind) {
            case ErgmTerm::Kind::Edges: out[t] = 1; break;
            case ErgmTerm::Kind::SectorActivity:
                out[t] = (sectors[i] == terms[t].sector) + (sectors[j] == terms[t].sector);
                break;
            case ErgmTerm::Kind::SectorHomophily: out[t] = sectors[i] == sectors[j]; break;
            case ErgmTerm::Kind::TriadicClosure: out[t] = closure_change(g, i, j); break;
        }
    }
}

}  // namespace

std::vector<double> change_statistics(const SimpleGraph& g, VertexId i, VertexId j, std::span<const ErgmTerm> terms,
                                      std::span<const Sector> sectors) {
    check_sectors(g, sectors);
    if (i == j) throw InputError("change statistics need two distinct vertices");
    std::vector<double> delta(terms.size());
    change_into(g, i, j, terms, sectors, delta.data());
    return delta;
}

std::vector<double> statistic_maxima(std::span<const ErgmTerm> terms, std::span<const Sector> sectors) {
    const double n = static_cast<double>(sectors.size());
    const double dyads = n * (n - 1) / 2;
    std::array<double, kSectorCount> size{};
    for (auto s : sectors) size[index_of(s)] += 1;
    std::vector<double> max(terms.size());
    for (std::size_t t = 0; t < terms.size(); ++t) {
        switch (terms[t].kind) {
            case ErgmTerm::Kind::Edges: max[t] = dyads; break;
            case ErgmTerm::Kind::SectorActivity: max[t] = size[index_of(terms[t].sector)] * (n - 1); break;
            case ErgmTerm::Kind::SectorHomophily:
                max[t] = 0;
                for (double c : size) max[t] += c * (c - 1) / 2;
                break;
            case ErgmTerm::Kind::TriadicClosure: max[t] = n >= 3 ? dyads : 0; break;
        }
    }
    return max;
}

std::optional<std::string> degeneracy(const SimpleGraph& g, std::span<const ErgmTerm> terms,
                                      std::span<const Sector> sectors) {
    const auto h = count_statistics(g, terms, sectors);
    const auto max = statistic_maxima(terms, sectors);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        if (h[t] <= 0) return term_name(terms[t]) + " statistic is 0";
        if (h[t] >= max[t]) return term_name(terms[t]) + " statistic is at its maximum";
    }
    return std::nullopt;
}

namespace {

double log1p_exp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

ErgmFit fit_mple(const SimpleGraph& g, std::span<const ErgmTerm> terms, std::span<const Sector> sectors,
                 const MpleOptions& options) {
    check_sectors(g, sectors);
    const std::size_t n = g.vertex_count();
    const std::size_t p = terms.size();
    if (p == 0) throw InputError("no ERGM terms");
    ErgmFit fit;
    fit.terms.assign(terms.begin(), terms.end());
    fit.theta.assign(p, 0.0);
    fit.standard_errors.assign(p, 0.0);

    const std::size_t dyads = n * (n - 1) / 2;
    if (g.edge_count() == 0 || g.edge_count() == dyads) {
        fit.message = g.edge_count() == 0 ? "no edges: perfect separation" : "complete graph: perfect separation";
        fit.divergence.assign(p, 0);
        fit.divergence[0] = g.edge_count() == 0 ? -1 : 1;
        return fit;
    }

    Eigen::MatrixXd x(static_cast<Eigen::Index>(dyads), static_cast<Eigen::Index>(p));
    Eigen::VectorXd y(static_cast<Eigen::Index>(dyads));
    std::vector<double> row(p);
    Eigen::Index r = 0;
    for (VertexId i = 0; i < n; ++i) {
        for (VertexId j = i + 1; j < n; ++j, ++r) {
            change_into(g, i, j, terms, sectors, row.data());
            for (std::size_t t = 0; t < p; ++t) x(r, static_cast<Eigen::Index>(t)) = row[t];
            y(r) = g.has_edge(i, j) ? 1.0 : 0.0;
        }
    }

    auto log_likelihood = [&](const Eigen::VectorXd& beta) {
        const Eigen::VectorXd eta = x * beta;
        double ll = 0;
        for (Eigen::Index k = 0; k < eta.size(); ++k) ll += y(k) * eta(k) - log1p_exp(eta(k));
        return ll;
    };

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    double ll = log_likelihood(beta);
    Eigen::MatrixXd hessian(p, p);
    bool singular = false;
    for (fit.iterations = 1; fit.iterations <= options.max_iterations; ++fit.iterations) {
        const Eigen::VectorXd eta = x * beta;
        Eigen::VectorXd prob(eta.size()), weight(eta.size());
        for (Eigen::Index k = 0; k < eta.size(); ++k) {
            prob(k) = logistic(eta(k));
            weight(k) = prob(k) * (1.0 - prob(k));
        }
        const Eigen::VectorXd gradient = x.transpose() * (y - prob);
        hessian = x.transpose() * weight.asDiagonal() * x;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-12 * hessian.norm()) {
            singular = true;
            break;
        }
        Eigen::VectorXd step = ldlt.solve(gradient);
        double scale = 1.0;
        Eigen::VectorXd next = beta + step;
        double ll_next = log_likelihood(next);
        for (int halving = 0; halving < 40 && ll_next < ll - 1e-12 * std::abs(ll); ++halving) {
            scale *= 0.5;
            next = beta + scale * step;
            ll_next = log_likelihood(next);
        }
        const double change = (scale * step).cwiseAbs().maxCoeff();
        beta = next;
        ll = ll_next;
        if (beta.cwiseAbs().maxCoeff() > options.divergence_bound) break;
        if (change < options.tolerance * (1.0 + beta.cwiseAbs().maxCoeff())) {
            fit.converged = true;
            break;
        }
    }
    fit.iterations = std::min(fit.iterations, options.max_iterations);

    for (std::size_t t = 0; t < p; ++t) fit.theta[t] = beta(static_cast<Eigen::Index>(t));
    fit.log_pseudolikelihood = ll;
    if (fit.converged) {
        const Eigen::VectorXd eta = x * beta;
        Eigen::VectorXd weight(eta.size());
        for (Eigen::Index k = 0; k < eta.size(); ++k) {
            const double q = logistic(eta(k));
            weight(k) = q * (1.0 - q);
        }
        hessian = x.transpose() * weight.asDiagonal() * x;
        const Eigen::MatrixXd cov = hessian.inverse();
        for (std::size_t t = 0; t < p; ++t) {
            const double v = cov(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t));
            fit.standard_errors[t] = v > 0 ? std::sqrt(v) : 0.0;
        }
        return fit;
    }
    fit.divergence.assign(p, 0);
    for (std::size_t t = 0; t < p; ++t)
        if (std::abs(fit.theta[t]) > 1.0) fit.divergence[t] = fit.theta[t] > 0 ? 1 : -1;
    fit.message = singular ? "singular information matrix: separated or collinear change statistics"
                           : "coefficients diverge: perfect or quasi-complete separation";
    return fit;
}

SimpleGraph simulate_ergm(std::span<const double> theta, std::span<const ErgmTerm> terms,
                          std::span<const Sector> sectors, std::uint64_t seed, int sweeps,
                          const std::optional<SimpleGraph>& initial) {
    if (sweeps < 1) throw InputError("sweeps must be at least 1");
    if (theta.size() != terms.size()) throw InputError("theta and terms differ in length");
    const std::size_t n = sectors.size();
    SimpleGraph g = initial ? *initial : SimpleGraph(n);
    check_sectors(g, sectors);

    std::vector<std::pair<VertexId, VertexId>> dyads;
    dyads.reserve(n * (n - 1) / 2);
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j) dyads.emplace_back(i, j);

    Rng rng(derive_key(seed, "ergm-gibbs"));
    std::vector<double> delta(terms.size());
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        shuffle(dyads, rng);
        for (const auto& [i, j] : dyads) {
            change_into(g, i, j, terms, sectors, delta.data());
            double eta = 0;
            for (std::size_t t = 0; t < terms.size(); ++t) eta += theta[t] * delta[t];
            const bool on = rng.uniform() < logistic(eta);
            if (on != g.has_edge(i, j)) g.toggle(i, j);
        }
    }
    return g;
}

namespace {

// Linear interpolation between order statistics (the common "type 7" definition).
double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double ErgmEnsemble::mean_width() const {
    if (summary.empty()) return 0.0;
    double total = 0;
    for (const auto& s : summary) total += s.width();
    return total / static_cast<double>(summary.size());
}

ErgmEnsemble bootstrap_ergm(std::span<const SimpleGraph> graphs, std::span<const ErgmTerm> terms,
                            std::span<const Sector> sectors, const ErgmBootstrapOptions& options) {
    ErgmEnsemble out;
    out.terms.assign(terms.begin(), terms.end());
    out.samples.resize(graphs.size());
    tbb::parallel_for(std::size_t{0}, graphs.size(), [&](std::size_t i) {
        auto& sample = out.samples[i];
        sample.index = i;
        if (auto reason = degeneracy(graphs[i], terms, sectors)) {
            sample.degenerate_reason = *reason;
            return;
        }
        sample.fit = fit_mple(graphs[i], terms, sectors, options.mple);
    });

    std::vector<std::vector<double>> values(terms.size());
    for (const auto& sample : out.samples) {
        if (!sample.fit) {
            ++out.degenerate;
            continue;
        }
        if (!sample.fit->converged) {
            ++out.non_converged;
            continue;
        }
        for (std::size_t t = 0; t < terms.size(); ++t) values[t].push_back(sample.fit->theta[t]);
    }
    const std::size_t converged = graphs.size() - out.degenerate - out.non_converged;
    if (converged == 0)
        throw DegenerateError("level too sparse: none of " + std::to_string(graphs.size()) +
                              " bootstrap samples gave a converged ERGM fit");

    for (std::size_t t = 0; t < terms.size(); ++t) {
        auto& v = values[t];
        std::sort(v.begin(), v.end());
        TermSummary s;
        s.term = terms[t];
        s.count = v.size();
        s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        s.q025 = quantile(v, 0.025);
        s.q25 = quantile(v, 0.25);
        s.q50 = quantile(v, 0.5);
        s.q75 = quantile(v, 0.75);
        s.q975 = quantile(v, 0.975);
        if (s.width() > options.width_threshold) out.wide = true;
        out.summary.push_back(s);
    }
    if (2 * converged < graphs.size()) out.wide = true;
    return out;
}

}  // namespace stratanet
