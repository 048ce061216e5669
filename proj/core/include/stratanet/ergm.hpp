#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratanet/graph.hpp"
#include "stratanet/types.hpp"

namespace stratanet {

/// Statistic of an undirected binary graph whose vertices carry sectors.
struct ErgmTerm {
    enum class Kind : std::uint8_t { Edges, SectorActivity, SectorHomophily, TriadicClosure };

    Kind kind = Kind::Edges;
    Sector sector = Sector::Government;  // SectorActivity only

    static ErgmTerm edges() { return {Kind::Edges, Sector::Government}; }
    static ErgmTerm activity(Sector s) { return {Kind::SectorActivity, s}; }
    static ErgmTerm homophily() { return {Kind::SectorHomophily, Sector::Government}; }
    static ErgmTerm closure() { return {Kind::TriadicClosure, Sector::Government}; }

    friend bool operator==(const ErgmTerm&, const ErgmTerm&) = default;
};

/// "edges", "activity_<sector>", "homophily", "closure".
std::string term_name(const ErgmTerm& term);
ErgmTerm parse_term(std::string_view name);

/// Edges, one activity term per sector present in `sectors` except the first such
/// sector (the baseline), homophily and closure.
std::vector<ErgmTerm> default_terms(std::span<const Sector> sectors);

/// h(G). Edges = |E|; SectorActivity(s) = endpoints in s summed over edges;
/// SectorHomophily = edges within one sector; TriadicClosure = edges whose endpoints
/// share at least one partner. Throws InputError if `sectors` does not cover the graph.
std::vector<double> count_statistics(const SimpleGraph& g, std::span<const ErgmTerm> terms,
                                     std::span<const Sector> sectors);

/// h(G + ij) - h(G - ij), whatever the current state of the dyad.
std::vector<double> change_statistics(const SimpleGraph& g, VertexId i, VertexId j, std::span<const ErgmTerm> terms,
                                      std::span<const Sector> sectors);

/// Largest value each statistic can take on a graph with these vertex sectors.
std::vector<double> statistic_maxima(std::span<const ErgmTerm> terms, std::span<const Sector> sectors);

/// Reason the graph cannot support an MPLE fit, or nullopt. A fit needs every term's
/// statistic strictly between 0 and its maximum.
std::optional<std::string> degeneracy(const SimpleGraph& g, std::span<const ErgmTerm> terms,
                                      std::span<const Sector> sectors);

struct ErgmFit {
    std::vector<ErgmTerm> terms;
    std::vector<double> theta;
    std::vector<double> standard_errors;
    double log_pseudolikelihood = 0;
    bool converged = false;
    int iterations = 0;
    /// For non-converged fits: sign of each coefficient's drift (-1, 0, +1).
    std::vector<int> divergence;
    std::string message;
};

struct MpleOptions {
    int max_iterations = 100;
    double tolerance = 1e-10;
    /// Coefficients beyond this magnitude are treated as diverging (separation).
    double divergence_bound = 25.0;
};

/// Logistic regression of dyad states on change statistics by Newton-Raphson (IRLS)
/// with step halving. Separated data give converged = false and the drift direction.
ErgmFit fit_mple(const SimpleGraph& g, std::span<const ErgmTerm> terms, std::span<const Sector> sectors,
                 const MpleOptions& options = {});

/// Gibbs sampler: each sweep visits every dyad once in random order and sets it on
/// with probability logistic(theta . delta h). Starts from `initial` or the empty graph.
SimpleGraph simulate_ergm(std::span<const double> theta, std::span<const ErgmTerm> terms,
                          std::span<const Sector> sectors, std::uint64_t seed, int sweeps,
                          const std::optional<SimpleGraph>& initial = std::nullopt);

struct ErgmSample {
    std::size_t index = 0;
    std::optional<ErgmFit> fit;       // absent when the graph failed the degeneracy check
    std::string degenerate_reason;
};

struct TermSummary {
    ErgmTerm term;
    std::size_t count = 0;  // converged fits
    double mean = 0;
    double sd = 0;
    double q025 = 0, q25 = 0, q50 = 0, q75 = 0, q975 = 0;

    double width() const { return q975 - q025; }
};

struct ErgmEnsemble {
    std::vector<ErgmTerm> terms;
    std::vector<ErgmSample> samples;  // ordered by index
    std::vector<TermSummary> summary;
    std::size_t degenerate = 0;
    std::size_t non_converged = 0;
    /// Set when some term's central 95% range exceeds the width threshold or fewer than
    /// half of the samples gave converged fits.
    bool wide = false;
    double mean_width() const;
};

struct ErgmBootstrapOptions {
    MpleOptions mple;
    double width_threshold = 10.0;
};

/// Fits every graph (in parallel) and summarizes converged coefficients per term.
/// Throws DegenerateError("level too sparse ...") when no sample yields a converged fit.
ErgmEnsemble bootstrap_ergm(std::span<const SimpleGraph> graphs, std::span<const ErgmTerm> terms,
                            std::span<const Sector> sectors, const ErgmBootstrapOptions& options = {});

}  // namespace stratanet
