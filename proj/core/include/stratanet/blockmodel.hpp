#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stratanet/graph.hpp"
#include "stratanet/random.hpp"

namespace stratanet {

/// Description length (nats) of an undirected simple graph under the microcanonical
/// degree-corrected SBM with uniform priors, split by component.
struct DescriptionLength {
    double adjacency = 0;    // -log P(A | k, e, b)
    double degrees = 0;      // -log P(k | e, b), uniform over degree sequences per block
    double edge_counts = 0;  // -log P(e), uniform over block multigraphs with E edges
    double partition = 0;    // -log P(b), uniform over block sizes, then labelings, then B

    double total() const { return adjacency + degrees + edge_counts + partition; }
};

DescriptionLength description_length_terms(const SimpleGraph& g, const Partition& partition);
double description_length(const SimpleGraph& g, const Partition& partition);

/// Mutable block-model state with incrementally maintained description length.
/// Block labels range over 0..N-1 and may be empty internally; partition()
/// compacts them.
class SbmState {
public:
    SbmState(const SimpleGraph& g, const Partition& initial);

    const SimpleGraph& graph() const { return *graph_; }
    double description_length() const { return dl_; }
    /// From-scratch evaluation of the current state.
    double recompute_description_length() const;

    std::size_t block_count() const { return nonempty_.size(); }
    std::uint32_t block_of(VertexId v) const { return block_[v]; }
    std::size_t block_size(std::uint32_t r) const { return members_[r].size(); }
    std::span<const VertexId> members(std::uint32_t r) const { return members_[r]; }
    std::span<const std::uint32_t> nonempty_blocks() const { return nonempty_; }
    /// Some currently empty label, if any.
    std::optional<std::uint32_t> empty_block() const;

    /// Moves v to block `to`, updates the description length and returns the change.
    double move(VertexId v, std::uint32_t to);

    Partition partition() const;

private:
    double pair_term(std::uint32_t r, std::uint32_t s) const;
    double block_term(std::uint32_t r) const;
    double global_term(std::size_t blocks) const;
    std::int64_t& pair(std::uint32_t r, std::uint32_t s) { return pairs_[std::size_t{std::min(r, s)} * n_ + std::max(r, s)]; }
    std::int64_t pair(std::uint32_t r, std::uint32_t s) const {
        return pairs_[std::size_t{std::min(r, s)} * n_ + std::max(r, s)];
    }
    void set_nonempty(std::uint32_t r, bool nonempty);

    const SimpleGraph* graph_;
    std::size_t n_;
    std::int64_t edges_;
    std::vector<std::uint32_t> block_;
    std::vector<std::vector<VertexId>> members_;
    std::vector<std::size_t> member_pos_;
    std::vector<std::int64_t> pairs_;       // upper triangle: edges between r<s; diagonal = internal edges
    std::vector<std::int64_t> degree_sum_;  // e_r
    std::vector<std::uint32_t> nonempty_;
    std::vector<std::size_t> nonempty_pos_;
    std::vector<std::uint32_t> empty_;
    std::vector<std::size_t> empty_pos_;
    double constant_ = 0;  // -sum_i log k_i! + log N! + log N
    double dl_ = 0;

    // Scratch for move().
    std::vector<std::uint32_t> touched_;
};

struct SbmConfig {
    int n_sweeps = 10000;
    /// Fraction of sweeps after which only improving moves are accepted.
    double greedy_after = 0.8;
    /// Inverse temperature of the Metropolis-Hastings phase.
    double beta = 1.0;
    int merge_attempts_per_sweep = 4;
    int split_attempts_per_sweep = 4;
    std::uint64_t seed = 0;
    std::optional<Partition> initial;  // default: one block
};

struct MoveCounters {
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;
};

struct SbmFit {
    Partition partition;
    double description_length = 0;
    std::vector<double> trace;  // current description length after each sweep
    int sweeps = 0;
    MoveCounters single, merge, split;
    /// Mean degree below 2: block structure is poorly identifiable.
    bool sparse = false;
};

/// Best partition visited by a merge-split MCMC run minimizing the description length.
/// Throws InputError when n_sweeps <= 0 or the graph has no vertices.
SbmFit fit_sbm(const SimpleGraph& g, const SbmConfig& config);

/// log of the number of non-negative integer matrices with the given margins. Exact
/// (dynamic programming) for at most 12 non-zero-margin cells and n <= 200, otherwise
/// the Diaconis-Efron approximation averaged over both orientations.
/// Throws InputError when the margins have different totals.
double log_omega(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols);
double log_omega_exact(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols);
double log_omega_approx(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols);

struct RmiResult {
    double raw = 0;         // nats per vertex
    double normalized = 0;  // 1 iff identical up to relabeling; may be negative
};

/// Reduced mutual information (Newman, Cantwell & Young 2020):
///   M = (1/n) log[n! prod n_rs! / (prod a_r! prod b_s!)] - (1/n) log Omega(a, b),
/// normalized by the mean of M(p1, p1) and M(p2, p2).
/// Throws InputError when the partitions cover different vertex counts.
RmiResult rmi(const Partition& p1, const Partition& p2);

}  // namespace stratanet
