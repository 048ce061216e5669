#include "stratanet/blockmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "special.hpp"

namespace stratanet {

using detail::log_binomial;
using detail::log_factorial;
using detail::log_multiset;

namespace {

double internal_pair_term(std::int64_t internal_edges) {
    // e_rr!! with e_rr = 2 m_rr equals 2^m_rr m_rr!.
    return -(static_cast<double>(internal_edges) * std::numbers::ln2 + log_factorial(internal_edges));
}

}  // namespace

DescriptionLength description_length_terms(const SimpleGraph& g, const Partition& partition) {
    const std::size_t n = g.vertex_count();
    if (partition.vertex_count() != n) throw InputError("partition size does not match the graph");
    DescriptionLength dl;
    if (n == 0) return dl;

    const std::size_t blocks = partition.block_count();
    std::vector<std::int64_t> block_n(blocks, 0), block_e(blocks, 0);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t> pair_edges;
    for (VertexId v = 0; v < n; ++v) {
        ++block_n[partition[v]];
        block_e[partition[v]] += static_cast<std::int64_t>(g.degree(v));
        dl.adjacency -= log_factorial(static_cast<std::int64_t>(g.degree(v)));
    }
    for (const auto& [a, b] : g.edge_list()) {
        const auto r = std::min(partition[a], partition[b]);
        const auto s = std::max(partition[a], partition[b]);
        ++pair_edges[{r, s}];
    }
    for (const auto& [rs, count] : pair_edges)
        dl.adjacency += rs.first == rs.second ? internal_pair_term(count) : -log_factorial(count);
    for (std::size_t r = 0; r < blocks; ++r) {
        dl.adjacency += log_factorial(block_e[r]);
        dl.degrees += log_multiset(block_n[r], block_e[r]);
        dl.partition -= log_factorial(block_n[r]);
    }
    const auto b = static_cast<std::int64_t>(blocks);
    const auto nn = static_cast<std::int64_t>(n);
    dl.edge_counts = log_multiset(b * (b + 1) / 2, static_cast<std::int64_t>(g.edge_count()));
    dl.partition += log_factorial(nn) + log_binomial(nn - 1, b - 1) + std::log(static_cast<double>(n));
    return dl;
}

double description_length(const SimpleGraph& g, const Partition& partition) {
    return description_length_terms(g, partition).total();
}

SbmState::SbmState(const SimpleGraph& g, const Partition& initial)
    : graph_(&g),
      n_(g.vertex_count()),
      edges_(static_cast<std::int64_t>(g.edge_count())),
      block_(initial.assignment()),
      members_(g.vertex_count()),
      member_pos_(g.vertex_count(), 0),
      pairs_(g.vertex_count() * g.vertex_count(), 0),
      degree_sum_(g.vertex_count(), 0),
      nonempty_pos_(g.vertex_count(), 0),
      empty_pos_(g.vertex_count(), 0) {
    if (initial.vertex_count() != n_) throw InputError("initial partition size does not match the graph");
    for (VertexId v = 0; v < n_; ++v) {
        const auto r = block_[v];
        member_pos_[v] = members_[r].size();
        members_[r].push_back(v);
        degree_sum_[r] += static_cast<std::int64_t>(g.degree(v));
        constant_ -= log_factorial(static_cast<std::int64_t>(g.degree(v)));
    }
    for (const auto& [a, b] : g.edge_list()) ++pair(block_[a], block_[b]);
    for (std::uint32_t r = 0; r < n_; ++r) {
        if (members_[r].empty()) {
            empty_pos_[r] = empty_.size();
            empty_.push_back(r);
        } else {
            nonempty_pos_[r] = nonempty_.size();
            nonempty_.push_back(r);
        }
    }
    if (n_ > 0) constant_ += log_factorial(static_cast<std::int64_t>(n_)) + std::log(static_cast<double>(n_));
    dl_ = recompute_description_length();
}

double SbmState::pair_term(std::uint32_t r, std::uint32_t s) const {
    const std::int64_t count = pair(r, s);
    return r == s ? internal_pair_term(count) : -log_factorial(count);
}

double SbmState::block_term(std::uint32_t r) const {
    const auto size = static_cast<std::int64_t>(members_[r].size());
    if (size == 0) return 0.0;
    return log_factorial(degree_sum_[r]) + log_multiset(size, degree_sum_[r]) - log_factorial(size);
}

double SbmState::global_term(std::size_t blocks) const {
    const auto b = static_cast<std::int64_t>(blocks);
    return log_binomial(static_cast<std::int64_t>(n_) - 1, b - 1) + log_multiset(b * (b + 1) / 2, edges_);
}

double SbmState::recompute_description_length() const {
    if (n_ == 0) return 0.0;
    double total = constant_ + global_term(nonempty_.size());
    for (auto r : nonempty_) {
        total += block_term(r);
        for (auto s : nonempty_)
            if (r <= s) total += pair_term(r, s);
    }
    return total;
}

std::optional<std::uint32_t> SbmState::empty_block() const {
    if (empty_.empty()) return std::nullopt;
    return empty_.back();
}

void SbmState::set_nonempty(std::uint32_t r, bool nonempty) {
    auto remove = [](std::vector<std::uint32_t>& list, std::vector<std::size_t>& pos, std::uint32_t x) {
        const auto p = pos[x];
        list[p] = list.back();
        pos[list[p]] = p;
        list.pop_back();
    };
    if (nonempty) {
        remove(empty_, empty_pos_, r);
        nonempty_pos_[r] = nonempty_.size();
        nonempty_.push_back(r);
    } else {
        remove(nonempty_, nonempty_pos_, r);
        empty_pos_[r] = empty_.size();
        empty_.push_back(r);
    }
}

double SbmState::move(VertexId v, std::uint32_t to) {
    const std::uint32_t from = block_[v];
    if (from == to) return 0.0;
    const auto neighbors = graph_->neighbors(v);

    // Block pairs whose edge counts change: (from, t) and (to, t) for neighbour blocks t.
    touched_.clear();
    for (VertexId u : neighbors) touched_.push_back(block_[u]);
    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
    std::vector<std::uint64_t> keys;
    keys.reserve(2 * touched_.size());
    for (auto t : touched_) {
        for (auto x : {from, to}) {
            const auto lo = std::min(x, t);
            const auto hi = std::max(x, t);
            keys.push_back((static_cast<std::uint64_t>(lo) << 32) | hi);
        }
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    auto local_terms = [&] {
        double sum = block_term(from) + block_term(to) + global_term(nonempty_.size());
        for (auto key : keys) sum += pair_term(static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key));
        return sum;
    };

    const double before = local_terms();

    for (VertexId u : neighbors) {
        const auto t = block_[u];
        --pair(from, t);
        ++pair(to, t);
    }
    const auto k = static_cast<std::int64_t>(neighbors.size());
    degree_sum_[from] -= k;
    degree_sum_[to] += k;

    auto& src = members_[from];
    const auto p = member_pos_[v];
    src[p] = src.back();
    member_pos_[src[p]] = p;
    src.pop_back();
    if (members_[to].empty()) set_nonempty(to, true);
    member_pos_[v] = members_[to].size();
    members_[to].push_back(v);
    if (src.empty()) set_nonempty(from, false);
    block_[v] = to;

    const double delta = local_terms() - before;
    dl_ += delta;
    return delta;
}

Partition SbmState::partition() const {
    std::vector<std::int64_t> labels(block_.begin(), block_.end());
    return Partition::from_labels(labels);
}

namespace {

class MergeSplitSampler {
public:
    MergeSplitSampler(SbmState& state, const SbmConfig& config, Rng& rng, SbmFit& fit)
        : state_(state), config_(config), rng_(rng), fit_(fit), n_(state.graph().vertex_count()) {
        best_dl_ = state_.description_length();
        fit_.partition = state_.partition();
    }

    void sweep(bool greedy) {
        greedy_ = greedy;
        std::vector<VertexId> order(n_);
        std::iota(order.begin(), order.end(), VertexId{0});
        shuffle(order, rng_);
        for (VertexId v : order) single_move(v);
        for (int i = 0; i < config_.merge_attempts_per_sweep; ++i) merge();
        for (int i = 0; i < config_.split_attempts_per_sweep; ++i) split();
    }

    double best() const { return best_dl_; }

private:
    bool accept(double delta) {
        if (delta < 0) return true;
        if (greedy_) return false;
        return rng_.uniform() < std::exp(-config_.beta * delta);
    }

    void note_state() {
        if (state_.description_length() < best_dl_ - 1e-12) {
            best_dl_ = state_.description_length();
            fit_.partition = state_.partition();
        }
    }

    void single_move(VertexId v) {
        const auto& g = state_.graph();
        const auto from = state_.block_of(v);
        std::uint32_t to = from;
        if (g.degree(v) > 0 && rng_.uniform() < 0.75) {
            const auto nbrs = g.neighbors(v);
            to = state_.block_of(nbrs[rng_.below(nbrs.size())]);
        } else {
            const auto blocks = state_.nonempty_blocks();
            const auto fresh = state_.empty_block();
            const bool allow_new = fresh.has_value() && state_.block_size(from) > 1;
            const auto pick = rng_.below(blocks.size() + (allow_new ? 1 : 0));
            to = pick < blocks.size() ? blocks[pick] : *fresh;
        }
        if (to == from) return;
        ++fit_.single.proposed;
        const double delta = state_.move(v, to);
        if (accept(delta)) {
            ++fit_.single.accepted;
            note_state();
        } else {
            state_.move(v, from);
        }
    }

    void merge() {
        const auto blocks = state_.nonempty_blocks();
        if (blocks.size() < 2) return;
        const std::uint32_t r = blocks[rng_.below(blocks.size())];
        std::uint32_t s = r;
        const auto& g = state_.graph();
        const auto members = state_.members(r);
        const VertexId v = members[rng_.below(members.size())];
        if (g.degree(v) > 0) {
            const auto nbrs = g.neighbors(v);
            s = state_.block_of(nbrs[rng_.below(nbrs.size())]);
        }
        if (s == r) {
            const auto current = state_.nonempty_blocks();
            auto pick = rng_.below(current.size() - 1);
            s = current[pick];
            if (s == r) s = current[current.size() - 1];
        }

        ++fit_.merge.proposed;
        const std::vector<VertexId> moved(members.begin(), members.end());
        double delta = 0;
        for (VertexId u : moved) delta += state_.move(u, s);
        if (accept(delta)) {
            ++fit_.merge.accepted;
            note_state();
        } else {
            for (VertexId u : moved) state_.move(u, r);
        }
    }

    void split() {
        const auto fresh = state_.empty_block();
        if (!fresh) return;
        const auto blocks = state_.nonempty_blocks();
        const std::uint32_t r = blocks[rng_.below(blocks.size())];
        if (state_.block_size(r) < 2) return;
        const std::uint32_t s = *fresh;
        const auto& g = state_.graph();
        std::vector<VertexId> members(state_.members(r).begin(), state_.members(r).end());

        // Two random seeds, nearest-seed assignment by adjacency-row Hamming distance,
        // then one Lloyd step against the group centroids.
        const auto m = members.size();
        const VertexId c0 = members[rng_.below(m)];
        VertexId c1 = members[rng_.below(m - 1)];
        if (c1 == c0) c1 = members[m - 1];
        auto hamming = [&](VertexId a, VertexId b) {
            return static_cast<double>(g.degree(a) + g.degree(b)) - 2.0 * static_cast<double>(g.shared_partners(a, b));
        };
        std::vector<std::uint8_t> group(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            const double d0 = hamming(members[i], c0);
            const double d1 = hamming(members[i], c1);
            group[i] = d1 < d0 ? 1 : (d0 < d1 ? 0 : static_cast<std::uint8_t>(rng_.below(2)));
        }
        group[std::find(members.begin(), members.end(), c0) - members.begin()] = 0;
        group[std::find(members.begin(), members.end(), c1) - members.begin()] = 1;
        lloyd_step(members, group);
        const auto ones = std::count(group.begin(), group.end(), std::uint8_t{1});
        if (ones == 0 || ones == static_cast<std::ptrdiff_t>(m)) return;

        ++fit_.split.proposed;
        double delta = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (group[i] == 1) delta += state_.move(members[i], s);

        // One greedy refinement pass restricted to the two halves.
        shuffle(members, rng_);
        for (VertexId u : members) {
            const auto here = state_.block_of(u);
            const auto there = here == r ? s : r;
            if (state_.block_size(here) < 2) continue;
            const double d = state_.move(u, there);
            if (d < 0)
                delta += d;
            else
                state_.move(u, here);
        }

        if (accept(delta)) {
            ++fit_.split.accepted;
            note_state();
        } else {
            for (VertexId u : members) state_.move(u, r);
        }
    }

    void lloyd_step(const std::vector<VertexId>& members, std::vector<std::uint8_t>& group) {
        const auto& g = state_.graph();
        centroid_[0].assign(n_, 0.0);
        centroid_[1].assign(n_, 0.0);
        double size[2] = {0, 0};
        for (std::size_t i = 0; i < members.size(); ++i) {
            size[group[i]] += 1;
            for (VertexId j : g.neighbors(members[i])) centroid_[group[i]][j] += 1;
        }
        if (size[0] == 0 || size[1] == 0) return;
        double norm[2] = {0, 0};
        for (int c = 0; c < 2; ++c) {
            for (auto& x : centroid_[c]) {
                x /= size[c];
                norm[c] += x * x;
            }
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            double dist[2];
            for (int c = 0; c < 2; ++c) {
                double dot = 0;
                for (VertexId j : g.neighbors(members[i])) dot += centroid_[c][j];
                dist[c] = static_cast<double>(g.degree(members[i])) - 2 * dot + norm[c];
            }
            if (dist[0] != dist[1]) group[i] = dist[1] < dist[0] ? 1 : 0;
        }
    }

    SbmState& state_;
    const SbmConfig& config_;
    Rng& rng_;
    SbmFit& fit_;
    std::size_t n_;
    bool greedy_ = false;
    double best_dl_ = 0;
    std::vector<double> centroid_[2];
};

}  // namespace

SbmFit fit_sbm(const SimpleGraph& g, const SbmConfig& config) {
    if (config.n_sweeps <= 0) throw InputError("n_sweeps must be positive");
    if (g.vertex_count() == 0) throw InputError("cannot fit a block model to an empty vertex set");

    const Partition initial = config.initial ? *config.initial
                                             : Partition(std::vector<std::uint32_t>(g.vertex_count(), 0));
    SbmState state(g, initial);
    Rng rng(derive_key(config.seed, "sbm"));
    SbmFit fit;
    fit.sparse = g.edge_count() < g.vertex_count();
    MergeSplitSampler sampler(state, config, rng, fit);

    const int greedy_start = static_cast<int>(std::floor(config.greedy_after * config.n_sweeps));
    fit.trace.reserve(static_cast<std::size_t>(config.n_sweeps));
    for (int sweep = 0; sweep < config.n_sweeps; ++sweep) {
        sampler.sweep(sweep >= greedy_start);
        fit.trace.push_back(state.description_length());
    }
    fit.sweeps = config.n_sweeps;
    fit.description_length = description_length(g, fit.partition);
    return fit;
}

// ---------------------------------------------------------------------------
// Contingency-table counting and reduced mutual information.

namespace {

std::vector<std::int64_t> positive(std::span<const std::int64_t> margins) {
    std::vector<std::int64_t> out;
    for (auto m : margins) {
        if (m < 0) throw InputError("margins must be non-negative");
        if (m > 0) out.push_back(m);
    }
    return out;
}

void check_totals(std::span<const std::int64_t> rows, std::span<const std::int64_t> cols) {
    const auto sr = std::accumulate(rows.begin(), rows.end(), std::int64_t{0});
    const auto sc = std::accumulate(cols.begin(), cols.end(), std::int64_t{0});
    if (sr != sc) throw InputError("row and column margins have different totals");
}

// Counts tables row by row; the state is the vector of remaining column sums.
class TableCounter {
public:
    TableCounter(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols)
        : rows_(std::move(rows)), cols_(std::move(cols)) {}

    long double count() { return count_from(0, cols_); }

private:
    long double count_from(std::size_t row, const std::vector<std::int64_t>& remaining) {
        if (row + 1 == rows_.size()) return 1.0L;  // last row is forced
        auto key = std::pair{row, remaining};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        long double total = 0;
        std::vector<std::int64_t> next = remaining;
        enumerate(row, remaining, next, 0, rows_[row], total);
        memo_.emplace(std::move(key), total);
        return total;
    }

    void enumerate(std::size_t row, const std::vector<std::int64_t>& remaining, std::vector<std::int64_t>& next,
                   std::size_t col, std::int64_t left, long double& total) {
        if (col + 1 == remaining.size()) {
            if (left > remaining[col]) return;
            next[col] = remaining[col] - left;
            total += count_from(row + 1, next);
            return;
        }
        // Remaining columns after this one must be able to absorb what is left.
        std::int64_t capacity_after = 0;
        for (std::size_t c = col + 1; c < remaining.size(); ++c) capacity_after += remaining[c];
        const std::int64_t lo = std::max<std::int64_t>(0, left - capacity_after);
        const std::int64_t hi = std::min(left, remaining[col]);
        for (std::int64_t x = lo; x <= hi; ++x) {
            next[col] = remaining[col] - x;
            enumerate(row, remaining, next, col + 1, left - x, total);
        }
    }

    std::vector<std::int64_t> rows_;
    std::vector<std::int64_t> cols_;
    std::map<std::pair<std::size_t, std::vector<std::int64_t>>, long double> memo_;
};

double diaconis_efron(const std::vector<std::int64_t>& rows, const std::vector<std::int64_t>& cols) {
    const double m = static_cast<double>(rows.size());
    const double k = static_cast<double>(cols.size());
    const double n = static_cast<double>(std::accumulate(rows.begin(), rows.end(), std::int64_t{0}));
    const double w = n / (n + 0.5 * m * k);
    double sum_log_r = 0, sum_sq_r = 0, sum_log_c = 0;
    for (auto r : rows) {
        const double x = (1.0 - w) / m + w * static_cast<double>(r) / n;
        sum_log_r += std::log(x);
        sum_sq_r += x * x;
    }
    for (auto c : cols) sum_log_c += std::log((1.0 - w) / k + w * static_cast<double>(c) / n);
    const double shape = (k + 1.0) / (k * sum_sq_r) - 1.0 / k;
    return (m - 1.0) * (k - 1.0) * std::log(n + 0.5 * m * k) + (k - 1.0) * sum_log_r + (shape - 1.0) * sum_log_c +
           boost::math::lgamma(k * shape) - m * boost::math::lgamma(k) - k * boost::math::lgamma(shape);
}

bool exact_eligible(const std::vector<std::int64_t>& rows, const std::vector<std::int64_t>& cols) {
    const auto n = std::accumulate(rows.begin(), rows.end(), std::int64_t{0});
    return rows.size() * cols.size() <= 12 && n <= 200;
}

}  // namespace

double log_omega_exact(std::span<const std::int64_t> rows_in, std::span<const std::int64_t> cols_in) {
    check_totals(rows_in, cols_in);
    auto rows = positive(rows_in);
    auto cols = positive(cols_in);
    if (rows.size() <= 1 || cols.size() <= 1) return 0.0;
    // Keep the state (remaining column sums) short.
    if (cols.size() > rows.size()) std::swap(rows, cols);
    std::sort(rows.begin(), rows.end(), std::greater<>());
    TableCounter counter(std::move(cols), std::move(rows));
    return static_cast<double>(std::log(counter.count()));
}

double log_omega_approx(std::span<const std::int64_t> rows_in, std::span<const std::int64_t> cols_in) {
    check_totals(rows_in, cols_in);
    const auto rows = positive(rows_in);
    const auto cols = positive(cols_in);
    if (rows.size() <= 1 || cols.size() <= 1) return 0.0;
    return 0.5 * (diaconis_efron(rows, cols) + diaconis_efron(cols, rows));
}

double log_omega(std::span<const std::int64_t> rows_in, std::span<const std::int64_t> cols_in) {
    check_totals(rows_in, cols_in);
    const auto rows = positive(rows_in);
    const auto cols = positive(cols_in);
    if (rows.size() <= 1 || cols.size() <= 1) return 0.0;
    return exact_eligible(rows, cols) ? log_omega_exact(rows, cols) : log_omega_approx(rows, cols);
}

namespace {

double reduced_mi(const Partition& p1, const Partition& p2) {
    const auto n = static_cast<std::int64_t>(p1.vertex_count());
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::int64_t> table;
    for (std::size_t v = 0; v < p1.vertex_count(); ++v) ++table[{p1[v], p2[v]}];
    std::vector<std::int64_t> a(p1.block_count(), 0), b(p2.block_count(), 0);
    for (std::size_t v = 0; v < p1.vertex_count(); ++v) {
        ++a[p1[v]];
        ++b[p2[v]];
    }
    double value = log_factorial(n);
    for (const auto& [_, count] : table) value += log_factorial(count);
    for (auto x : a) value -= log_factorial(x);
    for (auto x : b) value -= log_factorial(x);
    value -= log_omega(a, b);
    return value / static_cast<double>(n);
}

bool same_up_to_relabeling(const Partition& p1, const Partition& p2) {
    if (p1.block_count() != p2.block_count()) return false;
    std::vector<std::int64_t> map(p1.block_count(), -1);
    for (std::size_t v = 0; v < p1.vertex_count(); ++v) {
        auto& target = map[p1[v]];
        if (target < 0) target = p2[v];
        if (target != static_cast<std::int64_t>(p2[v])) return false;
    }
    return true;
}

}  // namespace

RmiResult rmi(const Partition& p1, const Partition& p2) {
    if (p1.vertex_count() != p2.vertex_count()) throw InputError("partitions cover different vertex sets");
    if (p1.vertex_count() == 0) throw InputError("partitions are empty");
    RmiResult out;
    out.raw = reduced_mi(p1, p2);
    if (same_up_to_relabeling(p1, p2)) {
        out.normalized = 1.0;
        return out;
    }
    const double denom = 0.5 * (reduced_mi(p1, p1) + reduced_mi(p2, p2));
    out.normalized = denom > 0 ? out.raw / denom : 0.0;
    return out;
}

}  // namespace stratanet
