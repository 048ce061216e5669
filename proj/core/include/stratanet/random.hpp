#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace stratanet {

/// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). The output for a given (key, counter) is fixed forever;
/// every stream in this library is defined in terms of it, so ensembles are
/// reproducible across releases and platforms.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key);
};

/// Version tag of the stream definition below; bump only with a changelog entry.
inline constexpr std::string_view kRngStreamVersion = "philox4x32-10/v1";

/// A stream of 32-bit words: key = 64-bit stream id, counter = (block index, stream index).
/// The distributions are implemented here rather than with <random> adaptors, whose
/// algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t key = 0, std::uint64_t stream = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer on [0, bound), unbiased (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound);
    double normal();
    double exponential(double rate = 1.0);
    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t key() const { return key_; }
    std::uint64_t stream() const { return stream_; }

    // UniformRandomBitGenerator interface, for std::shuffle-style helpers.
    using result_type = std::uint32_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xffffffffu; }
    result_type operator()() { return next_u32(); }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    unsigned used_ = 4;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Stream id for a labelled consumer ("bootstrap", "sbm/org_main", ...) under a master seed.
/// Different labels give unrelated ids; adding a label never changes another label's id.
std::uint64_t derive_key(std::uint64_t master_seed, std::string_view label);

/// In-place Fisher-Yates shuffle driven by `rng`.
template <typename Range>
void shuffle(Range& range, Rng& rng) {
    const auto n = static_cast<std::uint64_t>(range.size());
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = rng.below(i);
        using std::swap;
        swap(range[i - 1], range[j]);
    }
}

}  // namespace stratanet
