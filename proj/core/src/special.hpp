#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace stratanet::detail {

/// log(n!) with a precomputed table for small n.
inline double log_factorial(std::int64_t n) {
    constexpr std::int64_t kTable = 1 << 16;
    static const std::vector<double> table = [] {
        std::vector<double> t(kTable);
        t[0] = 0.0;
        for (std::int64_t i = 1; i < kTable; ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
        return t;
    }();
    if (n < 0) return 0.0;
    if (n < kTable) return table[static_cast<std::size_t>(n)];
    return boost::math::lgamma(static_cast<double>(n) + 1.0);
}

/// log C(n, k); 0 for out-of-range k.
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0.0;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// log of the multiset coefficient ((n multichoose k)) = log C(n + k - 1, k).
inline double log_multiset(std::int64_t n, std::int64_t k) {
    if (k == 0) return 0.0;
    if (n <= 0) return 0.0;
    return log_binomial(n + k - 1, k);
}

}  // namespace stratanet::detail
