#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stratanet/timeutil.hpp"
#include "stratanet/types.hpp"

namespace stratanet {

enum class Binning { HourOfWeek, WeekOfYear };

constexpr std::size_t bin_count(Binning b) { return b == Binning::HourOfWeek ? 168 : 53; }

struct ActivityProfile {
    Binning binning = Binning::HourOfWeek;
    std::vector<std::int64_t> counts;
    /// Fractions per bin; absent when no event was counted.
    std::optional<std::vector<double>> normalized;

    std::int64_t total() const;
};

/// Pools every selected event (all kinds) into local-time bins. HourOfWeek bin 0 is
/// Monday 00:00-00:59 local; WeekOfYear bin w-1 holds ISO week w.
ActivityProfile activity_profile(std::span<const Event> events, Binning binning, const TimeZone& tz,
                                 const std::function<bool(const Event&)>& selector = {});

inline constexpr std::size_t kDefaultMinEvents = 10;

struct BurstinessRecord {
    std::string account_id;
    std::size_t n_events = 0;
    double mean_gap = 0;  // seconds
    double sd_gap = 0;    // population standard deviation, seconds
    double coefficient = 0;
};

/// (sigma - mu) / (sigma + mu) of the gaps with population moments. Absent when fewer
/// than `min_events` events (gaps + 1) are given or every gap is zero.
std::optional<BurstinessRecord> burstiness_from_gaps(std::span<const double> gaps,
                                                     std::size_t min_events = kDefaultMinEvents);

/// Same, from ascending event times. Throws InputError on unsorted input.
std::optional<BurstinessRecord> burstiness(std::span<const Timestamp> times,
                                           std::size_t min_events = kDefaultMinEvents);

/// One record per account (sorted by account id) that has at least `min_events` events.
std::vector<BurstinessRecord> burstiness_by_account(std::span<const Event> events,
                                                    std::size_t min_events = kDefaultMinEvents);

/// CDF of the studentized range statistic for `groups` means and `df` error degrees of
/// freedom (df <= 0 means infinite).
double studentized_range_cdf(double q, int groups, double df);
/// Inverse of studentized_range_cdf, accurate to 1e-6 or better.
double studentized_range_quantile(double p, int groups, double df);

struct HsdRow {
    std::string group1;
    std::string group2;
    double mean_diff = 0;  // mean(group1) - mean(group2)
    double ci_low = 0;
    double ci_high = 0;
    double p_adj = 0;
};

using NamedSample = std::pair<std::string, std::vector<double>>;

/// Tukey-Kramer honestly significant differences for every unordered pair (i < j in
/// input order). Throws InputError for fewer than two groups or a group with < 2 values.
std::vector<HsdRow> tukey_hsd(std::span<const NamedSample> groups, double confidence = 0.95);

struct MeanDifference {
    double diff = 0;  // mean(a) - mean(b)
    double ci_low = 0;
    double ci_high = 0;
    double mean_a = 0;
    std::size_t n = 0;  // n_a + n_b
};

/// Difference of means with a normal-approximation interval on unpooled variances.
/// Throws DegenerateError when either sample has fewer than two values.
MeanDifference group_mean_difference(std::span<const double> a, std::span<const double> b,
                                     double confidence = 0.95);

}  // namespace stratanet
