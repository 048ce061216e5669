#include "stratanet/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace stratanet {
namespace {

using namespace std::chrono;

std::size_t iso_week_index(sys_days d) {
    const weekday wd{d};
    const sys_days thursday = d - days{static_cast<int>(wd.iso_encoding()) - 1} + days{3};
    const year y = year_month_day{thursday}.year();
    const sys_days jan1{y / January / 1};
    return static_cast<std::size_t>((thursday - jan1).count() / 7);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Probability that the range of `k` iid standard normals is below w.
double normal_range_cdf(double w, int k) {
    if (w <= 0) return 0.0;
    auto integrand = [w, k](double z) {
        const double inner = std_normal_cdf(z) - std_normal_cdf(z - w);
        if (inner <= 0) return 0.0;
        return kInvSqrt2Pi * std::exp(-0.5 * z * z) * std::pow(inner, k - 1);
    };
    using boost::math::quadrature::gauss_kronrod;
    const double value = gauss_kronrod<double, 31>::integrate(integrand, -8.5, 8.5 + w, 4, 1e-9);
    return std::clamp(k * value, 0.0, 1.0);
}

}  // namespace

std::int64_t ActivityProfile::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

ActivityProfile activity_profile(std::span<const Event> events, Binning binning, const TimeZone& tz,
                                 const std::function<bool(const Event&)>& selector) {
    ActivityProfile profile;
    profile.binning = binning;
    profile.counts.assign(bin_count(binning), 0);
    for (const auto& e : events) {
        if (selector && !selector(e)) continue;
        const local_seconds local = tz.to_local(e.timestamp);
        const sys_days day{floor<days>(local).time_since_epoch()};
        std::size_t bin = 0;
        if (binning == Binning::HourOfWeek) {
            const auto wd = weekday{day}.iso_encoding() - 1;
            const auto hour = floor<hours>(local - floor<days>(local)).count();
            bin = wd * 24 + static_cast<std::size_t>(hour);
        } else {
            bin = iso_week_index(day);
        }
        ++profile.counts[bin];
    }
    const auto total = profile.total();
    if (total > 0) {
        std::vector<double> fractions(profile.counts.size());
        for (std::size_t i = 0; i < fractions.size(); ++i)
            fractions[i] = static_cast<double>(profile.counts[i]) / static_cast<double>(total);
        profile.normalized = std::move(fractions);
    }
    return profile;
}

std::optional<BurstinessRecord> burstiness_from_gaps(std::span<const double> gaps, std::size_t min_events) {
    if (gaps.size() + 1 < std::max<std::size_t>(min_events, 2)) return std::nullopt;
    const double n = static_cast<double>(gaps.size());
    const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / n;
    double ss = 0;
    for (double g : gaps) ss += (g - mean) * (g - mean);
    const double sd = std::sqrt(ss / n);
    if (sd + mean <= 0) return std::nullopt;

    BurstinessRecord r;
    r.n_events = gaps.size() + 1;
    r.mean_gap = mean;
    r.sd_gap = sd;
    r.coefficient = (sd - mean) / (sd + mean);
    return r;
}

std::optional<BurstinessRecord> burstiness(std::span<const Timestamp> times, std::size_t min_events) {
    if (!std::is_sorted(times.begin(), times.end())) throw InputError("event times must be ascending");
    if (times.size() < 2) return std::nullopt;
    std::vector<double> gaps(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i)
        gaps[i - 1] = static_cast<double>((times[i] - times[i - 1]).count());
    return burstiness_from_gaps(gaps, min_events);
}

std::vector<BurstinessRecord> burstiness_by_account(std::span<const Event> events, std::size_t min_events) {
    std::map<std::string, std::vector<Timestamp>> by_account;
    for (const auto& e : events) by_account[e.account_id].push_back(e.timestamp);
    std::vector<BurstinessRecord> out;
    for (auto& [account, times] : by_account) {
        std::sort(times.begin(), times.end());
        if (auto r = burstiness(times, min_events)) {
            r->account_id = account;
            out.push_back(std::move(*r));
        }
    }
    return out;
}

double studentized_range_cdf(double q, int groups, double df) {
    if (groups < 2) throw InputError("studentized range needs at least two groups");
    if (q <= 0) return 0.0;
    if (df <= 0 || df > 25000) return normal_range_cdf(q, groups);

    // Average the normal-range CDF over s = sqrt(chi2_df / df).
    const boost::math::chi_squared chi(df);
    const double s_lo = std::sqrt(boost::math::quantile(chi, 1e-15) / df);
    const double s_hi = std::sqrt(boost::math::quantile(boost::math::complement(chi, 1e-15)) / df);
    const double log_norm = 0.5 * df * std::log(df) - std::lgamma(0.5 * df) - (0.5 * df - 1.0) * std::log(2.0);
    auto integrand = [&](double s) {
        if (s <= 0) return 0.0;
        const double log_density = log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s;
        return std::exp(log_density) * normal_range_cdf(q * s, groups);
    };
    using boost::math::quadrature::gauss_kronrod;
    const double value = gauss_kronrod<double, 31>::integrate(integrand, s_lo, s_hi, 5, 1e-9);
    return std::clamp(value, 0.0, 1.0);
}

double studentized_range_quantile(double p, int groups, double df) {
    if (!(p > 0 && p < 1)) throw InputError("quantile probability must lie in (0, 1)");
    double hi = 8.0;
    while (studentized_range_cdf(hi, groups, df) < p) hi *= 2;
    auto f = [&](double q) { return studentized_range_cdf(q, groups, df) - p; };
    std::uintmax_t iterations = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-10; };
    const auto [lo_q, hi_q] = boost::math::tools::toms748_solve(f, 1e-9, hi, tol, iterations);
    return 0.5 * (lo_q + hi_q);
}

std::vector<HsdRow> tukey_hsd(std::span<const NamedSample> groups, double confidence) {
    if (groups.size() < 2) throw InputError("Tukey HSD needs at least two groups");
    if (!(confidence > 0 && confidence < 1)) throw InputError("confidence must lie in (0, 1)");

    std::vector<double> means;
    std::size_t total_n = 0;
    double ss_within = 0;
    for (const auto& [label, values] : groups) {
        if (values.size() < 2) throw InputError("group '" + label + "' has fewer than two values");
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
        for (double v : values) ss_within += (v - mean) * (v - mean);
        means.push_back(mean);
        total_n += values.size();
    }
    const int k = static_cast<int>(groups.size());
    const double df = static_cast<double>(total_n - groups.size());
    const double mse = ss_within / df;
    const double q_crit = studentized_range_quantile(confidence, k, df);

    std::vector<HsdRow> rows;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const double ni = static_cast<double>(groups[i].second.size());
            const double nj = static_cast<double>(groups[j].second.size());
            const double se = std::sqrt(0.5 * mse * (1.0 / ni + 1.0 / nj));
            HsdRow row;
            row.group1 = groups[i].first;
            row.group2 = groups[j].first;
            row.mean_diff = means[i] - means[j];
            row.ci_low = row.mean_diff - q_crit * se;
            row.ci_high = row.mean_diff + q_crit * se;
            if (se > 0)
                row.p_adj = 1.0 - studentized_range_cdf(std::abs(row.mean_diff) / se, k, df);
            else
                row.p_adj = row.mean_diff == 0 ? 1.0 : 0.0;
            row.p_adj = std::clamp(row.p_adj, 0.0, 1.0);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

MeanDifference group_mean_difference(std::span<const double> a, std::span<const double> b, double confidence) {
    if (a.size() < 2 || b.size() < 2) throw DegenerateError("difference of means needs at least two values per group");
    auto moments = [](std::span<const double> xs) {
        const double n = static_cast<double>(xs.size());
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        double ss = 0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        return std::pair{mean, ss / (n - 1.0)};
    };
    const auto [mean_a, var_a] = moments(a);
    const auto [mean_b, var_b] = moments(b);
    const double se = std::sqrt(var_a / static_cast<double>(a.size()) + var_b / static_cast<double>(b.size()));
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + 0.5 * confidence);

    MeanDifference out;
    out.diff = mean_a - mean_b;
    out.ci_low = out.diff - z * se;
    out.ci_high = out.diff + z * se;
    out.mean_a = mean_a;
    out.n = a.size() + b.size();
    return out;
}

}  // namespace stratanet
