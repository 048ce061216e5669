#include "stratanet/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <utility>

namespace stratanet {
namespace {

using namespace std::chrono;

int digits(std::string_view text, std::size_t pos, std::size_t count) {
    if (pos + count > text.size()) throw InputError("malformed timestamp '" + std::string(text) + "'");
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + count, value);
    if (ec != std::errc{} || ptr != text.data() + pos + count)
        throw InputError("malformed timestamp '" + std::string(text) + "'");
    return value;
}

void expect(std::string_view text, std::size_t pos, std::string_view allowed) {
    if (pos >= text.size() || allowed.find(text[pos]) == std::string_view::npos)
        throw InputError("malformed timestamp '" + std::string(text) + "'");
}

// Last Sunday of `m` in year `y`, at 01:00 UTC (EU transition instant).
sys_seconds eu_transition(year y, month m) {
    const sys_days day{y / m / Sunday[std::chrono::last]};
    return sys_seconds{day} + hours{1};
}

struct ZoneSpec {
    std::string_view name;
    int standard_hours;
};

// EU-rule zones (transitions at 01:00 UTC on the last Sundays of March and October).
constexpr std::array<ZoneSpec, 12> kEuZones{{{"Europe/Helsinki", 2},
                                             {"Europe/Tallinn", 2},
                                             {"Europe/Riga", 2},
                                             {"Europe/Vilnius", 2},
                                             {"Europe/Athens", 2},
                                             {"Europe/Stockholm", 1},
                                             {"Europe/Berlin", 1},
                                             {"Europe/Paris", 1},
                                             {"Europe/Copenhagen", 1},
                                             {"Europe/Oslo", 1},
                                             {"Europe/London", 0},
                                             {"Europe/Dublin", 0}}};

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);

    const int y = digits(text, 0, 4);
    expect(text, 4, "-");
    const int mo = digits(text, 5, 2);
    expect(text, 7, "-");
    const int d = digits(text, 8, 2);
    expect(text, 10, "T ");
    const int hh = digits(text, 11, 2);
    expect(text, 13, ":");
    const int mm = digits(text, 14, 2);
    expect(text, 16, ":");
    const int ss = digits(text, 17, 2);

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }

    seconds offset{0};
    if (pos < text.size()) {
        if (text[pos] == 'Z' || text[pos] == 'z') {
            ++pos;
        } else if (text[pos] == '+' || text[pos] == '-') {
            const int sign = text[pos] == '-' ? -1 : 1;
            const int oh = digits(text, pos + 1, 2);
            std::size_t next = pos + 3;
            if (next < text.size() && text[next] == ':') ++next;
            const int om = digits(text, next, 2);
            offset = seconds{sign * (oh * 3600 + om * 60)};
            pos = next + 2;
        }
    }
    if (pos != text.size()) throw InputError("malformed timestamp '" + std::string(text) + "'");

    const year_month_day date{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!date.ok() || hh > 23 || mm > 59 || ss > 60)
        throw InputError("invalid date/time in timestamp '" + std::string(text) + "'");
    return sys_days{date} + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::string format_iso8601(Timestamp t) {
    const auto day_point = floor<days>(t);
    const year_month_day date{day_point};
    const hh_mm_ss tod{t - day_point};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return buf;
}

TimeZone TimeZone::helsinki() { return TimeZone(hours{2}, true, "Europe/Helsinki"); }

TimeZone TimeZone::named(std::string_view name) {
    if (name == "UTC" || name == "Etc/UTC" || name == "Z") return utc();
    for (const auto& zone : kEuZones)
        if (zone.name == name) return TimeZone(hours{zone.standard_hours}, true, std::string(name));

    std::string_view body = name;
    if (body.starts_with("UTC")) body.remove_prefix(3);
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
        const int sign = body[0] == '-' ? -1 : 1;
        body.remove_prefix(1);
        int h = 0, m = 0;
        auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), h);
        if (ec == std::errc{} && h <= 14) {
            std::string_view rest(p, static_cast<std::size_t>(body.data() + body.size() - p));
            bool ok = rest.empty();
            if (!ok && rest[0] == ':') {
                auto [q, ec2] = std::from_chars(rest.data() + 1, rest.data() + rest.size(), m);
                ok = ec2 == std::errc{} && q == rest.data() + rest.size() && m < 60;
            }
            if (ok) return TimeZone(seconds{sign * (h * 3600 + m * 60)}, false, std::string(name));
        }
    }
    throw InputError("unsupported time zone '" + std::string(name) + "'");
}

seconds TimeZone::offset(Timestamp t) const {
    if (!eu_dst_) return standard_;
    const year y = year_month_day{floor<days>(t)}.year();
    const bool summer = t >= eu_transition(y, March) && t < eu_transition(y, October);
    return summer ? standard_ + hours{1} : standard_;
}

local_seconds TimeZone::to_local(Timestamp t) const {
    return local_seconds{t.time_since_epoch() + offset(t)};
}

}  // namespace stratanet
