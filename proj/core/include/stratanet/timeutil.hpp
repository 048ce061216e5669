#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "stratanet/types.hpp"

namespace stratanet {

/// Parses ISO-8601 "YYYY-MM-DDTHH:MM:SS" with a trailing "Z", "+HH:MM" / "-HH:MM"
/// offset, or no designator (read as UTC). A space may replace the "T" and
/// fractional seconds are truncated. Throws InputError on malformed input.
Timestamp parse_iso8601(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

/// Civil-time zone used for activity binning. Only rule-based zones are supported:
/// UTC, fixed offsets ("+02:00", "UTC+3", ...) and the EU daylight-saving zones
/// listed in the README (Europe/Helsinki being the default).
class TimeZone {
public:
    static TimeZone utc() { return TimeZone(std::chrono::seconds{0}, false, "UTC"); }
    static TimeZone helsinki();
    /// Throws InputError for unsupported names.
    static TimeZone named(std::string_view name);

    /// UTC offset in effect at instant t.
    std::chrono::seconds offset(Timestamp t) const;
    /// Local wall-clock time at t, expressed as seconds since the local epoch.
    std::chrono::local_seconds to_local(Timestamp t) const;
    const std::string& name() const { return name_; }

private:
    TimeZone(std::chrono::seconds standard, bool eu_dst, std::string name)
        : standard_(standard), eu_dst_(eu_dst), name_(std::move(name)) {}

    std::chrono::seconds standard_;
    bool eu_dst_;
    std::string name_;
};

}  // namespace stratanet
