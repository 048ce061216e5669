#pragma once

#include <optional>
#include <string>

namespace stratanet {

/// Shortest decimal text that round-trips to the same double ("nan"/"inf" for
/// non-finite values). Used for every floating-point field in reports.
std::string fmt_double(double value);
/// Empty string for an absent value.
std::string fmt_double(const std::optional<double>& value);

}  // namespace stratanet
