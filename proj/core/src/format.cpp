#include "stratanet/format.hpp"

#include <fmt/format.h>

namespace stratanet {

std::string fmt_double(double value) { return fmt::format("{}", value); }

std::string fmt_double(const std::optional<double>& value) { return value ? fmt_double(*value) : std::string(); }

}  // namespace stratanet
