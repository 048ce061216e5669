#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace stratanet::csv {

/// RFC 4180 reader: comma separated, double-quoted fields may contain commas,
/// doubled quotes and line breaks. Blank lines are skipped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the first record; throws InputError on an empty stream.
    std::vector<std::string> header();
    /// Reads the next record into `fields`. Returns false at end of input.
    bool next(std::vector<std::string>& fields);
    /// 1-based line number where the last record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t current_line_ = 1;
    std::size_t record_line_ = 0;
};

/// Index of `name` in `header`; throws InputError if absent.
std::size_t column(const std::vector<std::string>& header, std::string_view name);

/// Quotes a field only when it contains a delimiter, quote or line break.
std::string quote(std::string_view field);

}  // namespace stratanet::csv
