#include "stratanet/csv.hpp"

#include "stratanet/types.hpp"

namespace stratanet::csv {

std::vector<std::string> Reader::header() {
    std::vector<std::string> fields;
    if (!next(fields)) throw InputError("empty input: missing header row");
    for (auto& f : fields) {
        // Strip a UTF-8 byte-order mark and surrounding blanks from column names.
        if (f.starts_with("\xEF\xBB\xBF")) f.erase(0, 3);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(0, 1);
    }
    return fields;
}

bool Reader::next(std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c = 0;

    while (true) {
        c = in_.get();
        if (c == std::char_traits<char>::eof()) break;
        if (!any) {
            if (c == '\n') {
                ++current_line_;
                continue;
            }
            if (c == '\r') continue;
            any = true;
            record_line_ = current_line_;
        }
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in_.peek() == '"') {
                    field.push_back('"');
                    in_.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++current_line_;
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"' && field.empty()) {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            ++current_line_;
            break;
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    if (!any) return false;
    if (in_quotes) throw InputError("line " + std::to_string(record_line_) + ": unterminated quoted field");
    fields.push_back(std::move(field));
    return true;
}

std::size_t column(const std::vector<std::string>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw InputError("missing column '" + std::string(name) + "'");
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace stratanet::csv
