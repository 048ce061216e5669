#include "stratanet/ingest.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "stratanet/csv.hpp"
#include "stratanet/timeutil.hpp"

namespace stratanet {
namespace {

std::string at_line(std::size_t line, const std::string& message) {
    return "line " + std::to_string(line) + ": " + message;
}

Event make_event(std::string account, std::string target, std::string_view timestamp, std::string_view kind,
                 std::optional<std::string> text, std::size_t line) {
    Event e;
    if (account.empty()) throw InputError(at_line(line, "empty account_id"));
    e.account_id = std::move(account);
    if (!target.empty()) e.target_account_id = std::move(target);
    try {
        e.timestamp = parse_iso8601(timestamp);
        e.kind = parse_event_kind(kind);
    } catch (const InputError& err) {
        throw InputError(at_line(line, err.what()));
    }
    if (e.kind == EventKind::Retweet && !e.target_account_id)
        throw InputError(at_line(line, "retweet without target_account_id"));
    e.text = std::move(text);
    return e;
}

std::vector<Event> parse_events_csv(std::istream& in) {
    csv::Reader reader(in);
    const auto header = reader.header();
    const auto c_account = csv::column(header, "account_id");
    const auto c_target = csv::column(header, "target_account_id");
    const auto c_time = csv::column(header, "timestamp");
    const auto c_kind = csv::column(header, "kind");
    std::optional<std::size_t> c_text;
    if (std::find(header.begin(), header.end(), "text") != header.end()) c_text = csv::column(header, "text");

    std::vector<Event> events;
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() != header.size())
            throw InputError(at_line(reader.line(), "expected " + std::to_string(header.size()) + " fields, got " +
                                                        std::to_string(row.size())));
        std::optional<std::string> text;
        if (c_text && !row[*c_text].empty()) text = row[*c_text];
        events.push_back(make_event(std::move(row[c_account]), std::move(row[c_target]), row[c_time], row[c_kind],
                                    std::move(text), reader.line()));
    }
    return events;
}

std::vector<Event> parse_events_jsonl(std::istream& in) {
    std::vector<Event> events;
    std::string line;
    std::size_t line_no = 0;
    auto field = [&](const nlohmann::json& obj, const char* key, bool required) -> std::string {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) {
            if (required) throw InputError(at_line(line_no, std::string("missing field '") + key + "'"));
            return {};
        }
        if (!it->is_string()) throw InputError(at_line(line_no, std::string("field '") + key + "' must be a string"));
        return it->get<std::string>();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& err) {
            throw InputError(at_line(line_no, std::string("invalid JSON: ") + err.what()));
        }
        if (!obj.is_object()) throw InputError(at_line(line_no, "expected a JSON object"));
        std::optional<std::string> text;
        if (auto t = field(obj, "text", false); !t.empty()) text = std::move(t);
        events.push_back(make_event(field(obj, "account_id", true), field(obj, "target_account_id", false),
                                    field(obj, "timestamp", true), field(obj, "kind", true), std::move(text), line_no));
    }
    return events;
}

bool contains_keyword(const std::optional<std::string>& text, const std::vector<std::string>& folded_keywords) {
    if (folded_keywords.empty()) return true;
    if (!text) return false;
    const std::string folded = fold_case(*text);
    return std::any_of(folded_keywords.begin(), folded_keywords.end(),
                       [&](const std::string& k) { return folded.find(k) != std::string::npos; });
}

}  // namespace

std::vector<Event> parse_events(std::istream& in, EventFormat format) {
    return format == EventFormat::Jsonl ? parse_events_jsonl(in) : parse_events_csv(in);
}

EventFormat event_format_for(std::string_view path) {
    return (path.ends_with(".jsonl") || path.ends_with(".ndjson")) ? EventFormat::Jsonl : EventFormat::Csv;
}

Roster parse_roster(std::istream& in) {
    csv::Reader reader(in);
    const auto header = reader.header();
    const auto c_account = csv::column(header, "account_id");
    const auto c_org = csv::column(header, "organization_id");
    const auto c_level = csv::column(header, "level");
    const auto c_sector = csv::column(header, "sector");
    const auto c_type = csv::column(header, "org_type");

    std::vector<RosterEntry> entries;
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() != header.size())
            throw InputError(at_line(reader.line(), "expected " + std::to_string(header.size()) + " fields"));
        try {
            entries.push_back({row[c_account], row[c_org], parse_level(row[c_level]), parse_sector(row[c_sector]),
                               parse_org_type(row[c_type])});
        } catch (const InputError& err) {
            throw InputError(at_line(reader.line(), err.what()));
        }
    }
    return Roster(std::move(entries));
}

std::vector<std::string> parse_keywords(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    }
    return out;
}

std::vector<Event> merge_event_streams(std::vector<std::vector<Event>> files) {
    struct Keyed {
        Timestamp time;
        std::size_t file;
        std::size_t pos;
    };
    std::vector<Keyed> order;
    for (std::size_t f = 0; f < files.size(); ++f)
        for (std::size_t i = 0; i < files[f].size(); ++i) order.push_back({files[f][i].timestamp, f, i});
    std::sort(order.begin(), order.end(), [](const Keyed& a, const Keyed& b) {
        return std::tie(a.time, a.file, a.pos) < std::tie(b.time, b.file, b.pos);
    });
    std::vector<Event> out;
    out.reserve(order.size());
    for (const auto& k : order) out.push_back(std::move(files[k.file][k.pos]));
    return out;
}

std::string fold_case(std::string_view text) {
    std::string out(text);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto c = static_cast<unsigned char>(out[i]);
        if (c >= 'A' && c <= 'Z') {
            out[i] = static_cast<char>(c + 32);
        } else if (c == 0xC3 && i + 1 < out.size()) {
            auto next = static_cast<unsigned char>(out[i + 1]);
            // U+00C0..U+00DE uppercase letters, excluding U+00D7 (multiplication sign).
            if (next >= 0x80 && next <= 0x9E && next != 0x97) out[i + 1] = static_cast<char>(next + 0x20);
            ++i;
        }
    }
    return out;
}

void FilterSpec::validate() const {
    if (!(start < end)) throw InputError("filter window start must precede end");
}

std::uint64_t FilterSpec::keyword_hash() const {
    std::vector<std::string> folded;
    for (const auto& k : keywords) folded.push_back(fold_case(k));
    std::sort(folded.begin(), folded.end());
    folded.erase(std::unique(folded.begin(), folded.end()), folded.end());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& k : folded) {
        for (unsigned char c : k) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

FilterSpec unbounded_filter() {
    FilterSpec spec;
    spec.start = Timestamp{std::chrono::seconds{std::numeric_limits<std::int64_t>::min() / 2}};
    spec.end = Timestamp{std::chrono::seconds{std::numeric_limits<std::int64_t>::max() / 2}};
    return spec;
}

std::vector<Event> filter_events(const std::vector<Event>& events, const FilterSpec& spec, const Roster& roster) {
    spec.validate();
    std::vector<std::string> folded;
    for (const auto& k : spec.keywords)
        if (!k.empty()) folded.push_back(fold_case(k));

    std::vector<Event> out;
    for (const auto& e : events) {
        if (!spec.kinds.contains(e.kind)) continue;
        if (e.timestamp < spec.start || !(e.timestamp < spec.end)) continue;
        if (!contains_keyword(e.text, folded)) continue;
        if (spec.roster_only) {
            if (!roster.contains(e.account_id)) continue;
            if (e.target_account_id && !roster.contains(*e.target_account_id)) continue;
        }
        out.push_back(e);
    }
    return out;
}

WeightedDigraph build_account_graph(const std::vector<Event>& events, const Roster& roster,
                                    std::optional<Level> level, GraphMetadata metadata) {
    GraphBuilder builder;
    for (const auto& entry : roster.entries())
        if (!level || entry.level == *level) builder.add_vertex(entry.account_id);

    for (const auto& e : events) {
        if (e.kind != EventKind::Retweet) continue;
        const RosterEntry& src = roster.at(e.account_id);
        const RosterEntry& dst = roster.at(*e.target_account_id);
        if (level && (src.level != *level || dst.level != *level)) continue;
        builder.add_edge(src.account_id, dst.account_id, 1);
    }
    metadata.level = level;
    return std::move(builder).build(std::move(metadata));
}

CollapsedGraph collapse(const WeightedDigraph& backboned, const Roster& roster) {
    CollapsedGraph out;
    out.organizations = roster.organizations();
    std::vector<std::size_t> org_of(backboned.vertex_count());
    for (VertexId v = 0; v < backboned.vertex_count(); ++v)
        org_of[v] = roster.organization_index(roster.at(backboned.name(v)).organization_id);

    for (const auto& e : backboned.edges()) {
        auto a = static_cast<VertexId>(org_of[e.src]);
        auto b = static_cast<VertexId>(org_of[e.dst]);
        if (a == b) continue;
        out.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    return out;
}

void write_events_csv(std::ostream& out, const std::vector<Event>& events) {
    out << "account_id,target_account_id,timestamp,kind,text\n";
    for (const auto& e : events)
        out << csv::quote(e.account_id) << ',' << csv::quote(e.target_account_id.value_or("")) << ','
            << format_iso8601(e.timestamp) << ',' << to_string(e.kind) << ',' << csv::quote(e.text.value_or(""))
            << '\n';
}

void write_roster_csv(std::ostream& out, const Roster& roster) {
    out << "account_id,organization_id,level,sector,org_type\n";
    for (const auto& r : roster.entries())
        out << csv::quote(r.account_id) << ',' << csv::quote(r.organization_id) << ',' << to_string(r.level) << ','
            << to_string(r.sector) << ',' << to_string(r.org_type) << '\n';
}

}  // namespace stratanet
