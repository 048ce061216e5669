#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stratanet/graph.hpp"
#include "stratanet/types.hpp"

namespace stratanet {

enum class EventFormat { Csv, Jsonl };

/// Reads `account_id,target_account_id,timestamp,kind,text` records (CSV with a header
/// row, or one JSON object per line). Errors carry the 1-based line number.
std::vector<Event> parse_events(std::istream& in, EventFormat format);

/// Picks the format from the file extension (".jsonl"/".ndjson" -> JSONL, else CSV).
EventFormat event_format_for(std::string_view path);

/// Reads `account_id,organization_id,level,sector,org_type`.
Roster parse_roster(std::istream& in);

/// CSV writers matching parse_events / parse_roster.
void write_events_csv(std::ostream& out, const std::vector<Event>& events);
void write_roster_csv(std::ostream& out, const Roster& roster);

/// One substring per line; blank lines and `#` comments ignored.
std::vector<std::string> parse_keywords(std::istream& in);

/// Concatenates per-file event lists ordered by (timestamp, file index, position in file).
std::vector<Event> merge_event_streams(std::vector<std::vector<Event>> files);

/// Case folding for keyword matching: ASCII plus the Latin-1 supplement letters
/// (so "Ä" matches "ä").
std::string fold_case(std::string_view text);

struct FilterSpec {
    std::vector<std::string> keywords;  // empty = accept every text
    Timestamp start{};
    Timestamp end{};                    // half-open window [start, end)
    std::set<EventKind> kinds{EventKind::Retweet};
    bool roster_only = true;

    /// Throws InputError unless start < end.
    void validate() const;
    /// Order-independent hash of the folded keyword set, recorded in graph metadata.
    std::uint64_t keyword_hash() const;
};

/// Window spanning all representable second timestamps.
FilterSpec unbounded_filter();

std::vector<Event> filter_events(const std::vector<Event>& events, const FilterSpec& spec, const Roster& roster);

/// Retweeter -> original author graph, edge weight = retweet count. With a level,
/// vertices are that level's roster accounts and only retweets between two accounts
/// of that level count; otherwise all roster accounts are vertices. Non-retweet
/// events are skipped. A retweet endpoint missing from the roster throws InputError.
WeightedDigraph build_account_graph(const std::vector<Event>& events, const Roster& roster,
                                    std::optional<Level> level = std::nullopt, GraphMetadata metadata = {});

/// Organization graph from a backboned (binary) account graph: organizations are
/// joined when any surviving account edge crosses them. All roster organizations
/// are vertices; intra-organization edges are dropped.
CollapsedGraph collapse(const WeightedDigraph& backboned, const Roster& roster);

}  // namespace stratanet
