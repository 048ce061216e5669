#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stratanet {

/// Malformed or inconsistent input (bad file rows, unknown ids, invalid arguments).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An analysis that cannot produce a meaningful value on the given data
/// (e.g. a density with no eligible organization, an ERGM on an empty ensemble).
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Enumerator order is the row/column order of every level-indexed table.
enum class Level : std::uint8_t { OrgMain, OrgSide, IndMain, IndSide };
inline constexpr std::size_t kLevelCount = 4;
inline constexpr std::array<Level, kLevelCount> kAllLevels{Level::OrgMain, Level::OrgSide, Level::IndMain,
                                                           Level::IndSide};

enum class Sector : std::uint8_t { Government, Science, Business, CivilSociety, Media, InterestGroup, PoliticalParty };
inline constexpr std::size_t kSectorCount = 7;

enum class OrgType : std::uint8_t { Party, Government, NGO, InterestGroup, Corporation, Science, Media };
inline constexpr std::size_t kOrgTypeCount = 7;

enum class EventKind : std::uint8_t { Tweet, Retweet, Reply, Quote };

std::string_view to_string(Level level);
std::string_view to_string(Sector sector);
std::string_view to_string(OrgType type);
std::string_view to_string(EventKind kind);

// Parsers accept the snake_case file spelling ("org_main", "civil_society", ...).
Level parse_level(std::string_view text);
Sector parse_sector(std::string_view text);
OrgType parse_org_type(std::string_view text);
EventKind parse_event_kind(std::string_view text);

constexpr std::size_t index_of(Level level) { return static_cast<std::size_t>(level); }
constexpr std::size_t index_of(Sector sector) { return static_cast<std::size_t>(sector); }
constexpr std::size_t index_of(OrgType type) { return static_cast<std::size_t>(type); }

using Timestamp = std::chrono::sys_seconds;

struct Event {
    std::string account_id;
    std::optional<std::string> target_account_id;
    Timestamp timestamp{};
    EventKind kind = EventKind::Tweet;
    std::optional<std::string> text;
};

struct RosterEntry {
    std::string account_id;
    std::string organization_id;
    Level level = Level::OrgMain;
    Sector sector = Sector::Government;
    OrgType org_type = OrgType::Party;
};

/// Account -> organization assignment. Validates the roster invariants on construction:
/// unique account ids and a single (sector, org_type) per organization.
class Roster {
public:
    Roster() = default;
    explicit Roster(std::vector<RosterEntry> entries);

    const std::vector<RosterEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    const RosterEntry* find(std::string_view account_id) const;
    const RosterEntry& at(std::string_view account_id) const;
    bool contains(std::string_view account_id) const { return find(account_id) != nullptr; }

    /// Organization ids in first-appearance order.
    const std::vector<std::string>& organizations() const { return organizations_; }
    std::size_t organization_index(std::string_view organization_id) const;
    Sector organization_sector(std::size_t org_index) const { return org_sector_[org_index]; }
    OrgType organization_type(std::size_t org_index) const { return org_type_[org_index]; }

    /// Accounts of one level, in roster order.
    std::vector<std::string> accounts_at(Level level) const;

private:
    std::vector<RosterEntry> entries_;
    std::unordered_map<std::string, std::size_t> by_account_;
    std::vector<std::string> organizations_;
    std::unordered_map<std::string, std::size_t> by_org_;
    std::vector<Sector> org_sector_;
    std::vector<OrgType> org_type_;
};

}  // namespace stratanet
