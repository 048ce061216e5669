#include "stratanet/types.hpp"

#include <algorithm>
#include <cctype>

namespace stratanet {
namespace {

constexpr std::array<std::string_view, kLevelCount> kLevelNames{"org_main", "org_side", "ind_main", "ind_side"};
constexpr std::array<std::string_view, kSectorCount> kSectorNames{
    "government", "science", "business", "civil_society", "media", "interest_group", "political_party"};
constexpr std::array<std::string_view, kOrgTypeCount> kOrgTypeNames{
    "party", "government", "ngo", "interest_group", "corporation", "science", "media"};
constexpr std::array<std::string_view, 4> kKindNames{"tweet", "retweet", "reply", "quote"};

std::string normalized(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '-' || c == ' ')
            out.push_back('_');
        else
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

template <typename Enum, std::size_t N>
Enum parse_named(std::string_view text, const std::array<std::string_view, N>& names, std::string_view what) {
    const std::string key = normalized(text);
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == key) return static_cast<Enum>(i);
    throw InputError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(Level level) { return kLevelNames[index_of(level)]; }
std::string_view to_string(Sector sector) { return kSectorNames[index_of(sector)]; }
std::string_view to_string(OrgType type) { return kOrgTypeNames[index_of(type)]; }
std::string_view to_string(EventKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

Level parse_level(std::string_view text) { return parse_named<Level>(text, kLevelNames, "level"); }
Sector parse_sector(std::string_view text) { return parse_named<Sector>(text, kSectorNames, "sector"); }
OrgType parse_org_type(std::string_view text) { return parse_named<OrgType>(text, kOrgTypeNames, "org_type"); }
EventKind parse_event_kind(std::string_view text) { return parse_named<EventKind>(text, kKindNames, "kind"); }

Roster::Roster(std::vector<RosterEntry> entries) : entries_(std::move(entries)) {
    by_account_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.account_id.empty()) throw InputError("roster entry " + std::to_string(i + 1) + " has empty account_id");
        if (e.organization_id.empty())
            throw InputError("roster entry for '" + e.account_id + "' has empty organization_id");
        if (!by_account_.emplace(e.account_id, i).second)
            throw InputError("duplicate roster account_id '" + e.account_id + "'");

        auto [it, inserted] = by_org_.emplace(e.organization_id, organizations_.size());
        if (inserted) {
            organizations_.push_back(e.organization_id);
            org_sector_.push_back(e.sector);
            org_type_.push_back(e.org_type);
        } else if (org_sector_[it->second] != e.sector || org_type_[it->second] != e.org_type) {
            throw InputError("organization '" + e.organization_id + "' has inconsistent sector/org_type (account '" +
                             e.account_id + "')");
        }
    }
}

const RosterEntry* Roster::find(std::string_view account_id) const {
    auto it = by_account_.find(std::string(account_id));
    return it == by_account_.end() ? nullptr : &entries_[it->second];
}

const RosterEntry& Roster::at(std::string_view account_id) const {
    const RosterEntry* e = find(account_id);
    if (e == nullptr) throw InputError("account '" + std::string(account_id) + "' is not in the roster");
    return *e;
}

std::size_t Roster::organization_index(std::string_view organization_id) const {
    auto it = by_org_.find(std::string(organization_id));
    if (it == by_org_.end()) throw InputError("unknown organization '" + std::string(organization_id) + "'");
    return it->second;
}

std::vector<std::string> Roster::accounts_at(Level level) const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
        if (e.level == level) out.push_back(e.account_id);
    return out;
}

}  // namespace stratanet
