#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratanet/graph.hpp"
#include "stratanet/temporal.hpp"
#include "stratanet/types.hpp"

namespace stratanet {

/// Level x level probabilities of a directed (binary) edge, rows = sender level.
struct MixingMatrix {
    std::array<std::array<std::int64_t, kLevelCount>, kLevelCount> counts{};
    std::array<std::array<std::optional<double>, kLevelCount>, kLevelCount> probability{};
    std::array<std::size_t, kLevelCount> accounts{};

    /// Cells undefined because a level has no accounts (or one account on the diagonal).
    bool has_undefined_cells() const;
};

/// Every graph vertex must be a roster account; organization membership is ignored.
MixingMatrix mixing_matrix(const WeightedDigraph& g, const Roster& roster);

struct OrgValue {
    std::string organization_id;
    std::size_t accounts = 0;
    double value = 0;
};

struct OrgLevelSummary {
    Level level = Level::OrgMain;
    std::vector<OrgValue> per_org;  // organizations with >= 2 accounts at the level, roster order
    double mean = 0;
};

/// Binary directed edges among each organization's level accounts over n(n-1).
/// Throws DegenerateError("density undefined at level ...") if no organization has
/// two accounts at the level.
OrgLevelSummary org_density(const WeightedDigraph& g, const Roster& roster, Level level);

enum class OverlapMode { Weighted, Unweighted };

/// Neighbourhood overlap of i and j on the symmetrized view. Weighted:
///   sum_{k in common} (w_ik + w_jk) / (s_i + s_j + 2 w_ij).
/// Unweighted: n_ij / ((k_i - 1) + (k_j - 1) - n_ij) for adjacent pairs and
/// n_ij / (k_i + k_j - n_ij) otherwise. Zero denominators give 0.
double overlap(const UndirectedView& view, VertexId i, VertexId j, OverlapMode mode);

/// Mean overlap over all pairs of an organization's level accounts, then over
/// organizations (those with >= 2 accounts). Accounts absent from `g` count as isolated.
OrgLevelSummary org_mean_overlap(const WeightedDigraph& g, const Roster& roster, Level level, OverlapMode mode);

/// Level aggregations for official/personal and main/side comparisons.
struct LevelSet {
    std::string name;
    std::array<bool, kLevelCount> members{};

    bool contains(Level l) const { return members[index_of(l)]; }
};

LevelSet level_set(std::string_view preset);  // official, personal, main, side, or a level name
LevelSet official_levels();
LevelSet personal_levels();
LevelSet main_levels();
LevelSet side_levels();

struct AccountValue {
    std::string account_id;
    Level level = Level::OrgMain;
    OrgType org_type = OrgType::Party;
    double value = 0;
};

struct AggregationComparison {
    std::string org_type;  // "all" or an org type name
    std::optional<MeanDifference> difference;  // absent when a side has < 2 accounts
};

/// mean(first) - mean(second) with a 95% interval, over all accounts and per org type.
std::vector<AggregationComparison> compare_aggregations(std::span<const AccountValue> values, const LevelSet& first,
                                                        const LevelSet& second);

}  // namespace stratanet
