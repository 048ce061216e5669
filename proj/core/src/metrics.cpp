#include "stratanet/metrics.hpp"

#include <algorithm>

namespace stratanet {
namespace {

// Level accounts of every organization, as vertex ids of g (nullopt = not in g).
std::vector<std::vector<std::optional<VertexId>>> org_members(const WeightedDigraph& g, const Roster& roster,
                                                              Level level) {
    std::vector<std::vector<std::optional<VertexId>>> members(roster.organizations().size());
    for (const auto& e : roster.entries()) {
        if (e.level != level) continue;
        members[roster.organization_index(e.organization_id)].push_back(g.find(e.account_id));
    }
    return members;
}

OrgLevelSummary summarize(std::vector<OrgValue> per_org, Level level, std::string_view what) {
    if (per_org.empty())
        throw DegenerateError(std::string(what) + " undefined at level " + std::string(to_string(level)) +
                              ": no organization has two or more accounts");
    OrgLevelSummary out;
    out.level = level;
    double sum = 0;
    for (const auto& o : per_org) sum += o.value;
    out.mean = sum / static_cast<double>(per_org.size());
    out.per_org = std::move(per_org);
    return out;
}

}  // namespace

bool MixingMatrix::has_undefined_cells() const {
    for (const auto& row : probability)
        for (const auto& cell : row)
            if (!cell) return true;
    return false;
}

MixingMatrix mixing_matrix(const WeightedDigraph& g, const Roster& roster) {
    MixingMatrix m;
    std::vector<std::size_t> level_of(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        level_of[v] = index_of(roster.at(g.name(v)).level);
        ++m.accounts[level_of[v]];
    }
    for (const auto& e : g.edges()) ++m.counts[level_of[e.src]][level_of[e.dst]];
    for (std::size_t a = 0; a < kLevelCount; ++a) {
        for (std::size_t b = 0; b < kLevelCount; ++b) {
            const double na = static_cast<double>(m.accounts[a]);
            const double nb = static_cast<double>(m.accounts[b]);
            const double dyads = a == b ? na * (na - 1.0) : na * nb;
            if (dyads > 0) m.probability[a][b] = static_cast<double>(m.counts[a][b]) / dyads;
        }
    }
    return m;
}

OrgLevelSummary org_density(const WeightedDigraph& g, const Roster& roster, Level level) {
    const auto members = org_members(g, roster, level);
    std::vector<OrgValue> per_org;
    for (std::size_t org = 0; org < members.size(); ++org) {
        const auto& accounts = members[org];
        if (accounts.size() < 2) continue;
        std::size_t edges = 0;
        for (const auto& a : accounts)
            for (const auto& b : accounts)
                if (a && b && *a != *b && g.weight(*a, *b) > 0) ++edges;
        const double n = static_cast<double>(accounts.size());
        per_org.push_back({roster.organizations()[org], accounts.size(), static_cast<double>(edges) / (n * (n - 1))});
    }
    return summarize(std::move(per_org), level, "density");
}

double overlap(const UndirectedView& view, VertexId i, VertexId j, OverlapMode mode) {
    if (i == j) throw InputError("overlap needs two distinct vertices");
    if (i >= view.vertex_count() || j >= view.vertex_count()) throw InputError("overlap vertex out of range");

    const auto ni = view.neighbors(i);
    const auto nj = view.neighbors(j);
    std::size_t common = 0;
    Weight common_weight = 0;
    auto a = ni.begin();
    auto b = nj.begin();
    while (a != ni.end() && b != nj.end()) {
        if (a->vertex < b->vertex) {
            ++a;
        } else if (b->vertex < a->vertex) {
            ++b;
        } else {
            ++common;
            common_weight += a->weight + b->weight;
            ++a;
            ++b;
        }
    }

    const Weight wij = view.weight(i, j);
    if (mode == OverlapMode::Weighted) {
        const double denom = static_cast<double>(view.strength(i) + view.strength(j) + 2 * wij);
        return denom > 0 ? static_cast<double>(common_weight) / denom : 0.0;
    }
    const double n = static_cast<double>(common);
    const double ki = static_cast<double>(view.degree(i));
    const double kj = static_cast<double>(view.degree(j));
    const double denom = wij > 0 ? (ki - 1.0) + (kj - 1.0) - n : ki + kj - n;
    return denom > 0 ? n / denom : 0.0;
}

OrgLevelSummary org_mean_overlap(const WeightedDigraph& g, const Roster& roster, Level level, OverlapMode mode) {
    const UndirectedView view(g);
    const auto members = org_members(g, roster, level);
    std::vector<OrgValue> per_org;
    for (std::size_t org = 0; org < members.size(); ++org) {
        const auto& accounts = members[org];
        if (accounts.size() < 2) continue;
        double sum = 0;
        std::size_t pairs = 0;
        for (std::size_t x = 0; x < accounts.size(); ++x) {
            for (std::size_t y = x + 1; y < accounts.size(); ++y) {
                ++pairs;
                if (accounts[x] && accounts[y]) sum += overlap(view, *accounts[x], *accounts[y], mode);
            }
        }
        per_org.push_back({roster.organizations()[org], accounts.size(), sum / static_cast<double>(pairs)});
    }
    return summarize(std::move(per_org), level, "overlap");
}

LevelSet official_levels() { return {"official", {true, true, false, false}}; }
LevelSet personal_levels() { return {"personal", {false, false, true, true}}; }
LevelSet main_levels() { return {"main", {true, false, true, false}}; }
LevelSet side_levels() { return {"side", {false, true, false, true}}; }

LevelSet level_set(std::string_view preset) {
    if (preset == "official") return official_levels();
    if (preset == "personal") return personal_levels();
    if (preset == "main") return main_levels();
    if (preset == "side") return side_levels();
    LevelSet single{std::string(preset), {}};
    single.members[index_of(parse_level(preset))] = true;
    return single;
}

std::vector<AggregationComparison> compare_aggregations(std::span<const AccountValue> values, const LevelSet& first,
                                                        const LevelSet& second) {
    auto compare = [&](std::optional<OrgType> type) {
        std::vector<double> a, b;
        for (const auto& v : values) {
            if (type && v.org_type != *type) continue;
            if (first.contains(v.level)) a.push_back(v.value);
            if (second.contains(v.level)) b.push_back(v.value);
        }
        AggregationComparison row;
        row.org_type = type ? std::string(to_string(*type)) : "all";
        if (a.size() >= 2 && b.size() >= 2) row.difference = group_mean_difference(a, b);
        return row;
    };
    std::vector<AggregationComparison> rows;
    rows.push_back(compare(std::nullopt));
    for (std::size_t t = 0; t < kOrgTypeCount; ++t) rows.push_back(compare(static_cast<OrgType>(t)));
    return rows;
}

}  // namespace stratanet
