#include "stratanet/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>

#include "stratanet/random.hpp"

namespace stratanet::synthetic {

SimpleGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
    Rng rng(derive_key(seed, "erdos-renyi"));
    SimpleGraph g(n);
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) g.add_edge(i, j);
    return g;
}

PlantedPartition planted_partition(std::size_t n, std::size_t blocks, double p_in, double p_out, std::uint64_t seed) {
    if (blocks == 0 || blocks > n) throw InputError("block count must lie in [1, n]");
    Rng rng(derive_key(seed, "planted-partition"));
    std::vector<std::uint32_t> truth(n);
    for (std::size_t v = 0; v < n; ++v) truth[v] = static_cast<std::uint32_t>(v * blocks / n);
    SimpleGraph g(n);
    for (VertexId i = 0; i < n; ++i)
        for (VertexId j = i + 1; j < n; ++j)
            if (rng.bernoulli(truth[i] == truth[j] ? p_in : p_out)) g.add_edge(i, j);
    return {std::move(g), Partition(std::move(truth))};
}

PlantedBackbone planted_backbone(const PlantedBackboneConfig& config, std::uint64_t seed) {
    const std::size_t n = config.vertices;
    if (config.noise_out_degree >= n) throw InputError("noise out-degree must be below the vertex count");
    if (config.signal_min < 1 || config.signal_max < config.signal_min) throw InputError("invalid signal weights");
    Rng rng(derive_key(seed, "planted-backbone"));

    // Circulant digraph i -> i + d (mod n) over distinct offsets, then a random relabeling.
    std::vector<std::size_t> offsets(n - 1);
    std::iota(offsets.begin(), offsets.end(), std::size_t{1});
    shuffle(offsets, rng);
    offsets.resize(config.noise_out_degree);
    std::vector<VertexId> label(n);
    std::iota(label.begin(), label.end(), VertexId{0});
    shuffle(label, rng);

    std::set<std::pair<VertexId, VertexId>> noise;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto d : offsets) {
            const VertexId a = label[i];
            const VertexId b = label[(i + d) % n];
            noise.emplace(a, b);
            edges.push_back({a, b, 1});
        }
    }
    const std::size_t free_dyads = n * (n - 1) - noise.size();
    if (config.signal_edges > free_dyads) throw InputError("not enough free dyads for the signal edges");

    std::set<std::pair<VertexId, VertexId>> signal;
    while (signal.size() < config.signal_edges) {
        const auto a = static_cast<VertexId>(rng.below(n));
        const auto b = static_cast<VertexId>(rng.below(n));
        if (a == b || noise.contains({a, b}) || signal.contains({a, b})) continue;
        signal.emplace(a, b);
        const auto span = static_cast<std::uint64_t>(config.signal_max - config.signal_min + 1);
        edges.push_back({a, b, config.signal_min + static_cast<Weight>(rng.below(span))});
    }

    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) names[i] = "v" + std::to_string(i);
    return {WeightedDigraph(std::move(names), std::move(edges)), {signal.begin(), signal.end()}};
}

namespace {

constexpr std::array kOrgTypes{OrgType::Party, OrgType::Government, OrgType::NGO, OrgType::InterestGroup,
                               OrgType::Corporation, OrgType::Science, OrgType::Media};

std::string account_name(std::size_t org, std::string_view level, std::size_t k) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "o%03zu_%.*s%zu", org, static_cast<int>(level.size()), level.data(), k);
    return buf;
}

class EventWriter {
public:
    EventWriter(Rng& rng, int year) : rng_(rng) {
        using namespace std::chrono;
        start_ = sys_days{std::chrono::year{year} / January / 1};
        days_ = (sys_days{std::chrono::year{year + 1} / January / 1} - sys_days{std::chrono::year{year} / January / 1}).count();
    }

    Timestamp random_time() {
        using namespace std::chrono;
        const auto day = static_cast<int>(rng_.below(static_cast<std::uint64_t>(days_)));
        // Mostly office hours (UTC), with a flat background.
        const auto hour = rng_.uniform() < 0.7 ? 6 + static_cast<int>(rng_.below(10)) : static_cast<int>(rng_.below(24));
        const auto second = static_cast<int>(rng_.below(3600));
        return start_ + days{day} + hours{hour} + seconds{second};
    }

    void retweets(const std::string& from, const std::string& to, int count, bool on_topic = true) {
        for (int i = 0; i < count; ++i) {
            Event e;
            e.account_id = from;
            e.target_account_id = to;
            e.timestamp = random_time();
            e.kind = EventKind::Retweet;
            e.text = on_topic ? "RT: climate policy update" : "RT: weekend football scores";
            events.push_back(std::move(e));
        }
    }

    void own_posts(const std::string& account, int count) {
        for (int i = 0; i < count; ++i) {
            Event e;
            e.account_id = account;
            e.timestamp = random_time();
            const auto r = rng_.below(10);
            e.kind = r < 7 ? EventKind::Tweet : (r < 9 ? EventKind::Reply : EventKind::Quote);
            e.text = rng_.uniform() < 0.8 ? "Our climate roadmap" : "Office closed on Friday";
            events.push_back(std::move(e));
        }
    }

    std::vector<Event> events;

private:
    Rng& rng_;
    Timestamp start_{};
    long days_ = 365;
};

}  // namespace

Dataset four_level(const FourLevelConfig& config, std::uint64_t seed) {
    const std::size_t orgs = config.organizations;
    if (orgs < 2 * kSectorCount) throw InputError("the four-level generator needs at least 14 organizations");
    Rng rng(derive_key(seed, "four-level"));

    std::vector<Sector> sector(orgs);
    std::vector<std::array<std::vector<std::string>, kLevelCount>> accounts(orgs);
    std::vector<RosterEntry> entries;
    for (std::size_t o = 0; o < orgs; ++o) {
        sector[o] = static_cast<Sector>(o % kSectorCount);
        const OrgType type = kOrgTypes[rng.below(kOrgTypes.size())];
        const std::array<std::size_t, kLevelCount> counts{
            1, 1 + static_cast<std::size_t>(rng.below(2)), 2 + static_cast<std::size_t>(rng.below(3)),
            4 + static_cast<std::size_t>(rng.below(7))};
        for (Level level : kAllLevels) {
            for (std::size_t k = 0; k < counts[index_of(level)]; ++k) {
                auto name = account_name(o, to_string(level), k);
                accounts[o][index_of(level)].push_back(name);
                char org_id[32];
                std::snprintf(org_id, sizeof org_id, "org%03zu", o);
                entries.push_back({std::move(name), org_id, level, sector[o], type});
            }
        }
    }

    EventWriter out(rng, config.year);
    auto pick = [&](std::size_t o, Level level) -> const std::string& {
        const auto& list = accounts[o][index_of(level)];
        return list[rng.below(list.size())];
    };
    auto tie = [&](std::size_t a, std::size_t b, Level level, int min_weight, int extra) {
        const auto& x = pick(a, level);
        const auto& y = pick(b, level);
        out.retweets(x, y, min_weight + static_cast<int>(rng.below(static_cast<std::uint64_t>(extra + 1))));
        if (rng.bernoulli(0.5))
            out.retweets(y, x, min_weight + static_cast<int>(rng.below(static_cast<std::uint64_t>(extra + 1))));
    };
    auto internal = [&](std::size_t o, Level level, double p) {
        const auto& list = accounts[o][index_of(level)];
        for (const auto& a : list)
            for (const auto& b : list)
                if (a != b && rng.bernoulli(p)) out.retweets(a, b, 2 + static_cast<int>(rng.below(3)));
    };

    // Organization main: sector-homophilous ties.
    for (std::size_t a = 0; a < orgs; ++a)
        for (std::size_t b = a + 1; b < orgs; ++b)
            if (rng.bernoulli(sector[a] == sector[b] ? config.main_same_sector : config.main_cross_sector))
                tie(a, b, Level::OrgMain, 3, 3);

    // Individual main: dense inside each organization, moderate sectoral ties across.
    for (std::size_t o = 0; o < orgs; ++o) internal(o, Level::IndMain, config.ind_main_internal);
    for (std::size_t a = 0; a < orgs; ++a)
        for (std::size_t b = a + 1; b < orgs; ++b)
            if (rng.bernoulli(sector[a] == sector[b] ? 0.15 : 0.02)) tie(a, b, Level::IndMain, 3, 3);

    // Individual side: cliques of organizations drawn regardless of sector.
    std::vector<std::size_t> order(orgs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t c = 0; c < config.side_clubs; ++c) {
        shuffle(order, rng);
        for (std::size_t x = 0; x < config.side_club_size; ++x)
            for (std::size_t y = x + 1; y < config.side_club_size; ++y) tie(order[x], order[y], Level::IndSide, 3, 3);
    }
    for (std::size_t o = 0; o < orgs; ++o) internal(o, Level::IndSide, config.ind_side_internal);

    // Organization side: a few triangles, one of them inside a sector, and scattered ties.
    std::set<std::pair<std::size_t, std::size_t>> side_ties;
    auto side_tie = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        if (side_ties.emplace(a, b).second) tie(a, b, Level::OrgSide, 2, 3);
    };
    for (std::size_t t = 0; t < config.org_side_triangles; ++t) {
        shuffle(order, rng);
        if (t == 0) {
            // Sector members of the first shuffled organization.
            const Sector s = sector[order[0]];
            std::stable_partition(order.begin(), order.end(), [&](std::size_t o) { return sector[o] == s; });
        }
        side_tie(order[0], order[1]);
        side_tie(order[1], order[2]);
        side_tie(order[0], order[2]);
    }
    for (std::size_t k = 0; k < config.org_side_ties; ++k) {
        const auto a = rng.below(orgs);
        const auto b = rng.below(orgs);
        if (a != b) side_tie(a, b);
    }
    for (std::size_t o = 0; o < orgs; ++o) internal(o, Level::OrgSide, config.org_side_internal);

    // Single retweets between random accounts of one level, and across levels.
    for (Level level : kAllLevels) {
        std::vector<const std::string*> pool;
        for (std::size_t o = 0; o < orgs; ++o)
            for (const auto& a : accounts[o][index_of(level)]) pool.push_back(&a);
        const double rate = level == Level::OrgSide   ? config.org_side_noise_per_account
                            : level == Level::IndSide ? config.ind_side_noise_per_account
                                                      : config.noise_per_account;
        const auto noise = static_cast<std::size_t>(rate * static_cast<double>(pool.size()));
        for (std::size_t k = 0; k < noise; ++k) {
            const auto* a = pool[rng.below(pool.size())];
            const auto* b = pool[rng.below(pool.size())];
            if (a != b) out.retweets(*a, *b, 1, rng.uniform() < 0.9);
        }
    }
    for (std::size_t k = 0; k < entries.size() / 3; ++k) {
        const auto& a = entries[rng.below(entries.size())];
        const auto& b = entries[rng.below(entries.size())];
        if (a.account_id != b.account_id && a.level != b.level) out.retweets(a.account_id, b.account_id, 1);
    }

    for (const auto& e : entries) out.own_posts(e.account_id, 8 + static_cast<int>(rng.below(20)));

    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const Event& x, const Event& y) { return x.timestamp < y.timestamp; });
    return {Roster(std::move(entries)), std::move(out.events)};
}

}  // namespace stratanet::synthetic
