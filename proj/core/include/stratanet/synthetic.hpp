#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stratanet/graph.hpp"
#include "stratanet/types.hpp"

namespace stratanet::synthetic {

/// G(n, p).
SimpleGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

struct PlantedPartition {
    SimpleGraph graph;
    Partition truth;
};

/// `blocks` equal-size groups (sizes differ by at most one); within-group dyads are
/// edges with probability p_in, others with p_out.
PlantedPartition planted_partition(std::size_t n, std::size_t blocks, double p_in, double p_out, std::uint64_t seed);

struct PlantedBackbone {
    WeightedDigraph graph;
    std::vector<std::pair<VertexId, VertexId>> signal;  // sorted
};

struct PlantedBackboneConfig {
    std::size_t vertices = 50;
    std::size_t noise_out_degree = 8;  // noise edges = vertices * noise_out_degree
    std::size_t signal_edges = 20;
    Weight signal_min = 5;
    Weight signal_max = 8;
};

/// Unit-weight noise forming a regular digraph (every vertex has the same in- and
/// out-degree) plus heavier signal edges on dyads the noise does not use.
PlantedBackbone planted_backbone(const PlantedBackboneConfig& config, std::uint64_t seed);

/// Four-level organizational dataset: a roster and timestamped events.
struct Dataset {
    Roster roster;
    std::vector<Event> events;
};

struct FourLevelConfig {
    std::size_t organizations = 60;
    /// Organization main layer: retweet ties concentrated within sectors.
    double main_same_sector = 0.4;
    double main_cross_sector = 0.02;
    /// Individual side layer: overlapping cross-sector clubs.
    std::size_t side_clubs = 14;
    std::size_t side_club_size = 5;
    /// Organization side layer: a few triangles plus scattered cross-organization ties.
    std::size_t org_side_triangles = 3;
    std::size_t org_side_ties = 12;
    /// Within-organization directed retweet probability per level.
    double ind_main_internal = 0.7;
    double ind_side_internal = 0.15;
    double org_side_internal = 0.0;
    /// Single retweets between random same-level accounts.
    double noise_per_account = 0.5;
    double org_side_noise_per_account = 0.2;
    double ind_side_noise_per_account = 0.15;
    int year = 2019;
};

/// Executive core (dense within-organization IndMain retweeting), sector-homophilous
/// OrgMain layer, clustered cross-sector IndSide layer and a sparse OrgSide layer.
/// Non-retweet activity and off-topic texts are mixed in for the filtering stages.
Dataset four_level(const FourLevelConfig& config, std::uint64_t seed);

}  // namespace stratanet::synthetic
