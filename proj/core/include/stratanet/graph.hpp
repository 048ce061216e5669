#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stratanet/types.hpp"

namespace stratanet {

using VertexId = std::uint32_t;
using Weight = std::int64_t;

struct Edge {
    VertexId src = 0;
    VertexId dst = 0;
    Weight weight = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Provenance carried alongside a graph; never used by the algorithms themselves.
struct GraphMetadata {
    std::optional<Level> level;
    std::optional<std::pair<Timestamp, Timestamp>> window;
    std::uint64_t keyword_hash = 0;

    friend bool operator==(const GraphMetadata&, const GraphMetadata&) = default;
};

/// Weighted directed graph over interned vertex names. Edge weights are event
/// counts (>= 1), self-loops never appear and edges are stored sorted by (src, dst).
/// Immutable once built.
class WeightedDigraph {
public:
    WeightedDigraph() = default;

    /// Parallel (src, dst) entries are summed and self-loops are dropped.
    /// Throws InputError on out-of-range ids or non-positive weights.
    WeightedDigraph(std::vector<std::string> vertex_names, std::vector<Edge> edges, GraphMetadata metadata = {});

    std::size_t vertex_count() const { return names_.size(); }
    const std::vector<std::string>& vertex_names() const { return names_; }
    const std::string& name(VertexId v) const { return names_[v]; }
    std::optional<VertexId> find(std::string_view name) const;
    VertexId id(std::string_view name) const;

    std::span<const Edge> edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }
    Weight total_weight() const { return total_weight_; }
    Weight weight(VertexId src, VertexId dst) const;
    bool directed() const { return true; }

    const GraphMetadata& metadata() const { return metadata_; }

    friend bool operator==(const WeightedDigraph& a, const WeightedDigraph& b) {
        return a.names_ == b.names_ && a.edges_ == b.edges_;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, VertexId> index_;
    std::vector<Edge> edges_;
    Weight total_weight_ = 0;
    GraphMetadata metadata_;
};

/// Accumulates weighted events into a WeightedDigraph.
class GraphBuilder {
public:
    VertexId add_vertex(std::string_view name);
    /// Adds `weight` to (src, dst). Self-loops are ignored.
    void add_edge(std::string_view src, std::string_view dst, Weight weight = 1);
    void add_edge(VertexId src, VertexId dst, Weight weight = 1);
    bool has_vertex(std::string_view name) const { return index_.contains(std::string(name)); }
    WeightedDigraph build(GraphMetadata metadata = {}) &&;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, VertexId> index_;
    std::unordered_map<std::uint64_t, Weight> weights_;
};

struct VertexStrength {
    Weight out_strength = 0;
    Weight in_strength = 0;
    std::size_t degree = 0;  // distinct neighbours in the undirected view

    friend bool operator==(const VertexStrength&, const VertexStrength&) = default;
};

std::vector<VertexStrength> strengths(const WeightedDigraph& g);

/// Keeps the listed vertices (in the graph's own vertex order) and every edge with
/// both endpoints among them. Unknown names throw InputError.
WeightedDigraph induced_subgraph(const WeightedDigraph& g, std::span<const std::string> vertex_names);

/// Symmetrized view: w'(i,j) = w(i,j) + w(j,i). Neighbour lists sorted by id.
class UndirectedView {
public:
    explicit UndirectedView(const WeightedDigraph& g);

    struct Neighbor {
        VertexId vertex;
        Weight weight;
    };

    std::size_t vertex_count() const { return adjacency_.size(); }
    std::span<const Neighbor> neighbors(VertexId v) const { return adjacency_[v]; }
    std::size_t degree(VertexId v) const { return adjacency_[v].size(); }
    Weight strength(VertexId v) const { return strength_[v]; }
    Weight weight(VertexId a, VertexId b) const;

private:
    std::vector<std::vector<Neighbor>> adjacency_;
    std::vector<Weight> strength_;
};

/// Undirected simple graph on vertices 0..n-1 with adjacency lists and bit rows.
/// Used for binary analyses (block models, ERGMs); edges can be toggled.
class SimpleGraph {
public:
    SimpleGraph() = default;
    explicit SimpleGraph(std::size_t n);
    SimpleGraph(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges);

    std::size_t vertex_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::span<const VertexId> neighbors(VertexId v) const { return adjacency_[v]; }
    std::size_t degree(VertexId v) const { return adjacency_[v].size(); }
    bool has_edge(VertexId a, VertexId b) const {
        return ((bits_[a * words_ + (b >> 6)] >> (b & 63)) & 1ULL) != 0;
    }
    /// Number of common neighbours of a and b.
    std::size_t shared_partners(VertexId a, VertexId b) const;

    void add_edge(VertexId a, VertexId b);
    void remove_edge(VertexId a, VertexId b);
    void toggle(VertexId a, VertexId b) { has_edge(a, b) ? remove_edge(a, b) : add_edge(a, b); }

    /// Sorted (u < v) edge list.
    std::vector<std::pair<VertexId, VertexId>> edge_list() const;

    friend bool operator==(const SimpleGraph& a, const SimpleGraph& b) { return a.bits_ == b.bits_; }

private:
    std::size_t words_ = 0;
    std::vector<std::vector<VertexId>> adjacency_;
    std::vector<std::uint64_t> bits_;
    std::size_t edge_count_ = 0;
};

/// Binary undirected directed-edge-presence graph; a WeightedDigraph edge in either
/// direction becomes one undirected edge.
SimpleGraph to_simple(const WeightedDigraph& g);

/// Organization-level graph: one vertex per roster organization (isolates included),
/// binary undirected edges.
struct CollapsedGraph {
    std::vector<std::string> organizations;
    std::vector<std::pair<VertexId, VertexId>> edges;  // u < v, sorted, unique

    std::size_t vertex_count() const { return organizations.size(); }
    std::size_t edge_count() const { return edges.size(); }
    SimpleGraph to_simple() const { return SimpleGraph(organizations.size(), edges); }

    friend bool operator==(const CollapsedGraph&, const CollapsedGraph&) = default;
};

/// Vertex -> block assignment with contiguous block ids 0..B-1.
class Partition {
public:
    Partition() = default;
    /// Throws InputError unless labels are exactly {0..B-1} for some B >= 1.
    explicit Partition(std::vector<std::uint32_t> assignment);
    /// Relabels arbitrary labels to 0..B-1 in first-appearance order.
    static Partition from_labels(std::span<const std::int64_t> labels);

    std::size_t vertex_count() const { return assignment_.size(); }
    std::size_t block_count() const { return block_count_; }
    std::uint32_t operator[](std::size_t v) const { return assignment_[v]; }
    const std::vector<std::uint32_t>& assignment() const { return assignment_; }
    std::vector<std::size_t> block_sizes() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::uint32_t> assignment_;
    std::size_t block_count_ = 0;
};

void write_edge_csv(std::ostream& out, const WeightedDigraph& g);
WeightedDigraph read_edge_csv(std::istream& in);
void write_graphml(std::ostream& out, const WeightedDigraph& g);
void write_collapsed_csv(std::ostream& out, const CollapsedGraph& g);

}  // namespace stratanet
