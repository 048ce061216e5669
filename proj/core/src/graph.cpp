#include "stratanet/graph.hpp"

#include <algorithm>
#include <bit>
#include <tuple>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "stratanet/csv.hpp"

namespace stratanet {
namespace {

std::uint64_t pack(VertexId a, VertexId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

WeightedDigraph::WeightedDigraph(std::vector<std::string> vertex_names, std::vector<Edge> edges,
                                 GraphMetadata metadata)
    : names_(std::move(vertex_names)), metadata_(std::move(metadata)) {
    index_.reserve(names_.size());
    for (VertexId v = 0; v < names_.size(); ++v)
        if (!index_.emplace(names_[v], v).second) throw InputError("duplicate vertex name '" + names_[v] + "'");

    const auto n = names_.size();
    for (const auto& e : edges) {
        if (e.src >= n || e.dst >= n) throw InputError("edge endpoint out of range");
        if (e.weight < 1) throw InputError("edge weight must be >= 1");
    }
    std::erase_if(edges, [](const Edge& e) { return e.src == e.dst; });
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.src, a.dst) < std::tie(b.src, b.dst); });
    for (const auto& e : edges) {
        if (!edges_.empty() && edges_.back().src == e.src && edges_.back().dst == e.dst)
            edges_.back().weight += e.weight;
        else
            edges_.push_back(e);
        total_weight_ += e.weight;
    }
}

std::optional<VertexId> WeightedDigraph::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

VertexId WeightedDigraph::id(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw InputError("unknown vertex '" + std::string(name) + "'");
}

Weight WeightedDigraph::weight(VertexId src, VertexId dst) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{src, dst}, [](const Edge& e, const auto& key) {
        return std::tie(e.src, e.dst) < std::tie(key.first, key.second);
    });
    if (it != edges_.end() && it->src == src && it->dst == dst) return it->weight;
    return 0;
}

VertexId GraphBuilder::add_vertex(std::string_view name) {
    auto [it, inserted] = index_.emplace(std::string(name), static_cast<VertexId>(names_.size()));
    if (inserted) names_.emplace_back(name);
    return it->second;
}

void GraphBuilder::add_edge(std::string_view src, std::string_view dst, Weight weight) {
    add_edge(add_vertex(src), add_vertex(dst), weight);
}

void GraphBuilder::add_edge(VertexId src, VertexId dst, Weight weight) {
    if (src >= names_.size() || dst >= names_.size()) throw InputError("edge endpoint out of range");
    if (weight < 1) throw InputError("edge weight must be >= 1");
    if (src == dst) return;
    weights_[pack(src, dst)] += weight;
}

WeightedDigraph GraphBuilder::build(GraphMetadata metadata) && {
    std::vector<Edge> edges;
    edges.reserve(weights_.size());
    for (const auto& [key, w] : weights_)
        edges.push_back({static_cast<VertexId>(key >> 32), static_cast<VertexId>(key & 0xffffffffu), w});
    return WeightedDigraph(std::move(names_), std::move(edges), std::move(metadata));
}

std::vector<VertexStrength> strengths(const WeightedDigraph& g) {
    std::vector<VertexStrength> out(g.vertex_count());
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(g.edge_count());
    for (const auto& e : g.edges()) {
        out[e.src].out_strength += e.weight;
        out[e.dst].in_strength += e.weight;
        const auto key = pack(std::min(e.src, e.dst), std::max(e.src, e.dst));
        if (seen.insert(key).second) {
            ++out[e.src].degree;
            ++out[e.dst].degree;
        }
    }
    return out;
}

WeightedDigraph induced_subgraph(const WeightedDigraph& g, std::span<const std::string> vertex_names) {
    std::vector<bool> keep(g.vertex_count(), false);
    for (const auto& name : vertex_names) keep[g.id(name)] = true;

    std::vector<VertexId> remap(g.vertex_count(), 0);
    std::vector<std::string> names;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (!keep[v]) continue;
        remap[v] = static_cast<VertexId>(names.size());
        names.push_back(g.name(v));
    }
    std::vector<Edge> edges;
    for (const auto& e : g.edges())
        if (keep[e.src] && keep[e.dst]) edges.push_back({remap[e.src], remap[e.dst], e.weight});
    return WeightedDigraph(std::move(names), std::move(edges), g.metadata());
}

UndirectedView::UndirectedView(const WeightedDigraph& g)
    : adjacency_(g.vertex_count()), strength_(g.vertex_count(), 0) {
    for (const auto& e : g.edges()) {
        adjacency_[e.src].push_back({e.dst, e.weight});
        adjacency_[e.dst].push_back({e.src, e.weight});
        strength_[e.src] += e.weight;
        strength_[e.dst] += e.weight;
    }
    for (auto& list : adjacency_) {
        std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
        std::vector<Neighbor> merged;
        merged.reserve(list.size());
        for (const auto& nb : list) {
            if (!merged.empty() && merged.back().vertex == nb.vertex)
                merged.back().weight += nb.weight;
            else
                merged.push_back(nb);
        }
        list = std::move(merged);
    }
}

Weight UndirectedView::weight(VertexId a, VertexId b) const {
    const auto& list = adjacency_[a];
    auto it = std::lower_bound(list.begin(), list.end(), b,
                               [](const Neighbor& nb, VertexId key) { return nb.vertex < key; });
    return (it != list.end() && it->vertex == b) ? it->weight : 0;
}

SimpleGraph::SimpleGraph(std::size_t n) : words_((n + 63) / 64), adjacency_(n), bits_(n * ((n + 63) / 64), 0) {}

SimpleGraph::SimpleGraph(std::size_t n, std::span<const std::pair<VertexId, VertexId>> edges) : SimpleGraph(n) {
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) throw InputError("edge endpoint out of range");
        if (a != b && !has_edge(a, b)) add_edge(a, b);
    }
}

std::size_t SimpleGraph::shared_partners(VertexId a, VertexId b) const {
    std::size_t count = 0;
    const std::uint64_t* ra = &bits_[a * words_];
    const std::uint64_t* rb = &bits_[b * words_];
    for (std::size_t w = 0; w < words_; ++w) count += static_cast<std::size_t>(std::popcount(ra[w] & rb[w]));
    return count;
}

void SimpleGraph::add_edge(VertexId a, VertexId b) {
    if (a == b || has_edge(a, b)) return;
    bits_[a * words_ + (b >> 6)] |= 1ULL << (b & 63);
    bits_[b * words_ + (a >> 6)] |= 1ULL << (a & 63);
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
    ++edge_count_;
}

void SimpleGraph::remove_edge(VertexId a, VertexId b) {
    if (a == b || !has_edge(a, b)) return;
    bits_[a * words_ + (b >> 6)] &= ~(1ULL << (b & 63));
    bits_[b * words_ + (a >> 6)] &= ~(1ULL << (a & 63));
    auto drop = [](std::vector<VertexId>& list, VertexId x) {
        auto it = std::find(list.begin(), list.end(), x);
        *it = list.back();
        list.pop_back();
    };
    drop(adjacency_[a], b);
    drop(adjacency_[b], a);
    --edge_count_;
}

std::vector<std::pair<VertexId, VertexId>> SimpleGraph::edge_list() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    out.reserve(edge_count_);
    for (VertexId a = 0; a < adjacency_.size(); ++a)
        for (VertexId b : adjacency_[a])
            if (a < b) out.emplace_back(a, b);
    std::sort(out.begin(), out.end());
    return out;
}

SimpleGraph to_simple(const WeightedDigraph& g) {
    SimpleGraph out(g.vertex_count());
    for (const auto& e : g.edges()) out.add_edge(e.src, e.dst);
    return out;
}

Partition::Partition(std::vector<std::uint32_t> assignment) : assignment_(std::move(assignment)) {
    if (assignment_.empty()) return;
    std::uint32_t max_label = *std::max_element(assignment_.begin(), assignment_.end());
    std::vector<bool> used(max_label + 1, false);
    for (auto b : assignment_) used[b] = true;
    if (std::find(used.begin(), used.end(), false) != used.end())
        throw InputError("partition block ids are not contiguous");
    block_count_ = max_label + 1;
}

Partition Partition::from_labels(std::span<const std::int64_t> labels) {
    std::unordered_map<std::int64_t, std::uint32_t> relabel;
    std::vector<std::uint32_t> assignment;
    assignment.reserve(labels.size());
    for (auto label : labels) {
        auto [it, _] = relabel.emplace(label, static_cast<std::uint32_t>(relabel.size()));
        assignment.push_back(it->second);
    }
    return Partition(std::move(assignment));
}

std::vector<std::size_t> Partition::block_sizes() const {
    std::vector<std::size_t> sizes(block_count_, 0);
    for (auto b : assignment_) ++sizes[b];
    return sizes;
}

void write_edge_csv(std::ostream& out, const WeightedDigraph& g) {
    out << "src,dst,weight\n";
    for (const auto& e : g.edges())
        out << csv::quote(g.name(e.src)) << ',' << csv::quote(g.name(e.dst)) << ',' << e.weight << '\n';
}

WeightedDigraph read_edge_csv(std::istream& in) {
    csv::Reader reader(in);
    auto header = reader.header();
    const auto src_col = csv::column(header, "src");
    const auto dst_col = csv::column(header, "dst");
    const auto weight_col = csv::column(header, "weight");
    GraphBuilder builder;
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() != header.size())
            throw InputError("line " + std::to_string(reader.line()) + ": expected " +
                             std::to_string(header.size()) + " fields");
        Weight w = 0;
        try {
            w = std::stoll(row[weight_col]);
        } catch (const std::exception&) {
            throw InputError("line " + std::to_string(reader.line()) + ": bad weight '" + row[weight_col] + "'");
        }
        builder.add_edge(row[src_col], row[dst_col], w);
    }
    return std::move(builder).build();
}

void write_graphml(std::ostream& out, const WeightedDigraph& g) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
           "  <key id=\"w\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
           "  <graph id=\"G\" edgedefault=\"directed\">\n";
    for (VertexId v = 0; v < g.vertex_count(); ++v) out << "    <node id=\"" << xml_escape(g.name(v)) << "\"/>\n";
    for (const auto& e : g.edges())
        out << "    <edge source=\"" << xml_escape(g.name(e.src)) << "\" target=\"" << xml_escape(g.name(e.dst))
            << "\"><data key=\"w\">" << e.weight << "</data></edge>\n";
    out << "  </graph>\n</graphml>\n";
}

void write_collapsed_csv(std::ostream& out, const CollapsedGraph& g) {
    out << "org_a,org_b\n";
    for (const auto& [a, b] : g.edges)
        out << csv::quote(g.organizations[a]) << ',' << csv::quote(g.organizations[b]) << '\n';
}

}  // namespace stratanet
