#ifndef SPANFORGE_TREE_OPS_HPP
#define SPANFORGE_TREE_OPS_HPP

#include <spanforge/graph.hpp>
#include <spanforge/walks.hpp>

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spanforge {

/// Canonical key of an undirected tree: sorted (min, max) pairs.
using TreeKey = std::vector<UEdge>;
/// Canonical key of a directed tree: sorted arcs.
using ArcKey = std::vector<Arc>;

/// Subtree of the base graph, possibly with orientations.
struct TreeEdges {
    std::vector<VertexId> vertices;  // sorted
    std::vector<Arc> arcs;

    TreeKey key() const {
        TreeKey out;
        out.reserve(arcs.size());
        for (const Arc& a : arcs) out.push_back(unoriented(a));
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Equality as unoriented trees on the same vertex set.
    bool same_tree(const TreeEdges& other) const { return vertices == other.vertices && key() == other.key(); }
};

namespace detail {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
    std::vector<std::size_t> parent;
};

}  // namespace detail

/// Acyclic and connected on exactly `vertices`.
inline bool is_tree_on(const std::vector<VertexId>& vertices, const TreeKey& edges) {
    if (vertices.empty()) return edges.empty();
    if (edges.size() + 1 != vertices.size()) return false;
    auto index = [&](VertexId v) -> std::optional<std::size_t> {
        auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
        if (it == vertices.end() || *it != v) return std::nullopt;
        return static_cast<std::size_t>(it - vertices.begin());
    };
    detail::DisjointSets sets(vertices.size());
    for (const UEdge& e : edges) {
        auto a = index(e.first);
        auto b = index(e.second);
        if (!a || !b || !sets.unite(*a, *b)) return false;
    }
    return true;
}

/// F(gamma): first-entrance edges, oriented away from the start.
inline TreeEdges first_entrance_tree(const Path& path) {
    TreeEdges out;
    out.vertices = path.vertex_set();
    std::vector<VertexId> seen{path.start()};
    for (std::size_t i = 1; i <= path.length(); ++i) {
        VertexId v = path[i];
        if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
            seen.push_back(v);
            out.arcs.push_back({path[i - 1], v});
        }
    }
    return out;
}

/// L(gamma): last-exit edges, oriented toward the end. One backward pass.
inline TreeEdges last_exit_tree(const Path& path) {
    TreeEdges out;
    out.vertices = path.vertex_set();
    std::vector<VertexId> seen{path.end()};
    for (std::size_t i = path.length(); i-- > 0;) {
        VertexId v = path[i];
        if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
            seen.push_back(v);
            out.arcs.push_back({v, path[i + 1]});
        }
    }
    std::reverse(out.arcs.begin(), out.arcs.end());
    return out;
}

enum class Direction { away_from_root, toward_root };

/// Directed spanning tree of its vertex set.
struct Arborescence {
    VertexId root = 0;
    Direction direction = Direction::away_from_root;
    std::vector<Arc> arcs;

    ArcKey key() const {
        ArcKey out(arcs);
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Every vertex of `vertices` other than the root has exactly one parent
/// arc and reaches the root.
inline bool is_arborescence(const std::vector<VertexId>& vertices, VertexId root, Direction direction,
                            const std::vector<Arc>& arcs) {
    if (!std::binary_search(vertices.begin(), vertices.end(), root)) return false;
    if (arcs.size() + 1 != vertices.size()) return false;
    std::map<VertexId, VertexId> parent;
    for (const Arc& a : arcs) {
        VertexId child = direction == Direction::away_from_root ? a.head : a.tail;
        VertexId up = direction == Direction::away_from_root ? a.tail : a.head;
        if (child == root || !std::binary_search(vertices.begin(), vertices.end(), child) ||
            !std::binary_search(vertices.begin(), vertices.end(), up))
            return false;
        if (!parent.emplace(child, up).second) return false;
    }
    for (VertexId v : vertices) {
        VertexId at = v;
        for (std::size_t hops = 0; at != root; ++hops) {
            if (hops > vertices.size()) return false;
            at = parent.at(at);
        }
    }
    return true;
}

enum class Coloring { exit, entrance };

class TreeOpsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Start/end-marked multi-digraph with a linear order on Out(v) (exit
/// coloring) or In(v) (entrance coloring) at every vertex. Orders run
/// lightest to darkest; the darkest edge is black except out of the end
/// (exit) or into the start (entrance).
class ColoredMultiDigraph {
public:
    ColoredMultiDigraph(std::size_t universe, std::vector<Arc> arcs, VertexId start, VertexId end, Coloring coloring,
                        std::vector<std::vector<std::size_t>> order)
        : universe_(universe),
          arcs_(std::move(arcs)),
          start_(start),
          end_(end),
          coloring_(coloring),
          order_(std::move(order)) {
        if (order_.size() != universe_) throw TreeOpsError("order table must cover the vertex universe");
        if (start_ >= universe_ || end_ >= universe_) throw TreeOpsError("start/end outside universe");
        std::vector<bool> present(universe_, false);
        present[start_] = present[end_] = true;
        for (const Arc& a : arcs_) {
            if (a.tail >= universe_ || a.head >= universe_) throw TreeOpsError("arc endpoint outside universe");
            present[a.tail] = present[a.head] = true;
        }
        for (VertexId v = 0; v < universe_; ++v)
            if (present[v]) vertices_.push_back(v);
    }

    std::size_t universe() const { return universe_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    std::size_t edge_count() const { return arcs_.size(); }
    VertexId start() const { return start_; }
    VertexId end() const { return end_; }
    Coloring coloring() const { return coloring_; }
    const std::vector<VertexId>& vertices() const { return vertices_; }
    const std::vector<std::size_t>& order(VertexId v) const { return order_.at(v); }

    std::optional<std::size_t> black(VertexId v) const {
        const auto& o = order_.at(v);
        if (o.empty()) return std::nullopt;
        if (coloring_ == Coloring::exit && v == end_) return std::nullopt;
        if (coloring_ == Coloring::entrance && v == start_) return std::nullopt;
        return o.back();
    }

    std::vector<std::size_t> black_edges() const {
        std::vector<std::size_t> out;
        for (VertexId v : vertices_)
            if (auto b = black(v)) out.push_back(*b);
        std::sort(out.begin(), out.end());
        return out;
    }

    TreeEdges black_tree() const {
        TreeEdges out;
        out.vertices = vertices_;
        for (std::size_t e : black_edges()) out.arcs.push_back(arcs_[e]);
        return out;
    }

    MultiDigraph digraph() const { return MultiDigraph(universe_, arcs_, start_, end_); }

    /// Per-vertex ordered sequence of opposite endpoints. Two structures
    /// are equal iff these agree; parallel edges are interchangeable.
    std::vector<std::vector<VertexId>> canonical() const {
        std::vector<std::vector<VertexId>> out(universe_);
        for (VertexId v = 0; v < universe_; ++v)
            for (std::size_t e : order_[v])
                out[v].push_back(coloring_ == Coloring::exit ? arcs_[e].head : arcs_[e].tail);
        return out;
    }

    bool operator==(const ColoredMultiDigraph& other) const {
        return universe_ == other.universe_ && start_ == other.start_ && end_ == other.end_ &&
               coloring_ == other.coloring_ && arcs_.size() == other.arcs_.size() && canonical() == other.canonical();
    }

private:
    std::size_t universe_;
    std::vector<Arc> arcs_;
    VertexId start_;
    VertexId end_;
    Coloring coloring_;
    std::vector<std::vector<std::size_t>> order_;
    std::vector<VertexId> vertices_;
};

struct PropertyReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Membership test for the encoding spaces: vertex set, edge count and
/// orientation, balance, coloring, and the black spanning tree.
inline PropertyReport check_properties(const ColoredMultiDigraph& cmd, const WeightedGraph* graph = nullptr,
                                       std::optional<std::size_t> expected_edges = std::nullopt) {
    PropertyReport report;
    auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };
    const VertexId x = cmd.start();
    const VertexId y = cmd.end();

    if (graph && cmd.universe() > graph->vertex_count()) fail("vertex-set: vertices outside the base graph");

    if (expected_edges && cmd.edge_count() != *expected_edges)
        fail("edge-count: " + std::to_string(cmd.edge_count()) + " edges, expected " + std::to_string(*expected_edges));
    if (graph) {
        for (const Arc& a : cmd.arcs())
            if (a.tail >= graph->vertex_count() || a.head >= graph->vertex_count() || !graph->adjacent(a.tail, a.head)) {
                fail("edge-orientation: arc " + std::to_string(a.tail) + "->" + std::to_string(a.head) +
                     " orients no base edge");
                break;
            }
    }

    if (auto v = cmd.digraph().balance_violation()) fail("balance: vertex " + std::to_string(*v));

    std::vector<int> listed(cmd.edge_count(), 0);
    for (VertexId v = 0; v < cmd.universe(); ++v) {
        for (std::size_t e : cmd.order(v)) {
            if (e >= cmd.edge_count()) {
                fail("coloring: order at vertex " + std::to_string(v) + " names a missing edge");
                return report;
            }
            VertexId owner = cmd.coloring() == Coloring::exit ? cmd.arcs()[e].tail : cmd.arcs()[e].head;
            if (owner != v) fail("coloring: edge " + std::to_string(e) + " ordered at the wrong vertex");
            ++listed[e];
        }
    }
    for (std::size_t e = 0; e < listed.size(); ++e)
        if (listed[e] != 1) fail("coloring: edge " + std::to_string(e) + " appears " + std::to_string(listed[e]) + " times");
    if (!report.ok()) return report;

    // Black edges: one per vertex except the root, all leading to the root.
    const VertexId root = cmd.coloring() == Coloring::exit ? y : x;
    for (VertexId v : cmd.vertices()) {
        if (v == root) continue;
        if (!cmd.black(v)) {
            fail("black-tree: vertex " + std::to_string(v) + " has no black edge");
            return report;
        }
    }
    for (VertexId v : cmd.vertices()) {
        VertexId at = v;
        std::size_t hops = 0;
        while (at != root) {
            auto b = cmd.black(at);
            const Arc& a = cmd.arcs()[*b];
            at = cmd.coloring() == Coloring::exit ? a.head : a.tail;
            if (++hops > cmd.vertices().size()) {
                fail("black-tree: cycle through vertex " + std::to_string(v));
                return report;
            }
        }
    }
    return report;
}

namespace detail {

inline std::size_t universe_of(const Path& path) {
    return static_cast<std::size_t>(*std::max_element(path.vertices().begin(), path.vertices().end())) + 1;
}

inline std::vector<Arc> step_arcs(const Path& path) {
    std::vector<Arc> arcs;
    arcs.reserve(path.length());
    for (std::size_t k = 0; k < path.length(); ++k) arcs.push_back({path[k], path[k + 1]});
    return arcs;
}

}  // namespace detail

/// Exit coloring of a path: one arc per step, Out(v) ordered by traversal.
inline ColoredMultiDigraph encode_exit(const Path& path, std::size_t universe = 0) {
    universe = std::max(universe, detail::universe_of(path));
    std::vector<std::vector<std::size_t>> order(universe);
    for (std::size_t k = 0; k < path.length(); ++k) order[path[k]].push_back(k);
    return ColoredMultiDigraph(universe, detail::step_arcs(path), path.start(), path.end(), Coloring::exit,
                               std::move(order));
}

/// Entrance coloring of a path: In(v) ordered by reverse traversal, so the
/// darkest incoming edge is the first entrance.
inline ColoredMultiDigraph encode_entrance(const Path& path, std::size_t universe = 0) {
    universe = std::max(universe, detail::universe_of(path));
    std::vector<std::vector<std::size_t>> order(universe);
    for (std::size_t k = path.length(); k-- > 0;) order[path[k + 1]].push_back(k);
    return ColoredMultiDigraph(universe, detail::step_arcs(path), path.start(), path.end(), Coloring::entrance,
                               std::move(order));
}

/// Reverses every arc and swaps start/end; exit and entrance colorings
/// trade places with the same orders.
inline ColoredMultiDigraph structural_reverse(const ColoredMultiDigraph& cmd) {
    std::vector<Arc> arcs;
    arcs.reserve(cmd.edge_count());
    for (const Arc& a : cmd.arcs()) arcs.push_back(a.reversed());
    std::vector<std::vector<std::size_t>> order(cmd.universe());
    for (VertexId v = 0; v < cmd.universe(); ++v) order[v] = cmd.order(v);
    return ColoredMultiDigraph(cmd.universe(), std::move(arcs), cmd.end(), cmd.start(),
                               cmd.coloring() == Coloring::exit ? Coloring::entrance : Coloring::exit,
                               std::move(order));
}

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Path decode_exit(const ColoredMultiDigraph& cmd) {
    std::vector<std::size_t> next(cmd.universe(), 0);
    std::vector<VertexId> vertices{cmd.start()};
    VertexId at = cmd.start();
    std::size_t used = 0;
    while (next[at] < cmd.order(at).size()) {
        std::size_t e = cmd.order(at)[next[at]++];
        at = cmd.arcs()[e].head;
        vertices.push_back(at);
        ++used;
    }
    if (used != cmd.edge_count())
        throw DecodeError("traversal stopped at vertex " + std::to_string(at) + " after " + std::to_string(used) + " of " +
                          std::to_string(cmd.edge_count()) + " edges; an edge out of the end was never used");
    return Path(std::move(vertices));
}

}  // namespace detail

/// Inverse of encode_exit / encode_entrance. Exit coloring: leave every
/// vertex by its lightest unused edge. Entrance coloring: reverse the
/// structure, decode, and reverse the resulting path.
inline Path decode(const ColoredMultiDigraph& cmd) {
    if (cmd.coloring() == Coloring::exit) return detail::decode_exit(cmd);
    return detail::decode_exit(structural_reverse(cmd)).reversed();
}

/// The reversing map from entrance-colored to exit-colored structures.
/// Every arc flips except the black arcs on the tree path from start to
/// end; In(u) orders carry over to Out(u), with the path arcs swapped in.
inline ColoredMultiDigraph reverse_op(const ColoredMultiDigraph& h) {
    if (h.coloring() != Coloring::entrance) throw TreeOpsError("reverse_op expects an entrance coloring");
    PropertyReport report = check_properties(h);
    if (!report.ok()) throw TreeOpsError("reverse_op input invalid: " + report.violations.front());

    const VertexId x = h.start();
    const VertexId y = h.end();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> path_in(h.universe(), none);
    std::vector<std::size_t> path_out(h.universe(), none);
    std::vector<bool> on_path(h.edge_count(), false);
    for (VertexId at = y; at != x;) {
        std::size_t e = *h.black(at);
        on_path[e] = true;
        path_in[at] = e;
        at = h.arcs()[e].tail;
        path_out[at] = e;
    }

    std::vector<Arc> arcs;
    arcs.reserve(h.edge_count());
    for (std::size_t e = 0; e < h.edge_count(); ++e) arcs.push_back(on_path[e] ? h.arcs()[e] : h.arcs()[e].reversed());

    std::vector<std::vector<std::size_t>> order(h.universe());
    for (VertexId u = 0; u < h.universe(); ++u) {
        order[u] = h.order(u);
        if (path_in[u] != none) order[u].pop_back();
        if (path_out[u] != none) order[u].push_back(path_out[u]);
    }
    return ColoredMultiDigraph(h.universe(), std::move(arcs), x, y, Coloring::exit, std::move(order));
}

/// The measure-preserving path bijection with F = L o phi. For a closed
/// path it is plain reversal.
inline Path phi(const WeightedGraph& g, const Path& path) {
    validate_path(g, path);
    if (path.start() == path.end()) return path.reversed();
    return decode(reverse_op(encode_entrance(path, g.vertex_count())));
}

}  // namespace spanforge

#endif
