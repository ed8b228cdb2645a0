#ifndef SPANFORGE_ENUMERATE_HPP
#define SPANFORGE_ENUMERATE_HPP

#include <spanforge/best.hpp>
#include <spanforge/graph.hpp>
#include <spanforge/tree_ops.hpp>
#include <spanforge/walks.hpp>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spanforge {

inline constexpr std::size_t kDefaultPathCap = 10'000'000;

/// Calls `visit(vertices, probability)` for every length-`n` walk from `x`,
/// in lexicographic order of vertex ids. Exact probabilities.
template <class Visitor>
void for_each_path(const WeightedGraph& g, VertexId x, std::size_t n, Visitor&& visit,
                   std::size_t cap = kDefaultPathCap) {
    if (x >= g.vertex_count()) throw GraphError(GraphErrc::unknown_vertex, "vertex id " + std::to_string(x));
    std::vector<VertexId> trail{x};
    std::vector<Rational> mass{Rational(1)};
    std::size_t produced = 0;
    auto recurse = [&](auto&& self) -> void {
        if (trail.size() == n + 1) {
            if (++produced > cap) throw CapExceeded("path enumeration exceeded cap " + std::to_string(cap));
            visit(static_cast<const std::vector<VertexId>&>(trail), static_cast<const Rational&>(mass.back()));
            return;
        }
        VertexId at = trail.back();
        for (const auto& nb : g.neighbors(at)) {
            trail.push_back(nb.vertex);
            mass.push_back(mass.back() * transition_prob<Rational>(g, at, nb.vertex));
            self(self);
            mass.pop_back();
            trail.pop_back();
        }
    };
    recurse(recurse);
}

/// All paths of length n from x (to y, when given) with exact probabilities.
struct PathEnsemble {
    VertexId start = 0;
    std::optional<VertexId> end;
    std::size_t length = 0;
    std::vector<Path> paths;
    std::vector<Rational> probabilities;

    Rational total() const {
        Rational sum = 0;
        for (const auto& p : probabilities) sum += p;
        return sum;
    }
    std::size_t size() const { return paths.size(); }
};

inline PathEnsemble enumerate_paths(const WeightedGraph& g, VertexId x, std::optional<VertexId> y, std::size_t n,
                                    std::size_t cap = kDefaultPathCap) {
    PathEnsemble out{x, y, n, {}, {}};
    for_each_path(
        g, x, n,
        [&](const std::vector<VertexId>& vs, const Rational& p) {
            if (y && vs.back() != *y) return;
            out.paths.emplace_back(vs);
            out.probabilities.push_back(p);
        },
        cap);
    return out;
}

/// Every spanning tree of g in canonical (key) order. The count is checked
/// against the matrix-tree determinant.
inline std::vector<TreeEdges> enumerate_spanning_trees(const WeightedGraph& g, std::size_t cap = 1'000'000) {
    const std::size_t n = g.vertex_count();
    const std::size_t m = g.edge_count();
    std::vector<VertexId> all(n);
    std::iota(all.begin(), all.end(), VertexId{0});
    std::vector<TreeEdges> out;
    std::vector<std::size_t> chosen;
    std::size_t nodes = 0;
    auto recurse = [&](auto&& self, std::size_t next, detail::DisjointSets sets) -> void {
        if (++nodes > cap * 64) throw CapExceeded("spanning tree search exceeded cap");
        if (chosen.size() + 1 == n) {
            if (out.size() >= cap) throw CapExceeded("spanning tree enumeration exceeded cap " + std::to_string(cap));
            TreeEdges t;
            t.vertices = all;
            for (std::size_t e : chosen) t.arcs.push_back({g.edges()[e].u, g.edges()[e].v});
            out.push_back(std::move(t));
            return;
        }
        if (m - next < n - 1 - chosen.size()) return;
        const auto& e = g.edges()[next];
        detail::DisjointSets with = sets;
        if (with.unite(e.u, e.v)) {
            chosen.push_back(next);
            self(self, next + 1, std::move(with));
            chosen.pop_back();
        }
        self(self, next + 1, std::move(sets));
    };
    if (n == 1) {
        out.push_back(TreeEdges{all, {}});
    } else {
        recurse(recurse, 0, detail::DisjointSets(n));
    }
    std::sort(out.begin(), out.end(), [](const TreeEdges& a, const TreeEdges& b) { return a.key() < b.key(); });
    if (BigInt(static_cast<unsigned long>(out.size())) != count_spanning_trees(g))
        throw std::logic_error("spanning tree enumeration disagrees with the matrix-tree determinant");
    return out;
}

}  // namespace spanforge

#endif
