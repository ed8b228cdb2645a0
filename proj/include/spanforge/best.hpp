#ifndef SPANFORGE_BEST_HPP
#define SPANFORGE_BEST_HPP

#include <spanforge/graph.hpp>
#include <spanforge/linalg.hpp>
#include <spanforge/tree_ops.hpp>
#include <spanforge/walks.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spanforge {

class BestError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::map<VertexId, std::size_t> index_of(const std::vector<VertexId>& vertices) {
    std::map<VertexId, std::size_t> out;
    for (std::size_t i = 0; i < vertices.size(); ++i) out[vertices[i]] = i;
    return out;
}

inline void require_balanced(const MultiDigraph& d) {
    if (!d.start() || !d.end()) throw BestError("digraph needs start and end marks");
    if (auto v = d.balance_violation())
        throw BestError("unbalanced at vertex " + std::to_string(*v) + " (outdeg " + std::to_string(d.outdeg(*v)) +
                        ", indeg " + std::to_string(d.indeg(*v)) + ")");
}

}  // namespace detail

/// t_root(D) by the directed matrix-tree theorem: the Laplacian (in-degree
/// for arborescences away from the root, out-degree toward it) with the
/// root's row and column deleted.
inline BigInt count_arborescences(const MultiDigraph& d, VertexId root, Direction direction) {
    const auto& vs = d.vertices();
    if (!d.contains(root)) return 0;
    auto index = detail::index_of(vs);
    const std::size_t n = vs.size();
    DenseMatrix<BigInt> lap(n, std::vector<BigInt>(n, 0));
    for (const Arc& a : d.arcs()) {
        if (a.tail == a.head) continue;
        std::size_t i = index[a.tail];
        std::size_t j = index[a.head];
        lap[i][j] -= 1;
        if (direction == Direction::away_from_root)
            lap[j][j] += 1;
        else
            lap[i][i] += 1;
    }
    std::size_t r = index[root];
    DenseMatrix<BigInt> minor;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == r) continue;
        std::vector<BigInt> row;
        for (std::size_t j = 0; j < n; ++j)
            if (j != r) row.push_back(lap[i][j]);
        minor.push_back(std::move(row));
    }
    return determinant(std::move(minor));
}

/// Explicit arborescences as sorted arc-index sets; parallel arcs give
/// distinct arborescences.
inline std::vector<std::vector<std::size_t>> enumerate_arborescences(const MultiDigraph& d, VertexId root,
                                                                     Direction direction,
                                                                     std::size_t cap = 1'000'000) {
    std::vector<std::vector<std::size_t>> out;
    if (!d.contains(root)) return out;
    std::vector<VertexId> others;
    for (VertexId v : d.vertices())
        if (v != root) others.push_back(v);
    std::vector<std::vector<std::size_t>> candidates(others.size());
    for (std::size_t i = 0; i < others.size(); ++i)
        for (std::size_t e = 0; e < d.arcs().size(); ++e) {
            const Arc& a = d.arcs()[e];
            if (a.tail == a.head) continue;
            VertexId child = direction == Direction::away_from_root ? a.head : a.tail;
            if (child == others[i]) candidates[i].push_back(e);
        }

    std::vector<std::size_t> chosen(others.size());
    std::map<VertexId, VertexId> parent;
    std::size_t visited = 0;
    auto reaches_root = [&]() {
        for (VertexId v : others) {
            VertexId at = v;
            for (std::size_t hops = 0; at != root; ++hops) {
                if (hops > others.size()) return false;
                at = parent[at];
            }
        }
        return true;
    };
    auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (++visited > cap) throw CapExceeded("arborescence enumeration exceeded cap " + std::to_string(cap));
        if (i == others.size()) {
            if (reaches_root()) {
                std::vector<std::size_t> arcs(chosen);
                std::sort(arcs.begin(), arcs.end());
                out.push_back(std::move(arcs));
            }
            return;
        }
        for (std::size_t e : candidates[i]) {
            const Arc& a = d.arcs()[e];
            chosen[i] = e;
            parent[others[i]] = direction == Direction::away_from_root ? a.tail : a.head;
            self(self, i + 1);
        }
    };
    recurse(recurse, 0);
    std::sort(out.begin(), out.end());
    return out;
}

/// Eulerian paths per fixed first-entrance arborescence:
/// indeg(x)! * prod_{v != x} (indeg(v) - 1)!. At indeg(x) >= 1 this is
/// indeg(x) * prod_v (indeg(v) - 1)!; it stays defined at indeg(x) = 0.
inline BigInt eulerian_paths_per_arborescence(const MultiDigraph& d) {
    detail::require_balanced(d);
    const VertexId x = *d.start();
    BigInt out = factorial(d.indeg(x));
    for (VertexId v : d.vertices()) {
        if (v == x) continue;
        if (d.indeg(v) == 0) return 0;
        out *= factorial(d.indeg(v) - 1);
    }
    return out;
}

/// Number of Eulerian paths whose first-entrance arcs are exactly
/// `arborescence` (arc indices of d, directed away from the start).
inline BigInt count_eulerian_for_arborescence(const MultiDigraph& d, std::span<const std::size_t> arborescence) {
    detail::require_balanced(d);
    std::vector<Arc> arcs;
    for (std::size_t e : arborescence) {
        if (e >= d.arcs().size()) throw BestError("arborescence names a missing arc");
        arcs.push_back(d.arcs()[e]);
    }
    if (!is_arborescence(d.vertices(), *d.start(), Direction::away_from_root, arcs))
        throw BestError("not an arborescence of the digraph rooted at the start");
    return eulerian_paths_per_arborescence(d);
}

/// t_x(D) * indeg(x)! * prod_{v != x} (indeg(v) - 1)!.
inline BigInt count_eulerian_total(const MultiDigraph& d) {
    detail::require_balanced(d);
    return count_arborescences(d, *d.start(), Direction::away_from_root) * eulerian_paths_per_arborescence(d);
}

/// Brute-force list of all Eulerian paths start -> end as arc-index
/// sequences, in lexicographic order.
inline std::vector<std::vector<std::size_t>> enumerate_eulerian_paths(const MultiDigraph& d, std::size_t edge_cap = 12) {
    if (!d.start() || !d.end()) throw BestError("digraph needs start and end marks");
    if (d.arcs().size() > edge_cap)
        throw CapExceeded("Eulerian enumeration: " + std::to_string(d.arcs().size()) + " edges exceeds cap " +
                          std::to_string(edge_cap));
    std::vector<std::vector<std::size_t>> out_arcs(d.universe());
    for (std::size_t e = 0; e < d.arcs().size(); ++e) out_arcs[d.arcs()[e].tail].push_back(e);
    std::vector<std::vector<std::size_t>> paths;
    std::vector<bool> used(d.arcs().size(), false);
    std::vector<std::size_t> trail;
    auto recurse = [&](auto&& self, VertexId at) -> void {
        if (trail.size() == d.arcs().size()) {
            if (at == *d.end()) paths.push_back(trail);
            return;
        }
        for (std::size_t e : out_arcs[at]) {
            if (used[e]) continue;
            used[e] = true;
            trail.push_back(e);
            self(self, d.arcs()[e].head);
            trail.pop_back();
            used[e] = false;
        }
    };
    recurse(recurse, *d.start());
    return paths;
}

/// First-entrance arcs of an Eulerian trail, as sorted arc indices.
inline std::vector<std::size_t> first_entrance_arcs(const MultiDigraph& d, std::span<const std::size_t> trail) {
    std::vector<bool> seen(d.universe(), false);
    seen[*d.start()] = true;
    std::vector<std::size_t> out;
    for (std::size_t e : trail) {
        VertexId h = d.arcs()[e].head;
        if (!seen[h]) {
            seen[h] = true;
            out.push_back(e);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Number of spanning trees by the undirected matrix-tree theorem.
inline BigInt count_spanning_trees(const WeightedGraph& g) {
    const std::size_t n = g.vertex_count();
    DenseMatrix<BigInt> minor(n - 1, std::vector<BigInt>(n - 1, 0));
    for (const auto& e : g.edges()) {
        auto add = [&](VertexId i, VertexId j, long value) {
            if (i == 0 || j == 0) return;
            minor[i - 1][j - 1] += value;
        };
        add(e.u, e.u, 1);
        add(e.v, e.v, 1);
        add(e.u, e.v, -1);
        add(e.v, e.u, -1);
    }
    return determinant(std::move(minor));
}

/// Sum over spanning trees of the product of edge weights (weighted
/// matrix-tree theorem), exact.
inline Rational weighted_tree_sum(const WeightedGraph& g) {
    const std::size_t n = g.vertex_count();
    DenseMatrix<Rational> minor(n - 1, std::vector<Rational>(n - 1, Rational(0)));
    for (const auto& e : g.edges()) {
        auto add = [&](VertexId i, VertexId j, const Rational& value) {
            if (i == 0 || j == 0) return;
            minor[i - 1][j - 1] += value;
        };
        add(e.u, e.u, e.weight);
        add(e.v, e.v, e.weight);
        add(e.u, e.v, -e.weight);
        add(e.v, e.u, -e.weight);
    }
    return determinant(std::move(minor));
}

/// Positive-transition digraph of a chain (no self-loops).
inline MultiDigraph chain_digraph(const MarkovChain& mc) {
    std::vector<Arc> arcs;
    for (VertexId u = 0; u < mc.size(); ++u)
        for (VertexId v : mc.successors(u))
            if (u != v) arcs.push_back({u, v});
    return MultiDigraph(mc.size(), std::move(arcs));
}

/// All arborescences of the chain's digraph rooted at `root`.
inline std::vector<Arborescence> chain_arborescences(const MarkovChain& mc, VertexId root, Direction direction,
                                                     std::size_t cap = 1'000'000) {
    MultiDigraph d = chain_digraph(mc);
    std::vector<Arborescence> out;
    for (const auto& arcs : enumerate_arborescences(d, root, direction, cap)) {
        Arborescence t{root, direction, {}};
        for (std::size_t e : arcs) t.arcs.push_back(d.arcs()[e]);
        out.push_back(std::move(t));
    }
    return out;
}

inline double arc_product(const MarkovChain& mc, const std::vector<Arc>& arcs) {
    double out = 1.0;
    for (const Arc& a : arcs) out *= mc.p(a.tail, a.head);
    return out;
}

inline constexpr std::size_t kMaxEnumeratedStates = 9;

/// pi(x) proportional to the sum over arborescences toward x of prod p(e).
inline std::vector<double> stationary_from_arborescences(const MarkovChain& mc) {
    if (mc.size() > kMaxEnumeratedStates)
        throw CapExceeded("arborescence enumeration limited to " + std::to_string(kMaxEnumeratedStates) + " states");
    std::vector<double> out(mc.size(), 0.0);
    double total = 0.0;
    for (VertexId x = 0; x < mc.size(); ++x) {
        for (const Arborescence& t : chain_arborescences(mc, x, Direction::toward_root)) out[x] += arc_product(mc, t.arcs);
        total += out[x];
    }
    for (double& v : out) v /= total;
    return out;
}

/// Expected visits to `a` strictly before hitting `forbidden`, started at
/// `a`, by Cramer's rule: det(I - P)[Z + a] / det(I - P)[Z].
inline double green_diag(const MarkovChain& mc, const std::vector<VertexId>& forbidden, VertexId a) {
    if (a >= mc.size()) throw GraphError(GraphErrc::unknown_vertex, "state " + std::to_string(a));
    if (forbidden.empty()) throw std::invalid_argument("green_diag: empty forbidden set diverges on a recurrent chain");
    std::vector<bool> deleted(mc.size(), false);
    for (VertexId z : forbidden) {
        if (z >= mc.size()) throw GraphError(GraphErrc::unknown_vertex, "state " + std::to_string(z));
        if (z == a) throw std::invalid_argument("green_diag: start state lies in the forbidden set");
        deleted[z] = true;
    }
    std::vector<std::size_t> keep_z;
    std::vector<std::size_t> keep_za;
    for (std::size_t v = 0; v < mc.size(); ++v) {
        if (deleted[v]) continue;
        keep_z.push_back(v);
        if (v != a) keep_za.push_back(v);
    }
    Eigen::MatrixXd lap = mc.laplacian();
    double denominator = determinant(principal_submatrix(lap, keep_z));
    if (!(std::abs(denominator) > 1e-300)) throw std::invalid_argument("green_diag: forbidden set unreachable");
    return determinant(principal_submatrix(lap, keep_za)) / denominator;
}

using PathLaw = std::map<Path, double>;

/// Self-avoiding directed paths from -> to in the chain's digraph.
inline std::vector<Path> self_avoiding_paths(const MarkovChain& mc, VertexId from, VertexId to) {
    if (mc.size() > kMaxEnumeratedStates)
        throw CapExceeded("self-avoiding path enumeration limited to " + std::to_string(kMaxEnumeratedStates) + " states");
    std::vector<Path> out;
    std::vector<bool> on(mc.size(), false);
    std::vector<VertexId> trail{from};
    on[from] = true;
    auto recurse = [&](auto&& self, VertexId at) -> void {
        if (at == to) {
            out.emplace_back(trail);
            return;
        }
        for (VertexId v : mc.successors(at)) {
            if (on[v]) continue;
            on[v] = true;
            trail.push_back(v);
            self(self, v);
            trail.pop_back();
            on[v] = false;
        }
    };
    recurse(recurse, from);
    return out;
}

/// Law of the loop-erased walk from y to x:
/// prod p(w_{j-1}, w_j) * prod_{j<k} G_{A_{j-1} + x}(w_j, w_j).
inline PathLaw lerw_law_exact(const MarkovChain& mc, VertexId y, VertexId x) {
    if (x == y) throw std::invalid_argument("lerw_law_exact: endpoints must differ");
    PathLaw law;
    for (const Path& w : self_avoiding_paths(mc, y, x)) {
        double mass = 1.0;
        std::vector<VertexId> forbidden{x};
        for (std::size_t j = 0; j < w.length(); ++j) {
            mass *= mc.p(w[j], w[j + 1]);
            mass *= green_diag(mc, forbidden, w[j]);
            forbidden.push_back(w[j]);
        }
        law[w] = mass;
    }
    return law;
}

/// Law of the tree path y -> x under the arborescence measure toward x:
/// pi(y)/pi(x) * prod p(w_{j-1}, w_j) * prod_{j>=1} G_{A_{j-1}}(w_j, w_j).
inline PathLaw ust_path_law_exact(const MarkovChain& mc, VertexId y, VertexId x) {
    if (x == y) throw std::invalid_argument("ust_path_law_exact: endpoints must differ");
    const auto& pi = mc.stationary();
    PathLaw law;
    for (const Path& w : self_avoiding_paths(mc, y, x)) {
        double mass = pi[y] / pi[x];
        std::vector<VertexId> prefix{w[0]};
        for (std::size_t j = 1; j <= w.length(); ++j) {
            mass *= mc.p(w[j - 1], w[j]);
            mass *= green_diag(mc, prefix, w[j]);
            prefix.push_back(w[j]);
        }
        law[w] = mass;
    }
    return law;
}

inline PathLaw lerw_law_exact(const WeightedGraph& g, VertexId y, VertexId x) {
    return lerw_law_exact(MarkovChain::from_graph(g), y, x);
}

/// pi(v) / det(I - P)[v]; independent of v.
inline double stationary_minor_ratio(const MarkovChain& mc, VertexId v) {
    std::vector<std::size_t> keep;
    for (std::size_t u = 0; u < mc.size(); ++u)
        if (u != v) keep.push_back(u);
    return mc.stationary()[v] / determinant(principal_submatrix(mc.laplacian(), keep));
}

}  // namespace spanforge

#endif
