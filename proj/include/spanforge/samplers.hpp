#ifndef SPANFORGE_SAMPLERS_HPP
#define SPANFORGE_SAMPLERS_HPP

#include <spanforge/best.hpp>
#include <spanforge/enumerate.hpp>
#include <spanforge/graph.hpp>
#include <spanforge/random.hpp>
#include <spanforge/tree_ops.hpp>
#include <spanforge/walks.hpp>

#include <map>
#include <vector>

namespace spanforge {

/// Probability mass over canonical keys.
template <class Key, class Scalar>
struct Distribution {
    std::map<Key, Scalar> mass;

    void add(const Key& key, const Scalar& value) {
        auto [it, inserted] = mass.try_emplace(key, value);
        if (!inserted) it->second += value;
    }

    Scalar total() const {
        Scalar sum(0);
        for (const auto& [k, v] : mass) sum += v;
        return sum;
    }

    Scalar at(const Key& key) const {
        auto it = mass.find(key);
        return it == mass.end() ? Scalar(0) : it->second;
    }

    void normalize() {
        Scalar sum = total();
        for (auto& [k, v] : mass) v /= sum;
    }

    bool operator==(const Distribution&) const = default;
};

template <class Scalar>
using TreeDistribution = Distribution<TreeKey, Scalar>;
template <class Scalar>
using ArborescenceDistribution = Distribution<ArcKey, Scalar>;

struct SampledTree {
    TreeEdges tree;
    std::uint64_t steps = 0;
};

struct SampledArborescence {
    Arborescence tree;
    std::uint64_t steps = 0;
};

/// First-entrance tree of the walk stopped at the cover time.
inline SampledTree aldous_broder(const WeightedGraph& g, VertexId start, Rng& rng,
                                 std::uint64_t step_cap = default_step_cap()) {
    Path walk = simulate_walk(g, start, stop::CoverTime{}, rng, step_cap);
    return {first_entrance_tree(walk), walk.length()};
}

/// Last-exit tree of the walk stopped at the cover time. The last-exit
/// tree is not monotone in time, so it is read off the stored walk in one
/// backward pass at the stopping time.
inline SampledTree reverse_aldous_broder(const WeightedGraph& g, VertexId start, Rng& rng,
                                         std::uint64_t step_cap = default_step_cap()) {
    Path walk = simulate_walk(g, start, stop::CoverTime{}, rng, step_cap);
    return {last_exit_tree(walk), walk.length()};
}

/// Attaches loop-erased walks from vertices outside the current tree,
/// taken in id order, starting from {root}. Arcs point toward the root.
inline SampledTree wilson(const WeightedGraph& g, VertexId root, Rng& rng, std::uint64_t step_cap = default_step_cap()) {
    const std::size_t n = g.vertex_count();
    if (root >= n) throw GraphError(GraphErrc::unknown_vertex, "root id " + std::to_string(root));
    std::vector<bool> in_tree(n, false);
    in_tree[root] = true;
    SampledTree out;
    out.tree.vertices.resize(n);
    std::iota(out.tree.vertices.begin(), out.tree.vertices.end(), VertexId{0});
    for (VertexId u = 0; u < n; ++u) {
        if (in_tree[u]) continue;
        std::vector<VertexId> walk{u};
        VertexId at = u;
        while (!in_tree[at]) {
            if (out.steps >= step_cap) throw StepCapExceeded(step_cap);
            at = g.sample_neighbor(at, rng.uniform());
            walk.push_back(at);
            ++out.steps;
        }
        Path branch = loop_erase(Path(std::move(walk)));
        for (std::size_t k = 0; k < branch.length(); ++k) {
            in_tree[branch[k]] = true;
            out.tree.arcs.push_back({branch[k], branch[k + 1]});
        }
    }
    return out;
}

/// First-entrance arborescence (away from `start`) of the chain stopped at
/// its cover time.
inline SampledArborescence directed_aldous_broder(const MarkovChain& mc, VertexId start, Rng& rng,
                                                  std::uint64_t step_cap = default_step_cap()) {
    if (start >= mc.size()) throw GraphError(GraphErrc::unknown_vertex, "state " + std::to_string(start));
    Path walk = chain_walk_to_cover(mc, start, rng, step_cap);
    TreeEdges f = first_entrance_tree(walk);
    return {Arborescence{start, Direction::away_from_root, f.arcs}, walk.length()};
}

/// Wilson's iteration with loop-erased chain trajectories; the arborescence
/// points toward `root`.
inline SampledArborescence directed_wilson(const MarkovChain& mc, VertexId root, Rng& rng,
                                           std::uint64_t step_cap = default_step_cap()) {
    const std::size_t n = mc.size();
    if (root >= n) throw GraphError(GraphErrc::unknown_vertex, "state " + std::to_string(root));
    std::vector<bool> in_tree(n, false);
    in_tree[root] = true;
    SampledArborescence out{Arborescence{root, Direction::toward_root, {}}, 0};
    for (VertexId u = 0; u < n; ++u) {
        if (in_tree[u]) continue;
        Path walk = chain_walk_to_set(mc, u, in_tree, rng, step_cap);
        out.steps += walk.length();
        Path branch = loop_erase(walk);
        for (std::size_t k = 0; k < branch.length(); ++k) {
            in_tree[branch[k]] = true;
            out.tree.arcs.push_back({branch[k], branch[k + 1]});
        }
    }
    return out;
}

/// Weighted UST: mass proportional to the product of edge weights, exact.
inline TreeDistribution<Rational> exact_ust_distribution(const WeightedGraph& g, std::size_t cap = 1'000'000) {
    TreeDistribution<Rational> law;
    for (const TreeEdges& t : enumerate_spanning_trees(g, cap)) {
        Rational product = 1;
        for (const Arc& a : t.arcs) product *= g.weight(a.tail, a.head);
        law.add(t.key(), product);
    }
    if (law.total() != weighted_tree_sum(g))
        throw std::logic_error("spanning tree weights disagree with the weighted matrix-tree determinant");
    law.normalize();
    return law;
}

/// Target of directed Aldous-Broder from `start`: mass proportional to
/// prod over arcs e of the reversed chain's p<-(-e).
inline ArborescenceDistribution<double> exact_directed_ab_law(const MarkovChain& mc, VertexId start) {
    const auto& pi = mc.stationary();
    ArborescenceDistribution<double> law;
    for (const Arborescence& t : chain_arborescences(mc, start, Direction::away_from_root)) {
        double weight = 1.0;
        for (const Arc& a : t.arcs) weight *= pi[a.tail] * mc.p(a.tail, a.head) / pi[a.head];
        law.add(t.key(), weight);
    }
    law.normalize();
    return law;
}

/// Arborescence measure toward `root`: mass proportional to prod p(e).
inline ArborescenceDistribution<double> exact_directed_ust_law(const MarkovChain& mc, VertexId root) {
    ArborescenceDistribution<double> law;
    for (const Arborescence& t : chain_arborescences(mc, root, Direction::toward_root))
        law.add(t.key(), arc_product(mc, t.arcs));
    law.normalize();
    return law;
}

}  // namespace spanforge

#endif
