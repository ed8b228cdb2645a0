#include <spanforge/batch.hpp>
#include <spanforge/corpus.hpp>
#include <spanforge/oracle.hpp>
#include <spanforge/samplers.hpp>
#include <spanforge/suites.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace spanforge;

namespace {

constexpr double kSignificance = 1e-3;
constexpr std::uint64_t kSamples = 100000;

template <class F>
std::map<TreeKey, std::uint64_t> histogram(std::uint64_t samples, std::uint64_t seed, F draw) {
    std::map<TreeKey, std::uint64_t> out;
    for (std::uint64_t i = 0; i < samples; ++i) {
        Rng rng(Rng::derive_seed(seed, i));
        ++out[draw(rng)];
    }
    return out;
}

TreeKey key(const WeightedGraph& g, std::vector<std::pair<std::string, std::string>> edges) {
    TreeKey k;
    for (auto& [a, b] : edges) k.push_back(unoriented(g.id(a), g.id(b)));
    std::sort(k.begin(), k.end());
    return k;
}

// Target for the weighted triangle by hand: tree weights 2*1, 2*1, 1*1.
TreeDistribution<Rational> weighted_triangle_target(const WeightedGraph& g) {
    TreeDistribution<Rational> law;
    law.add(key(g, {{"a", "b"}, {"b", "c"}}), Rational(2, 5));
    law.add(key(g, {{"a", "b"}, {"c", "a"}}), Rational(2, 5));
    law.add(key(g, {{"b", "c"}, {"c", "a"}}), Rational(1, 5));
    return law;
}

TreeDistribution<Rational> uniform_over(const std::vector<TreeEdges>& trees) {
    TreeDistribution<Rational> law;
    for (const auto& t : trees) law.add(t.key(), Rational(1, static_cast<long>(trees.size())));
    return law;
}

// Stationary law by power iteration on the lazy chain.
std::vector<double> power_pi(const MarkovChain& mc) {
    std::vector<double> pi(mc.size(), 1.0 / static_cast<double>(mc.size()));
    for (int it = 0; it < 20000; ++it) {
        std::vector<double> next(mc.size(), 0.0);
        for (std::size_t u = 0; u < mc.size(); ++u)
            for (std::size_t v = 0; v < mc.size(); ++v) next[v] += pi[u] * (0.5 * (u == v) + 0.5 * mc.p(u, v));
        pi = next;
    }
    return pi;
}

// All parent functions on a 3-state chain that form an arborescence
// rooted at `root`, with weight given by `arc_weight(child, parent)`.
template <class W>
ArborescenceDistribution<double> brute_law(const MarkovChain& mc, VertexId root, bool away, W arc_weight) {
    ArborescenceDistribution<double> law;
    const std::size_t n = mc.size();
    std::vector<VertexId> parent(n);
    std::function<void(VertexId)> rec = [&](VertexId v) {
        if (v == n) {
            for (VertexId u = 0; u < n; ++u) {
                VertexId at = u;
                for (std::size_t hop = 0; hop < n && at != root; ++hop) at = parent[at];
                if (at != root) return;
            }
            ArcKey arcs;
            double w = 1.0;
            for (VertexId u = 0; u < n; ++u) {
                if (u == root) continue;
                arcs.push_back(away ? Arc{parent[u], u} : Arc{u, parent[u]});
                w *= arc_weight(u, parent[u]);
            }
            std::sort(arcs.begin(), arcs.end());
            if (w > 0) law.add(arcs, w);
            return;
        }
        if (v == root) return rec(v + 1);
        for (VertexId p = 0; p < n; ++p) {
            if (p == v) continue;
            parent[v] = p;
            rec(v + 1);
        }
    };
    rec(0);
    law.normalize();
    return law;
}

}  // namespace

TEST(Samplers, TwoVertexAlwaysTheEdge) {
    auto g = corpus::two_vertex();
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        EXPECT_EQ(aldous_broder(g, 0, rng).tree.key(), TreeKey{UEdge(0, 1)});
        EXPECT_EQ(reverse_aldous_broder(g, 1, rng).tree.key(), TreeKey{UEdge(0, 1)});
        EXPECT_EQ(wilson(g, 0, rng).tree.key(), TreeKey{UEdge(0, 1)});
    }
    MarkovChain two({{0.0, 1.0}, {1.0, 0.0}});
    EXPECT_EQ(directed_aldous_broder(two, 0, rng).tree.key(), (ArcKey{{0, 1}}));
    EXPECT_EQ(directed_wilson(two, 0, rng).tree.key(), (ArcKey{{1, 0}}));
}

TEST(Samplers, DeterministicAndStructurallyValid) {
    auto g = corpus::figure_one();
    auto mc = MarkovChain::from_graph(corpus::four_cycle());
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng a(s), b(s);
        auto t1 = reverse_aldous_broder(g, 0, a);
        auto t2 = reverse_aldous_broder(g, 0, b);
        EXPECT_EQ(t1.tree.key(), t2.tree.key());
        EXPECT_EQ(t1.steps, t2.steps);
        EXPECT_TRUE(is_tree_on(t1.tree.vertices, t1.tree.key()));
        EXPECT_EQ(t1.tree.vertices.size(), g.vertex_count());
        auto w = wilson(g, 3, a);
        EXPECT_TRUE(is_tree_on(w.tree.vertices, w.tree.key()));
        auto ab = aldous_broder(g, 2, a);
        EXPECT_TRUE(is_tree_on(ab.tree.vertices, ab.tree.key()));
        auto dab = directed_aldous_broder(mc, 1, a);
        EXPECT_TRUE(is_arborescence({0, 1, 2, 3}, 1, Direction::away_from_root, dab.tree.arcs));
        auto dw = directed_wilson(mc, 2, a);
        EXPECT_TRUE(is_arborescence({0, 1, 2, 3}, 2, Direction::toward_root, dw.tree.arcs));
    }
}

TEST(Samplers, StepCap) {
    Rng rng(0);
    EXPECT_THROW(aldous_broder(corpus::figure_one(), 0, rng, 3), StepCapExceeded);
}

TEST(ExactUst, Targets) {
    auto tri = corpus::triangle();
    for (const auto& [k, v] : exact_ust_distribution(tri).mass) EXPECT_EQ(v, Rational(1, 3));
    for (const auto& [k, v] : exact_ust_distribution(corpus::k4()).mass) EXPECT_EQ(v, Rational(1, 16));
    EXPECT_EQ(exact_ust_distribution(corpus::k4()).mass.size(), 16u);
    auto wt = corpus::weighted_triangle();
    EXPECT_EQ(exact_ust_distribution(wt), weighted_triangle_target(wt));
}

TEST(AldousBroder, TriangleNearUniform) {
    auto g = corpus::triangle();
    auto h = histogram(kSamples, 1, [&](Rng& rng) { return aldous_broder(g, 0, rng).tree.key(); });
    auto report = compare_distributions(h, uniform_over(enumerate_spanning_trees(g)));
    EXPECT_LT(report.tv, 0.01);
}

TEST(AldousBroder, WeightedTriangle) {
    auto g = corpus::weighted_triangle();
    auto h = histogram(kSamples, 2, [&](Rng& rng) { return aldous_broder(g, 0, rng).tree.key(); });
    EXPECT_TRUE(compare_distributions(h, weighted_triangle_target(g)).passes(kSignificance));
}

TEST(ReverseAldousBroder, K4Uniform) {
    auto g = corpus::k4();
    auto trees = enumerate_spanning_trees(g);
    ASSERT_EQ(trees.size(), 16u);
    auto h = histogram(kSamples, 3, [&](Rng& rng) { return reverse_aldous_broder(g, 0, rng).tree.key(); });
    auto report = compare_distributions(h, uniform_over(trees));
    EXPECT_EQ(report.dof, 15u);
    EXPECT_TRUE(report.passes(kSignificance)) << report.p_value;
}

TEST(ReverseAldousBroder, WeightedTriangle) {
    auto g = corpus::weighted_triangle();
    auto h = histogram(kSamples, 4, [&](Rng& rng) { return reverse_aldous_broder(g, 2, rng).tree.key(); });
    EXPECT_TRUE(compare_distributions(h, weighted_triangle_target(g)).passes(kSignificance));
}

TEST(Wilson, TriangleAndK4Uniform) {
    for (const auto& g : {corpus::triangle(), corpus::k4()}) {
        auto h = histogram(kSamples, 5, [&](Rng& rng) { return wilson(g, 1, rng).tree.key(); });
        EXPECT_TRUE(compare_distributions(h, uniform_over(enumerate_spanning_trees(g))).passes(kSignificance));
    }
}

TEST(DirectedAldousBroder, ThreeStateChain) {
    Rng gen(21);
    auto mc = random_irreducible_chain(gen, 3);
    auto pi = power_pi(mc);
    // Arc parent -> child weighted by the reversed chain's child -> parent step.
    auto target = brute_law(mc, 0, true, [&](VertexId child, VertexId par) {
        return pi[par] * mc.p(par, child) / pi[child];
    });
    auto exact = exact_directed_ab_law(mc, 0);
    for (const auto& [k, v] : target.mass) EXPECT_NEAR(exact.at(k), v, 1e-10);
    std::map<ArcKey, std::uint64_t> h;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
        Rng rng(Rng::derive_seed(6, i));
        ++h[directed_aldous_broder(mc, 0, rng).tree.key()];
    }
    EXPECT_TRUE(compare_distributions(h, target).passes(kSignificance));
}

TEST(DirectedAldousBroder, ReversibleChainGivesUst) {
    auto g = corpus::weighted_triangle();
    auto mc = MarkovChain::from_graph(g);
    auto dab = exact_directed_ab_law(mc, 0);
    auto ust = exact_ust_distribution(g);
    ASSERT_EQ(dab.mass.size(), ust.mass.size());
    for (const auto& [arcs, p] : dab.mass) {
        TreeKey k;
        for (const Arc& a : arcs) k.push_back(unoriented(a));
        std::sort(k.begin(), k.end());
        EXPECT_NEAR(p, ust.at(k).get_d(), 1e-12);
    }
}

TEST(DirectedWilson, ThreeStateChain) {
    Rng gen(22);
    auto mc = random_irreducible_chain(gen, 3);
    auto target = brute_law(mc, 2, false, [&](VertexId child, VertexId par) { return mc.p(child, par); });
    auto exact = exact_directed_ust_law(mc, 2);
    for (const auto& [k, v] : target.mass) EXPECT_NEAR(exact.at(k), v, 1e-10);
    std::map<ArcKey, std::uint64_t> h;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
        Rng rng(Rng::derive_seed(7, i));
        ++h[directed_wilson(mc, 2, rng).tree.key()];
    }
    EXPECT_TRUE(compare_distributions(h, target).passes(kSignificance));
}

TEST(DirectedWilson, RootPathMarginalIsLoopErasedWalk) {
    Rng gen(23);
    auto mc = random_irreducible_chain(gen, 4);
    const VertexId root = 3, from = 0;
    auto lerw = lerw_law_exact(mc, from, root);
    std::map<Path, std::uint64_t> h;
    for (std::uint64_t i = 0; i < kSamples; ++i) {
        Rng rng(Rng::derive_seed(8, i));
        auto t = directed_wilson(mc, root, rng).tree;
        std::map<VertexId, VertexId> parent;
        for (const Arc& a : t.arcs) parent[a.tail] = a.head;
        std::vector<VertexId> walk{from};
        while (walk.back() != root) walk.push_back(parent[walk.back()]);
        ++h[Path(walk)];
    }
    double chi = 0.0;
    for (const auto& [w, p] : lerw) {
        double e = p * kSamples;
        double o = static_cast<double>(h[w]);
        chi += (o - e) * (o - e) / e;
    }
    EXPECT_EQ(h.size(), lerw.size());
    boost::math::chi_squared dist(static_cast<double>(lerw.size() - 1));
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi)), kSignificance);
}

TEST(Batch, SeedsDeriveFromIndex) {
    auto g = corpus::k4();
    SamplingTarget target = &g;
    auto a = draw_sample(Algorithm::rab, target, 0, 7, 5);
    auto b = draw_sample(Algorithm::rab, target, 0, 7, 5);
    EXPECT_EQ(a.tree, b.tree);
    EXPECT_EQ(a.seed, Rng::derive_seed(7, 5));
    EXPECT_EQ(parse_algorithm("wilson"), Algorithm::wilson);
    EXPECT_FALSE(parse_algorithm("bogus").has_value());
}
