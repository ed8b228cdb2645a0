#include <spanforge/best.hpp>
#include <spanforge/corpus.hpp>
#include <spanforge/oracle.hpp>

#include <gtest/gtest.h>

using namespace spanforge;

namespace {

// Vertex sequence of the unique tree path from a to b.
Path tree_path(const TreeKey& tree, VertexId a, VertexId b) {
    std::map<VertexId, std::vector<VertexId>> adj;
    for (auto [u, v] : tree) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::map<VertexId, VertexId> parent{{a, a}};
    std::vector<VertexId> queue{a};
    for (std::size_t i = 0; i < queue.size(); ++i)
        for (VertexId w : adj[queue[i]])
            if (!parent.count(w)) parent[w] = queue[i], queue.push_back(w);
    std::vector<VertexId> out{b};
    while (out.back() != a) out.push_back(parent.at(out.back()));
    std::reverse(out.begin(), out.end());
    return Path(out);
}

}  // namespace

TEST(OperatorLaw, PathGraphHorizonTwo) {
    auto g = corpus::path3();
    auto f = operator_law(g, g.id("b"), TreeOperator::first_entrance, stop::FixedHorizon{2}, 2);
    auto l = operator_law(g, g.id("b"), TreeOperator::last_exit, stop::FixedHorizon{2}, 2);
    EXPECT_EQ(f.law, l.law);
    EXPECT_EQ(f.law.total(), 1);
    EXPECT_EQ(f.unresolved, 0);
}

TEST(OperatorLaw, HorizonZeroIsPointMassOnEmptyTree) {
    auto g = corpus::triangle();
    for (auto op : {TreeOperator::first_entrance, TreeOperator::last_exit}) {
        auto law = operator_law(g, 0, op, stop::FixedHorizon{0}, 0);
        ASSERT_EQ(law.law.mass.size(), 1u);
        EXPECT_TRUE(law.law.mass.begin()->first.empty());
        EXPECT_EQ(law.law.mass.begin()->second, 1);
    }
}

TEST(OperatorLaw, RejectsPathRules) {
    auto g = corpus::triangle();
    StopRule rule = stop::PathPredicate{[](std::span<const VertexId> p) { return p.size() > 2; }, "len"};
    EXPECT_THROW(operator_law(g, 0, TreeOperator::first_entrance, rule, 3), RuleNotOccupational);
    EXPECT_THROW(tree_process_law(g, 0, TreeOperator::first_entrance, rule, 3), RuleNotOccupational);
    EXPECT_NO_THROW(operator_law(g, 0, TreeOperator::first_entrance, rule, 3, kDefaultPathCap, true));
}

TEST(OperatorLaw, HittingTreePathIsLoopErasedWalk) {
    auto g = corpus::triangle();
    auto mc = MarkovChain::from_graph(g);
    const VertexId a = 0, c = 2;
    auto f = tree_process_law(g, a, TreeOperator::first_entrance, stop::HittingTime{{c}}, 200);
    ASSERT_LT(f.unresolved.get_d(), 1e-15);
    std::map<Path, double> from_trees;
    for (const auto& [tree, mass] : f.law.mass) from_trees[tree_path(tree, a, c)] += mass.get_d();
    auto lerw = lerw_law_exact(mc, a, c);
    ASSERT_EQ(from_trees.size(), lerw.size());
    for (const auto& [w, m] : lerw) EXPECT_NEAR(from_trees[w], m, 1e-12);
}

// The recursion over tree states agrees with path enumeration wherever
// both run.
TEST(TreeProcessLaw, AgreesWithEnumeration) {
    for (const auto& in : corpus::all()) {
        if (in.graph.vertex_count() > 4) continue;
        const auto& g = in.graph;
        std::vector<StopRule> rules{stop::FixedHorizon{5}, stop::CoverOrHorizon{5}, stop::HittingTime{{1}},
                                    stop::KthVisit{{0, 2}, 2}, stop::RandomKthVisit{{2}, geometric_half_law(3)}};
        for (const auto& rule : rules)
            for (auto op : {TreeOperator::first_entrance, TreeOperator::last_exit}) {
                auto e = operator_law(g, 0, op, rule, 6);
                auto d = tree_process_law(g, 0, op, rule, 6);
                EXPECT_EQ(e.law, d.law) << in.name;
                EXPECT_EQ(e.unresolved, d.unresolved) << in.name;
            }
    }
}

TEST(TreeProcessLaw, CoverTimeIsUst) {
    auto g = corpus::weighted_triangle();
    for (auto op : {TreeOperator::first_entrance, TreeOperator::last_exit}) {
        auto law = tree_process_law(g, 1, op, stop::CoverTime{}, 400);
        auto ust = exact_ust_distribution(g);
        for (const auto& [k, v] : ust.mass) EXPECT_NEAR(law.law.at(k).get_d(), v.get_d(), 1e-12);
    }
}

TEST(RandomVisit, TailAccounting) {
    auto g = corpus::triangle();
    auto law = geometric_half_law(6);
    StopRule rule = stop::RandomKthVisit{{2}, law};
    auto f = tree_process_law(g, 0, TreeOperator::first_entrance, rule, 300);
    auto l = tree_process_law(g, 0, TreeOperator::last_exit, rule, 300);
    EXPECT_EQ(f.law, l.law);
    Rational tail(1, 64);
    EXPECT_GE(f.unresolved, tail);
    EXPECT_LT(f.unresolved - tail, Rational(1, 1000000000));
    EXPECT_EQ(f.law.total() + f.unresolved, 1);
}

TEST(CompareDistributions, ExactLaws) {
    TreeDistribution<Rational> p, q;
    p.add({{0, 1}}, 1);
    q.add({{1, 2}}, 1);
    EXPECT_EQ(total_variation(p, p), 0);
    EXPECT_EQ(total_variation(p, q), 1);
    EXPECT_EQ(compare_distributions(p, q).tv, 1.0);
}

TEST(CompareDistributions, ChiSquareCalibration) {
    Distribution<int, double> fair;
    fair.add(0, 0.5);
    fair.add(1, 0.5);
    int below = 0;
    double mean = 0.0;
    const int runs = 200;
    for (int s = 0; s < runs; ++s) {
        Rng rng(1000 + s);
        std::map<int, std::uint64_t> counts;
        for (int i = 0; i < 100000; ++i) ++counts[static_cast<int>(rng.below(2))];
        auto r = compare_distributions(counts, fair);
        EXPECT_EQ(r.dof, 1u);
        mean += r.p_value / runs;
        if (r.p_value < 0.1) ++below;
    }
    EXPECT_NEAR(mean, 0.5, 0.08);
    EXPECT_GT(below, 5);
    EXPECT_LT(below, 40);
}

TEST(CompareDistributions, UnsupportedKeysFail) {
    Distribution<int, double> one;
    one.add(0, 1.0);
    std::map<int, std::uint64_t> counts{{0, 10}, {1, 1}};
    auto r = compare_distributions(counts, one);
    EXPECT_EQ(r.unsupported_keys, 1u);
    EXPECT_FALSE(r.passes(1e-3));
}
