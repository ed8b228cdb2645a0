#include <spanforge/corpus.hpp>
#include <spanforge/graph.hpp>
#include <spanforge/linalg.hpp>
#include <spanforge/random.hpp>
#include <spanforge/rational.hpp>
#include <spanforge/suites.hpp>

#include <gtest/gtest.h>

#include <cstdlib>

using namespace spanforge;

namespace {

// Laplace expansion along the first row.
Rational cofactor_det(const std::vector<std::vector<Rational>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    if (n == 1) return m[0][0];
    Rational out = 0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Rational>> minor;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<Rational> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(row);
        }
        Rational term = m[0][j] * cofactor_det(minor);
        out += (j % 2 == 0) ? term : Rational(-term);
    }
    return out;
}

std::vector<double> power_iteration(const MarkovChain& mc) {
    const std::size_t n = mc.size();
    std::vector<double> pi(n, 1.0 / static_cast<double>(n));
    // Lazy version converges for periodic chains too.
    for (int it = 0; it < 20000; ++it) {
        std::vector<double> next(n, 0.0);
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v) next[v] += pi[u] * (0.5 * (u == v) + 0.5 * mc.p(u, v));
        pi = next;
    }
    return pi;
}

}  // namespace

TEST(BuildGraph, TriangleVertexWeights) {
    auto g = corpus::triangle();
    EXPECT_EQ(g.vertex_count(), 3u);
    EXPECT_EQ(g.edge_count(), 3u);
    for (VertexId v = 0; v < 3; ++v) EXPECT_EQ(g.vertex_weight(v), 2);
}

TEST(BuildGraph, DisconnectedRejected) {
    try {
        build_graph({{"a", "b"}, {"c", "d"}});
        FAIL();
    } catch (const GraphError& e) {
        EXPECT_EQ(e.code(), GraphErrc::disconnected);
    }
}

TEST(BuildGraph, NamedErrors) {
    auto code_of = [](std::initializer_list<EdgeSpec> edges) {
        try {
            build_graph(edges);
        } catch (const GraphError& e) {
            return e.code();
        }
        return GraphErrc::invalid_chain;
    };
    EXPECT_EQ(code_of({{"a", "a"}}), GraphErrc::self_loop);
    EXPECT_EQ(code_of({{"a", "b"}, {"b", "a"}}), GraphErrc::duplicate_edge);
    EXPECT_EQ(code_of({{"a", "b", Rational(0)}}), GraphErrc::non_positive_weight);
    EXPECT_EQ(code_of({{"a", "b", Rational(-1)}}), GraphErrc::non_positive_weight);
    EXPECT_EQ(code_of({}), GraphErrc::empty_edge_list);
}

TEST(BuildGraph, FigureOneHubWeight) {
    auto g = corpus::figure_one();
    EXPECT_EQ(g.vertex_count(), 8u);
    EXPECT_EQ(g.edge_count(), 12u);
    EXPECT_EQ(g.vertex_weight(g.id("b")), 5);
}

TEST(BuildGraph, DeterministicIds) {
    auto g1 = corpus::figure_one();
    auto g2 = corpus::figure_one();
    EXPECT_EQ(g1.labels(), g2.labels());
    EXPECT_EQ(g1.id("x"), 0u);
    EXPECT_EQ(g1.id("b"), 1u);
    EXPECT_THROW(g1.id("zz"), GraphError);
}

TEST(TransitionProb, Examples) {
    auto tri = corpus::triangle();
    EXPECT_EQ(transition_prob<Rational>(tri, tri.id("a"), tri.id("b")), Rational(1, 2));
    auto wt = corpus::weighted_triangle();
    EXPECT_EQ(transition_prob<Rational>(wt, wt.id("a"), wt.id("b")), Rational(2, 3));
    EXPECT_EQ(transition_prob<Rational>(wt, wt.id("a"), wt.id("a")), 0);
}

TEST(TransitionProb, RowsSumToOne) {
    for (const auto& in : corpus::all()) {
        const auto& g = in.graph;
        for (VertexId u = 0; u < g.vertex_count(); ++u) {
            Rational exact = 0;
            double approx = 0.0;
            for (VertexId v = 0; v < g.vertex_count(); ++v) {
                exact += transition_prob<Rational>(g, u, v);
                approx += transition_prob<double>(g, u, v);
            }
            EXPECT_EQ(exact, 1) << in.name;
            EXPECT_NEAR(approx, 1.0, 1e-12) << in.name;
        }
    }
}

TEST(MarkovChain, RejectsBadRowsAndReducible) {
    EXPECT_THROW(MarkovChain({{0.5, 0.4}, {1.0, 0.0}}), GraphError);
    try {
        MarkovChain({{1.0, 0.0}, {0.5, 0.5}});
        FAIL();
    } catch (const GraphError& e) {
        EXPECT_EQ(e.code(), GraphErrc::reducible_chain);
    }
}

TEST(MarkovChain, StationaryMatchesPowerIteration) {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        auto mc = random_irreducible_chain(rng, 2 + rng.below(4));
        auto oracle = power_iteration(mc);
        for (std::size_t v = 0; v < mc.size(); ++v) EXPECT_NEAR(mc.stationary()[v], oracle[v], 1e-10);
    }
}

TEST(ReversedChain, NetworkWalkIsSelfReverse) {
    for (const auto& in : corpus::all()) {
        auto mc = MarkovChain::from_graph(in.graph);
        auto r = reversed_chain(mc);
        for (std::size_t u = 0; u < mc.size(); ++u)
            for (std::size_t v = 0; v < mc.size(); ++v) EXPECT_NEAR(r.p(u, v), mc.p(u, v), 1e-12);
    }
}

TEST(ReversedChain, RotationReverses) {
    MarkovChain rot({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
    auto r = reversed_chain(rot);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.p((i + 1) % 3, i), 1.0, 1e-12);
}

TEST(ReversedChain, DoubleReversalIsIdentity) {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        auto mc = random_irreducible_chain(rng, 4);
        auto rr = reversed_chain(reversed_chain(mc));
        for (std::size_t u = 0; u < 4; ++u)
            for (std::size_t v = 0; v < 4; ++v) EXPECT_NEAR(rr.p(u, v), mc.p(u, v), 1e-10);
    }
}

TEST(MultiDigraph, BalanceViolation) {
    MultiDigraph ok(2, {{0, 1}, {0, 1}, {1, 0}}, 0, 1);
    EXPECT_TRUE(ok.balanced());
    MultiDigraph bad(3, {{0, 1}, {1, 2}, {0, 2}}, 0, 2);
    ASSERT_TRUE(bad.balance_violation().has_value());
    EXPECT_EQ(*bad.balance_violation(), 0u);
}

TEST(Linalg, DeterminantsAgreeWithCofactorExpansion) {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 1 + rng.below(5);
        std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
        DenseMatrix<BigInt> mi(n, std::vector<BigInt>(n));
        DenseMatrix<Rational> mq(n, std::vector<Rational>(n));
        Eigen::MatrixXd md(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                long x = static_cast<long>(rng.below(9)) - 4;
                m[i][j] = x;
                mi[i][j] = x;
                mq[i][j] = Rational(x, 3);
                md(i, j) = static_cast<double>(x);
            }
        Rational oracle = cofactor_det(m);
        EXPECT_EQ(Rational(determinant(mi)), oracle);
        Rational scale = 1;
        for (std::size_t i = 0; i < n; ++i) scale /= 3;
        EXPECT_EQ(determinant(mq), oracle * scale);
        EXPECT_NEAR(determinant(md), oracle.get_d(), 1e-9);
    }
    EXPECT_EQ(determinant(Eigen::MatrixXd(0, 0)), 1.0);
}

TEST(Rational, ParseDecimal) {
    EXPECT_EQ(parse_decimal("2"), 2);
    EXPECT_EQ(parse_decimal("0.25"), Rational(1, 4));
    EXPECT_EQ(parse_decimal("-1.5"), Rational(-3, 2));
    EXPECT_EQ(parse_decimal("1e-2"), Rational(1, 100));
    EXPECT_EQ(parse_decimal("2.5E1"), 25);
    EXPECT_THROW(parse_decimal("x"), std::invalid_argument);
    EXPECT_THROW(parse_decimal("1.2.3"), std::invalid_argument);
    EXPECT_THROW(parse_decimal(""), std::invalid_argument);
}

TEST(Rng, DeterministicAndSplit) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
    EXPECT_NE(Rng::derive_seed(1, 0), Rng::derive_seed(1, 1));
    EXPECT_NE(Rng::derive_seed(1, 0), Rng::derive_seed(2, 0));
    Rng c(7);
    for (int i = 0; i < 1000; ++i) {
        double u = c.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(c.below(3), 3u);
    }
}

TEST(Rng, StepCapFromEnvironment) {
    ::setenv("SPANFORGE_STEP_CAP", "1234", 1);
    EXPECT_EQ(default_step_cap(), 1234u);
    ::unsetenv("SPANFORGE_STEP_CAP");
    EXPECT_EQ(default_step_cap(), kDefaultStepCap);
}
