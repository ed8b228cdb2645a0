#include <spanforge/corpus.hpp>
#include <spanforge/enumerate.hpp>
#include <spanforge/tree_ops.hpp>
#include <spanforge/walks.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace spanforge;

namespace {

Path P(const WeightedGraph& g, std::vector<std::string> labels) { return corpus::labeled_path(g, labels); }

// Expected cover time by value iteration over (visited set, position).
double expected_cover_time(const WeightedGraph& g, VertexId start) {
    const std::size_t n = g.vertex_count();
    const std::size_t full = (std::size_t{1} << n) - 1;
    // E[mask][v] for masks in decreasing popcount order; within a mask the
    // values solve a linear system, done here by fixed-point iteration.
    std::vector<std::vector<double>> e(full + 1, std::vector<double>(n, 0.0));
    std::vector<std::size_t> masks;
    for (std::size_t m = 1; m <= full; ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(),
              [](std::size_t a, std::size_t b) { return __builtin_popcountll(a) > __builtin_popcountll(b); });
    for (std::size_t m : masks) {
        if (m == full) continue;
        for (int it = 0; it < 5000; ++it) {
            for (VertexId v = 0; v < n; ++v) {
                if (!(m >> v & 1)) continue;
                double acc = 1.0;
                for (const auto& nb : g.neighbors(v)) {
                    double p = transition_prob<double>(g, v, nb.vertex);
                    std::size_t m2 = m | (std::size_t{1} << nb.vertex);
                    acc += p * e[m2][nb.vertex];
                }
                e[m][v] = acc;
            }
        }
    }
    return e[std::size_t{1} << start][start];
}

}  // namespace

TEST(PathProbability, Examples) {
    auto tri = corpus::triangle();
    EXPECT_EQ(path_probability<Rational>(tri, P(tri, {"a", "b", "c"})), Rational(1, 4));
    EXPECT_EQ(path_probability<Rational>(tri, P(tri, {"b"})), 1);
}

TEST(PathProbability, FigureOneStepByStep) {
    auto g = corpus::figure_one();
    const auto& labels = corpus::figure_one_path();
    // Degrees read off the edge list: x3 b5 d4 a3 c2 y3 u2 v2.
    std::map<std::string, int> degree{{"x", 3}, {"b", 5}, {"d", 4}, {"a", 3}, {"c", 2}, {"y", 3}, {"u", 2}, {"v", 2}};
    Rational oracle = 1;
    for (std::size_t i = 0; i + 1 < labels.size(); ++i) oracle /= degree[labels[i]];
    EXPECT_EQ(path_probability<Rational>(g, P(g, labels)), oracle);
    EXPECT_NEAR(path_probability<double>(g, P(g, labels)), oracle.get_d(), 1e-18);
}

TEST(PathValidation, RejectsNonEdgesAndEmpty) {
    auto tri = corpus::path3();
    EXPECT_FALSE(is_valid_path(tri, Path(std::vector<VertexId>{0, 2})));
    EXPECT_THROW(validate_path(tri, Path(std::vector<VertexId>{0, 2})), PathError);
    EXPECT_THROW(Path(std::vector<VertexId>{}), PathError);
}

TEST(TransitionCounts, Examples) {
    auto tri = corpus::triangle();
    auto c = transition_counts(P(tri, {"a", "b", "a"}));
    EXPECT_EQ(c.counts.size(), 2u);
    EXPECT_EQ(c.at(0, 1), 1u);
    EXPECT_EQ(c.at(1, 0), 1u);
    EXPECT_TRUE(transition_counts(P(tri, {"a"})).counts.empty());

    auto g = corpus::figure_one();
    auto f = transition_counts(P(g, corpus::figure_one_path()));
    for (const auto& [arc, n] : f.counts) {
        bool ab = arc.tail == g.id("a") && arc.head == g.id("b");
        EXPECT_EQ(n, ab ? 2u : 1u);
    }
    EXPECT_EQ(f.at(g.id("a"), g.id("b")), 2u);
    EXPECT_TRUE(f.flow_balanced());
    EXPECT_EQ(f.implied_end(), g.id("y"));
}

TEST(CrossingCounts, Examples) {
    auto tri = corpus::triangle();
    auto c = crossing_counts(P(tri, {"a", "b", "a"}));
    EXPECT_EQ(c.counts.size(), 1u);
    EXPECT_EQ(c.at(0, 1), 2u);
    auto g = corpus::figure_one();
    auto f = crossing_counts(P(g, corpus::figure_one_path()));
    EXPECT_EQ(f.at(g.id("a"), g.id("b")), 2u);
    EXPECT_EQ(f.at(g.id("x"), g.id("b")), 1u);
    EXPECT_EQ(f.total(), 13u);
}

TEST(LoopErase, Examples) {
    auto tri = corpus::triangle();
    EXPECT_EQ(loop_erase(P(tri, {"a", "b", "a", "c"})), P(tri, {"a", "c"}));
    EXPECT_EQ(loop_erase(P(tri, {"a", "b", "c"})), P(tri, {"a", "b", "c"}));
    auto g = corpus::figure_one();
    EXPECT_EQ(loop_erase(P(g, {"x", "b", "d", "x", "a", "b", "y"})), P(g, {"x", "a", "b", "y"}));
}

// Exhaustive properties over every path up to a small length.
TEST(WalkProperties, ExhaustiveSmallPaths) {
    for (const auto& in : corpus::all()) {
        const auto& g = in.graph;
        if (g.vertex_count() > 5) continue;
        for (VertexId x = 0; x < g.vertex_count(); ++x) {
            for (std::size_t n = 0; n <= 6; ++n) {
                Rational mass = 0;
                for_each_path(g, x, n, [&](const std::vector<VertexId>& vs, const Rational& p) {
                    Path gamma(vs);
                    mass += p;
                    auto c = crossing_counts(gamma);
                    EXPECT_EQ(c.total(), n);
                    EXPECT_TRUE(transition_counts(gamma).flow_balanced());
                    Path erased = loop_erase(gamma);
                    EXPECT_TRUE(erased.self_avoiding());
                    EXPECT_EQ(loop_erase(erased), erased);
                    EXPECT_EQ(erased.start(), gamma.start());
                    EXPECT_EQ(erased.end(), gamma.end());
                    auto visits = visit_counts(gamma);
                    for (VertexId v = 0; v < g.vertex_count(); ++v) {
                        auto iv = c.incident(v);
                        bool at_end = gamma.end() == v;
                        if (v == x) {
                            EXPECT_EQ(at_end, iv % 2 == 0);
                            EXPECT_EQ(visits[v], iv / 2 + 1);
                        } else {
                            EXPECT_EQ(at_end, iv % 2 == 1);
                            EXPECT_EQ(visits.count(v) ? visits[v] : 0, (iv + 1) / 2);
                        }
                    }
                });
                EXPECT_EQ(mass, 1) << in.name << " x=" << x << " n=" << n;
            }
        }
    }
}

TEST(WalkState, TracksCountsAndRetreats) {
    auto g = corpus::triangle();
    WalkState s(g, 0);
    EXPECT_TRUE(s.at(0));
    s.advance(1);
    s.advance(2);
    s.advance(0);
    EXPECT_TRUE(s.covered());
    EXPECT_EQ(s.visits(0), 2u);
    EXPECT_TRUE(s.at(0));
    EXPECT_FALSE(s.at(1));
    s.retreat(2);
    s.retreat(1);
    EXPECT_EQ(s.visited_count(), 2u);
    EXPECT_EQ(s.position(), 1u);
    EXPECT_THROW(s.advance(1), PathError);
}

// Stop rules read only crossing counts, so they agree on a path and its
// image under the bijection, which has the same counts.
TEST(StopRules, InvariantUnderPhi) {
    auto g = corpus::four_cycle();
    std::vector<StopRule> rules{stop::HittingTime{{2}}, stop::CoverTime{}, stop::KthVisit{{1, 3}, 2},
                                stop::FixedHorizon{4}};
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        for_each_path(g, x, 6, [&](const std::vector<VertexId>& vs, const Rational&) {
            Path gamma(vs);
            Path image = phi(g, gamma);
            WalkState a(g, x), b(g, x);
            for (std::size_t k = 1; k < vs.size(); ++k) {
                a.advance(gamma[k]);
                b.advance(image[k]);
            }
            for (const auto& rule : rules)
                EXPECT_EQ(rule_fires(rule, a, gamma.vertices()), rule_fires(rule, b, image.vertices()));
        });
    }
}

TEST(SimulateWalk, TrivialCases) {
    auto tri = corpus::triangle();
    Rng rng(1);
    EXPECT_EQ(simulate_walk(tri, 0, stop::FixedHorizon{0}, rng).length(), 0u);
    auto two = corpus::two_vertex();
    for (int i = 0; i < 10; ++i) EXPECT_EQ(simulate_walk(two, 0, stop::CoverTime{}, rng), Path(std::vector<VertexId>{0, 1}));
    EXPECT_THROW(simulate_walk(tri, 0, stop::FixedHorizon{100}, rng, 10), StepCapExceeded);
}

TEST(SimulateWalk, RandomizedRuleNeedsStream) {
    auto tri = corpus::triangle();
    Rng rng(1), t_stream(2);
    StopRule rule = stop::RandomKthVisit{{2}, geometric_half_law(10)};
    EXPECT_THROW(simulate_walk(tri, 0, rule, rng), std::invalid_argument);
    Path p = simulate_walk(tri, 0, rule, rng, t_stream);
    EXPECT_EQ(p.end(), 2u);
}

TEST(SimulateWalk, Deterministic) {
    auto g = corpus::k4();
    Rng a(9), b(9);
    EXPECT_EQ(simulate_walk(g, 0, stop::CoverTime{}, a), simulate_walk(g, 0, stop::CoverTime{}, b));
}

TEST(SimulateWalk, K4CoverTimeMean) {
    auto g = corpus::k4();
    const double oracle = expected_cover_time(g, 0);
    EXPECT_NEAR(oracle, 5.5, 1e-9);  // 3 * (1 + 1/2 + 1/3)
    const int runs = 100000;
    Rng rng(2024);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < runs; ++i) {
        double t = static_cast<double>(simulate_walk(g, 0, stop::CoverTime{}, rng).length());
        sum += t;
        sq += t * t;
    }
    double mean = sum / runs;
    double se = std::sqrt((sq / runs - mean * mean) / runs);
    EXPECT_LT(std::abs(mean - oracle), 3 * se);
}

TEST(GeometricLaw, TailIsTwoToMinusTmax) {
    auto law = geometric_half_law(40);
    Rational total = 0;
    for (const auto& q : law) total += q;
    Rational tail = 1 - total;
    Rational expected = 1;
    for (int i = 0; i < 40; ++i) expected /= 2;
    EXPECT_EQ(tail, expected);
}
