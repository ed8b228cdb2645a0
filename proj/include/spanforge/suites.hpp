#ifndef SPANFORGE_SUITES_HPP
#define SPANFORGE_SUITES_HPP

#include <spanforge/batch.hpp>
#include <spanforge/best.hpp>
#include <spanforge/corpus.hpp>
#include <spanforge/enumerate.hpp>
#include <spanforge/oracle.hpp>
#include <spanforge/random.hpp>
#include <spanforge/tree_ops.hpp>
#include <spanforge/walks.hpp>

#include <json.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace spanforge {

/// One line of a verification report.
struct CheckResult {
    std::string check;
    std::string instance;
    bool pass = true;
    std::uint64_t discrepancies = 0;
    std::string detail;

    CheckResult() = default;
    CheckResult(std::string check_name, std::string instance_name)
        : check(std::move(check_name)), instance(std::move(instance_name)) {}

    nlohmann::json to_json() const {
        return {{"check", check},
                {"instance", instance},
                {"status", pass ? "pass" : "fail"},
                {"discrepancy", discrepancies},
                {"detail", detail}};
    }
};

inline bool all_pass(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

/// Balanced multi-digraph from a random walk on the complete digraph over
/// 2..max_vertices vertices, with 1..max_edges steps.
inline MultiDigraph random_balanced_multidigraph(Rng& rng, std::size_t max_edges, std::size_t max_vertices = 4) {
    std::size_t k = 2 + rng.below(max_vertices - 1);
    std::size_t length = 1 + rng.below(max_edges);
    std::vector<VertexId> walk{static_cast<VertexId>(rng.below(k))};
    for (std::size_t i = 0; i < length; ++i) {
        auto step = static_cast<VertexId>(rng.below(k - 1));
        if (step >= walk.back()) ++step;
        walk.push_back(step);
    }
    std::map<VertexId, VertexId> relabel;
    for (VertexId v : walk) relabel.try_emplace(v, static_cast<VertexId>(relabel.size()));
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) arcs.push_back({relabel[walk[i]], relabel[walk[i + 1]]});
    // Shuffle arc order so that arc indices carry no traversal information.
    for (std::size_t i = arcs.size(); i > 1; --i) std::swap(arcs[i - 1], arcs[rng.below(i)]);
    return MultiDigraph(relabel.size(), std::move(arcs), relabel[walk.front()], relabel[walk.back()]);
}

/// Random irreducible chain: a Hamiltonian cycle plus random extra
/// transitions (self-loops allowed), rows normalized.
inline MarkovChain random_irreducible_chain(Rng& rng, std::size_t states) {
    std::vector<std::vector<double>> p(states, std::vector<double>(states, 0.0));
    for (std::size_t u = 0; u < states; ++u) {
        p[u][(u + 1) % states] = 0.05 + rng.uniform();
        for (std::size_t v = 0; v < states; ++v)
            if (rng.uniform() < 0.5) p[u][v] += 0.05 + rng.uniform();
    }
    for (auto& row : p) {
        double sum = 0.0;
        for (double x : row) sum += x;
        for (double& x : row) x /= sum;
    }
    return MarkovChain(std::move(p));
}

namespace suites {

namespace detail {

inline std::string ids(const Path& p) {
    std::string out;
    for (std::size_t i = 0; i <= p.length(); ++i) out += (i ? "," : "") + std::to_string(p[i]);
    return out;
}

}  // namespace detail

/// The path bijection on every path set P_n^{x,y} with n <= max_len.
inline CheckResult bijection(const std::string& name, const WeightedGraph& g, std::size_t max_len) {
    CheckResult r{"bijection", name + " n<=" + std::to_string(max_len)};
    std::uint64_t checked = 0;
    auto note = [&](const std::string& what) {
        if (r.discrepancies++ == 0) r.detail = what;
    };
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        for (std::size_t n = 0; n <= max_len; ++n) {
            std::set<Path> domain;
            std::set<Path> image;
            for_each_path(g, x, n, [&](const std::vector<VertexId>& vs, const Rational& p) {
                Path gamma(vs);
                Path out = phi(g, gamma);
                ++checked;
                domain.insert(gamma);
                if (!image.insert(out).second) note("phi not injective at " + detail::ids(gamma));
                if (!is_valid_path(g, out) || out.start() != gamma.start() || out.end() != gamma.end() ||
                    out.length() != n) {
                    note("phi leaves P_n^{x,y} at " + detail::ids(gamma));
                    return;
                }
                if (!first_entrance_tree(gamma).same_tree(last_exit_tree(out)))
                    note("F != L o phi at " + detail::ids(gamma));
                if (path_probability<Rational>(g, out) != p) note("probability changed at " + detail::ids(gamma));
                if (crossing_counts(out) != crossing_counts(gamma)) note("crossings changed at " + detail::ids(gamma));
                if (visit_counts(out) != visit_counts(gamma)) note("visits changed at " + detail::ids(gamma));
            });
            if (image != domain) note("phi not onto for x=" + g.label(x) + " n=" + std::to_string(n));
        }
    }
    r.pass = r.discrepancies == 0;
    if (r.pass) r.detail = std::to_string(checked) + " paths";
    return r;
}

/// F and L pushforwards agree at horizon n and at n ∧ cover time.
inline std::vector<CheckResult> horizon_laws(const std::string& name, const WeightedGraph& g, std::size_t max_len) {
    std::vector<CheckResult> out;
    for (int kind = 0; kind < 2; ++kind) {
        CheckResult r{kind == 0 ? "horizon-law" : "horizon-cover-law", name + " n<=" + std::to_string(max_len)};
        for (VertexId x = 0; x < g.vertex_count(); ++x) {
            for (std::size_t n = 0; n <= max_len; ++n) {
                StopRule rule = kind == 0 ? StopRule(stop::FixedHorizon{n}) : StopRule(stop::CoverOrHorizon{n});
                auto f = operator_law(g, x, TreeOperator::first_entrance, rule, n);
                auto l = operator_law(g, x, TreeOperator::last_exit, rule, n);
                if (!(f.law == l.law) || f.unresolved != 0 || l.unresolved != 0 || f.law.total() != 1) {
                    if (r.discrepancies++ == 0)
                        r.detail = "x=" + g.label(x) + " n=" + std::to_string(n) + " tv=" + total_variation(f.law, l.law).get_str();
                }
            }
        }
        r.pass = r.discrepancies == 0;
        out.push_back(r);
    }
    return out;
}

/// Stops at the first revisit of any vertex. At time n this is the event
/// "the current vertex has two visits and every other vertex at most one",
/// which the crossing counts at time n determine.
inline StopRule first_revisit_rule() {
    return stop::Occupation{[](const WalkState& s) {
                                const std::size_t n = s.graph().vertex_count();
                                for (VertexId v = 0; v < n; ++v) {
                                    auto limit = v == s.position() ? 2u : 1u;
                                    if (s.visits(v) > limit) return false;
                                }
                                return s.visits(s.position()) == 2;
                            },
                            "first-revisit"};
}

/// F/L equality at stopping times whose firing event is determined by the
/// crossing counts: hitting times of single vertices, second visits, and
/// the first revisit.
inline std::vector<CheckResult> stopping(const std::string& name, const WeightedGraph& g, std::size_t max_len) {
    std::vector<CheckResult> out;
    CheckResult hit("hitting-time-law", name);
    CheckResult kth("second-visit-law", name);
    CheckResult occ("first-revisit-law", name);
    auto compare = [&](CheckResult& r, VertexId x, const StopRule& rule) {
        auto f = operator_law(g, x, TreeOperator::first_entrance, rule, max_len);
        auto l = operator_law(g, x, TreeOperator::last_exit, rule, max_len);
        if ((!(f.law == l.law) || f.unresolved != l.unresolved) && r.discrepancies++ == 0)
            r.detail = "x=" + g.label(x) + " tv=" + total_variation(f.law, l.law).get_str();
    };
    for (VertexId x = 0; x < g.vertex_count(); ++x) {
        for (VertexId k = 0; k < g.vertex_count(); ++k) {
            compare(hit, x, stop::HittingTime{{k}});
            compare(kth, x, stop::KthVisit{{k}, 2});
        }
        compare(occ, x, first_revisit_rule());
    }
    for (auto* r : {&hit, &kth, &occ}) {
        r->pass = r->discrepancies == 0;
        out.push_back(*r);
    }
    return out;
}

/// Candidate stopping rules that read the vertex sequence itself, not only
/// the crossing counts. Each is tested for F/L equality; a failure is a
/// witness that occupation measurability cannot simply be dropped, a pass is
/// no evidence either way.
inline std::vector<stop::PathPredicate> path_rule_candidates(const WeightedGraph& g) {
    std::vector<stop::PathPredicate> out;
    for (VertexId a = 0; a < g.vertex_count(); ++a) {
        for (const auto& nb : g.neighbors(a)) {
            VertexId b = nb.vertex;
            out.push_back({[a, b](std::span<const VertexId> p) {
                               return p.size() >= 2 && p[p.size() - 2] == a && p.back() == b;
                           },
                           "first-traversal " + g.label(a) + "->" + g.label(b)});
        }
        out.push_back({[a](std::span<const VertexId> p) {
                           return p.size() >= 3 && p.back() == a && p[p.size() - 3] == a;
                       },
                       "return-in-two " + g.label(a)});
    }
    return out;
}

struct SearchOutcome {
    std::string rule;
    VertexId start = 0;
    Rational tv;
    Rational unresolved;

    /// The truncated laws differ by more than the mass still unresolved, so
    /// the full laws at the stopping time differ too.
    bool witness() const { return tv > unresolved; }
};

/// Runs every candidate rule from every start up to `horizon` and returns
/// those where the truncated F and L laws differ.
inline std::vector<SearchOutcome> search_path_rules(const WeightedGraph& g, std::size_t horizon) {
    std::vector<SearchOutcome> found;
    for (const auto& candidate : path_rule_candidates(g)) {
        for (VertexId x = 0; x < g.vertex_count(); ++x) {
            StopRule rule = candidate;
            auto f = operator_law(g, x, TreeOperator::first_entrance, rule, horizon, kDefaultPathCap, true);
            auto l = operator_law(g, x, TreeOperator::last_exit, rule, horizon, kDefaultPathCap, true);
            if (!(f.law == l.law)) found.push_back({candidate.name, x, total_variation(f.law, l.law), f.unresolved});
        }
    }
    return found;
}

/// Randomized k-th visit rule with T ~ geometric(1/2) truncated at t_max;
/// F and L laws from the tree-process recursion, run until the horizon
/// residual is below tail / 1024.
struct RandomVisitCheck {
    CheckResult result;
    Rational tv;
    Rational unresolved;
    Rational tail;
    std::size_t horizon = 0;
};

inline RandomVisitCheck random_visit(const std::string& name, const WeightedGraph& g, VertexId x,
                                     const std::vector<VertexId>& targets, std::size_t t_max) {
    RandomVisitCheck c;
    c.result = {"random-visit-law", name + " T<=" + std::to_string(t_max)};
    auto law = geometric_half_law(t_max);
    c.tail = 1;
    for (const auto& q : law) c.tail -= q;
    StopRule rule = stop::RandomKthVisit{targets, law};
    auto f = tree_process_law(g, x, TreeOperator::first_entrance, rule, 100000, c.tail + c.tail / 1024);
    auto l = tree_process_law(g, x, TreeOperator::last_exit, rule, f.horizon);
    c.tv = total_variation(f.law, l.law);
    c.unresolved = f.unresolved;
    c.horizon = f.horizon;
    Rational bound = 1;
    bound /= Rational(BigInt(1) << static_cast<mp_bitcnt_t>(t_max));
    c.result.pass = c.tv <= bound && f.unresolved == l.unresolved && f.unresolved <= c.tail + c.tail / 1024;
    c.result.discrepancies = c.result.pass ? 0 : 1;
    std::ostringstream detail;
    detail << "tv=" << c.tv.get_str() << " unresolved=" << c.unresolved.get_d() << " horizon=" << c.horizon;
    c.result.detail = detail.str();
    return c;
}

/// BEST formula against brute-force Eulerian enumeration.
inline CheckResult best(std::size_t instances, std::size_t max_edges, std::uint64_t seed) {
    CheckResult r{"best", std::to_string(instances) + " digraphs <=" + std::to_string(max_edges) + " edges"};
    Rng rng(seed);
    std::size_t trails = 0, arborescences = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        MultiDigraph d = random_balanced_multidigraph(rng, max_edges);
        auto paths = enumerate_eulerian_paths(d, std::max<std::size_t>(max_edges, 12));
        BigInt total = count_eulerian_total(d);
        std::map<std::vector<std::size_t>, std::uint64_t> per_tree;
        for (const auto& trail : paths) ++per_tree[first_entrance_arcs(d, trail)];
        BigInt each = eulerian_paths_per_arborescence(d);
        auto trees = enumerate_arborescences(d, *d.start(), Direction::away_from_root);
        bool ok = total == BigInt(static_cast<unsigned long>(paths.size())) &&
                  BigInt(static_cast<unsigned long>(trees.size())) ==
                      count_arborescences(d, *d.start(), Direction::away_from_root) &&
                  per_tree.size() == trees.size();
        for (const auto& t : trees) ok = ok && BigInt(static_cast<unsigned long>(per_tree[t])) == each;
        trails += paths.size();
        arborescences += trees.size();
        if (!ok && r.discrepancies++ == 0)
            r.detail = "instance " + std::to_string(i) + ": formula " + total.get_str() + " vs " +
                       std::to_string(paths.size());
    }
    r.pass = r.discrepancies == 0;
    if (r.pass)
        r.detail = std::to_string(trails) + " Eulerian paths over " + std::to_string(arborescences) + " arborescences";
    return r;
}

/// Arborescence-sum stationary law against the linear solve.
inline CheckResult mctt(std::size_t instances, std::size_t max_states, std::uint64_t seed, double tolerance) {
    CheckResult r{"mctt", std::to_string(instances) + " chains <=" + std::to_string(max_states) + " states"};
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
        MarkovChain mc = random_irreducible_chain(rng, 2 + rng.below(max_states - 1));
        auto tree_pi = stationary_from_arborescences(mc);
        for (std::size_t v = 0; v < mc.size(); ++v) worst = std::max(worst, std::abs(tree_pi[v] - mc.stationary()[v]));
    }
    r.pass = worst <= tolerance;
    r.discrepancies = r.pass ? 0 : 1;
    std::ostringstream detail;
    detail << "max |diff| = " << worst;
    r.detail = detail.str();
    return r;
}

struct LerwDiscrepancy {
    double path_law = 0.0;       // lerw vs tree-path law
    double minor_ratio = 0.0;    // pi(v) / det(I-P)[v] spread
    double reversal = 0.0;       // lerw(y->x) reversed vs lerw(x->y), reversible chains
    double total_mass = 0.0;     // |sum of lerw masses - 1|
};

inline LerwDiscrepancy lerw_discrepancy(const MarkovChain& mc, bool reversible) {
    LerwDiscrepancy d;
    const std::size_t n = mc.size();
    double base = stationary_minor_ratio(mc, 0);
    for (VertexId v = 0; v < n; ++v)
        d.minor_ratio = std::max(d.minor_ratio, std::abs(stationary_minor_ratio(mc, v) - base) / std::abs(base));
    for (VertexId y = 0; y < n; ++y) {
        for (VertexId x = 0; x < n; ++x) {
            if (x == y) continue;
            auto lerw = lerw_law_exact(mc, y, x);
            auto ust = ust_path_law_exact(mc, y, x);
            double sum = 0.0;
            for (const auto& [w, m] : lerw) {
                sum += m;
                d.path_law = std::max(d.path_law, std::abs(m - ust.at(w)));
            }
            d.total_mass = std::max(d.total_mass, std::abs(sum - 1.0));
            if (reversible) {
                auto back = lerw_law_exact(mc, x, y);
                for (const auto& [w, m] : lerw) d.reversal = std::max(d.reversal, std::abs(m - back.at(w.reversed())));
            }
        }
    }
    return d;
}

inline CheckResult lerw(const std::string& name, const MarkovChain& mc, bool reversible, double tolerance) {
    CheckResult r{"lerw", name};
    auto d = lerw_discrepancy(mc, reversible);
    double worst = std::max({d.path_law, d.minor_ratio, d.reversal, d.total_mass});
    r.pass = worst <= tolerance;
    r.discrepancies = r.pass ? 0 : 1;
    std::ostringstream detail;
    detail << "path-law " << d.path_law << ", minor-ratio " << d.minor_ratio << ", reversal " << d.reversal
           << ", mass " << d.total_mass;
    r.detail = detail.str();
    return r;
}

/// Empirical law of a sampler against its exact target by chi-square.
inline CheckResult sampler(const std::string& name, Algorithm algorithm, const SamplingTarget& target, VertexId anchor,
                           std::uint64_t samples, std::uint64_t seed, double significance) {
    CheckResult r(std::string("sampler-") + to_string(algorithm), name);
    BatchSummary batch = sample_batch(algorithm, target, anchor, seed, samples);
    ComparisonReport report = compare_distributions(batch.histogram, target_law(algorithm, target, anchor));
    r.pass = report.passes(significance);
    r.discrepancies = r.pass ? 0 : 1;
    std::ostringstream detail;
    detail << "chi2=" << report.chi_square << " dof=" << report.dof << " p=" << report.p_value
           << " tv=" << report.tv << " samples=" << samples;
    r.detail = detail.str();
    return r;
}

}  // namespace suites
}  // namespace spanforge

#endif
