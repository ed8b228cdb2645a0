#ifndef SPANFORGE_ORACLE_HPP
#define SPANFORGE_ORACLE_HPP

#include <spanforge/enumerate.hpp>
#include <spanforge/samplers.hpp>
#include <spanforge/tree_ops.hpp>
#include <spanforge/walks.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace spanforge {

enum class TreeOperator { first_entrance, last_exit };

inline TreeEdges apply_operator(TreeOperator op, const Path& path) {
    return op == TreeOperator::first_entrance ? first_entrance_tree(path) : last_exit_tree(path);
}

class RuleNotOccupational : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Pushforward of the walk law through a tree operator at a stopping time,
/// as an exact sub-probability. `unresolved` is the mass of walks not
/// stopped within the horizon plus any truncated tail of a random T.
struct OperatorLaw {
    TreeDistribution<Rational> law;
    Rational unresolved = 0;
    std::size_t horizon = 0;
};

namespace detail {

/// Stop weight of a randomized k-th visit rule, plus whether to continue.
struct VisitOutcome {
    Rational stop;
    bool keep_going;
    Rational tail;
};

inline VisitOutcome visit_outcome(const std::vector<Rational>& law, std::uint64_t count) {
    if (count == 0 || count > law.size()) return {Rational(0), false, Rational(0)};
    Rational stop = law[count - 1];
    if (count < law.size()) return {stop, true, Rational(0)};
    Rational tail = 1;
    for (const auto& q : law) tail -= q;
    return {stop, false, tail};
}

}  // namespace detail

/// Exact law of F or L of (X_0, ..., X_tau) by enumerating every walk from
/// `x` up to `horizon` steps. Rejects rules that look beyond the crossing
/// counts unless `allow_path_rules` is set.
inline OperatorLaw operator_law(const WeightedGraph& g, VertexId x, TreeOperator op, const StopRule& rule,
                                std::size_t horizon, std::size_t cap = kDefaultPathCap,
                                bool allow_path_rules = false) {
    if (!allow_path_rules && !occupation_measurable(rule))
        throw RuleNotOccupational("stopping rule depends on more than the edge crossing counts");
    OperatorLaw out;
    out.horizon = horizon;
    WalkState state(g, x);
    std::vector<VertexId> trail{x};
    std::size_t nodes = 0;
    const auto* random_rule = std::get_if<stop::RandomKthVisit>(&rule);

    auto recurse = [&](auto&& self, const Rational& mass) -> void {
        if (++nodes > cap) throw CapExceeded("operator_law enumeration exceeded cap " + std::to_string(cap));
        bool keep_going = true;
        if (random_rule) {
            if (occupies(state, random_rule->targets)) {
                auto outcome = detail::visit_outcome(random_rule->law, visits_to(state, random_rule->targets));
                if (outcome.stop != 0) out.law.add(apply_operator(op, Path(trail)).key(), mass * outcome.stop);
                out.unresolved += mass * outcome.tail;
                keep_going = outcome.keep_going;
            }
        } else if (rule_fires(rule, state, trail)) {
            out.law.add(apply_operator(op, Path(trail)).key(), mass);
            return;
        }
        if (!keep_going) return;
        if (state.step() == horizon) {
            if (random_rule) {
                Rational alive = 1;
                std::uint64_t seen = visits_to(state, random_rule->targets);
                for (std::uint64_t k = 0; k < seen && k < random_rule->law.size(); ++k) alive -= random_rule->law[k];
                out.unresolved += mass * alive;
            } else {
                out.unresolved += mass;
            }
            return;
        }
        VertexId at = state.position();
        for (const auto& nb : g.neighbors(at)) {
            state.advance(nb.vertex);
            trail.push_back(nb.vertex);
            self(self, mass * transition_prob<Rational>(g, at, nb.vertex));
            trail.pop_back();
            state.retreat(at);
        }
    };
    recurse(recurse, Rational(1));
    return out;
}

/// Exact law of F or L at a stopping time by dynamic programming over the
/// tree process (oriented tree, current vertex, visit count). Both tree
/// processes are Markov, so paths never need to be stored; this reaches
/// horizons far beyond path enumeration. Supports the built-in rules only.
///
/// Runs until the unresolved mass is at most `residual_target` or
/// `max_steps` is reached. The reported horizon is the step count used.
inline OperatorLaw tree_process_law(const WeightedGraph& g, VertexId x, TreeOperator op, const StopRule& rule,
                                    std::size_t max_steps, std::optional<Rational> residual_target = std::nullopt) {
    const std::size_t n = g.vertex_count();
    if (x >= n) throw GraphError(GraphErrc::unknown_vertex, "vertex id " + std::to_string(x));

    // Rule reduced to: optional horizon, cover flag, visit targets with a
    // law for the visit index at which to stop.
    std::optional<std::uint64_t> fixed_horizon;
    bool stop_on_cover = false;
    std::vector<bool> target(n, false);
    std::vector<Rational> visit_law;
    bool uses_visits = false;
    std::visit(
        [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, stop::FixedHorizon>) {
                fixed_horizon = r.n;
            } else if constexpr (std::is_same_v<R, stop::CoverTime>) {
                stop_on_cover = true;
            } else if constexpr (std::is_same_v<R, stop::CoverOrHorizon>) {
                stop_on_cover = true;
                fixed_horizon = r.n;
            } else if constexpr (std::is_same_v<R, stop::HittingTime>) {
                uses_visits = true;
                for (VertexId v : r.targets) target.at(v) = true;
                visit_law = {Rational(1)};
            } else if constexpr (std::is_same_v<R, stop::KthVisit>) {
                uses_visits = true;
                for (VertexId v : r.targets) target.at(v) = true;
                visit_law.assign(r.k, Rational(0));
                if (r.k == 0) throw std::invalid_argument("k-th visit rule needs k >= 1");
                visit_law.back() = 1;
            } else if constexpr (std::is_same_v<R, stop::RandomKthVisit>) {
                uses_visits = true;
                for (VertexId v : r.targets) target.at(v) = true;
                visit_law = r.law;
            } else if constexpr (std::is_same_v<R, stop::PathPredicate>) {
                throw RuleNotOccupational("stopping rule depends on more than the edge crossing counts");
            } else {
                throw std::invalid_argument("tree_process_law supports built-in rules only");
            }
        },
        rule);

    // Survival factors S(c) = P[T >= c] for the visit law.
    std::vector<Rational> survival(visit_law.size() + 2, Rational(0));
    {
        Rational s = 1;
        for (std::size_t c = 1; c <= visit_law.size() + 1; ++c) {
            survival[c] = s;
            if (c <= visit_law.size()) s -= visit_law[c - 1];
        }
    }

    // State: link per vertex (-1 unvisited, -2 visited without a link,
    // otherwise the linked neighbor), then position, then visit count.
    using State = std::vector<std::int32_t>;
    constexpr std::int32_t unvisited = -1;
    constexpr std::int32_t unlinked = -2;
    auto tree_key = [&](const State& s) {
        TreeKey key;
        for (std::size_t v = 0; v < n; ++v)
            if (s[v] >= 0) key.push_back(unoriented(static_cast<VertexId>(v), static_cast<VertexId>(s[v])));
        std::sort(key.begin(), key.end());
        return key;
    };
    auto covered = [&](const State& s) {
        for (std::size_t v = 0; v < n; ++v)
            if (s[v] == unvisited) return false;
        return true;
    };

    OperatorLaw out;
    std::map<State, Rational> live;
    {
        State s(n + 2, unvisited);
        s[x] = unlinked;
        s[n] = static_cast<std::int32_t>(x);
        s[n + 1] = target[x] ? 1 : 0;
        live[s] = 1;
    }
    Rational tail = 0;

    // Applies the rule at the current step. Returns the mass that carries on.
    auto settle = [&](const State& s, const Rational& mass, std::size_t step) -> Rational {
        if (fixed_horizon && step == *fixed_horizon) {
            out.law.add(tree_key(s), mass);
            return 0;
        }
        if (stop_on_cover && covered(s)) {
            out.law.add(tree_key(s), mass);
            return 0;
        }
        if (uses_visits) {
            auto position = static_cast<std::size_t>(s[n]);
            auto count = static_cast<std::size_t>(s[n + 1]);
            if (target[position] && count >= 1) {
                // mass is P[prefix, T >= count]; split into T == count and T > count.
                if (count > visit_law.size()) return mass;
                Rational stop_part = mass * visit_law[count - 1] / survival[count];
                if (stop_part != 0) out.law.add(tree_key(s), stop_part);
                Rational rest = mass - stop_part;
                if (count == visit_law.size()) {
                    tail += rest;
                    return 0;
                }
                return rest;
            }
        }
        return mass;
    };

    std::map<State, Rational> settled;
    for (auto& [s, mass] : live) {
        Rational rest = settle(s, mass, 0);
        if (rest != 0) settled[s] = rest;
    }
    live.swap(settled);

    std::size_t step = 0;
    auto unresolved = [&]() {
        Rational r = tail;
        for (const auto& [s, m] : live) r += m;
        return r;
    };
    while (!live.empty() && step < max_steps) {
        if (residual_target && unresolved() <= *residual_target) break;
        ++step;
        std::map<State, Rational> next;
        for (const auto& [s, mass] : live) {
            auto at = static_cast<VertexId>(s[n]);
            for (const auto& nb : g.neighbors(at)) {
                State t = s;
                VertexId w = nb.vertex;
                if (op == TreeOperator::first_entrance) {
                    if (t[w] == unvisited) t[w] = static_cast<std::int32_t>(at);
                } else {
                    t[at] = static_cast<std::int32_t>(w);
                    t[w] = unlinked;
                }
                t[n] = static_cast<std::int32_t>(w);
                if (target[w]) ++t[n + 1];
                Rational m = mass * transition_prob<Rational>(g, at, w);
                auto [it, inserted] = next.try_emplace(std::move(t), m);
                if (!inserted) it->second += m;
            }
        }
        live.clear();
        for (auto& [s, mass] : next) {
            Rational rest = settle(s, mass, step);
            if (rest != 0) live[s] = rest;
        }
    }
    out.unresolved = unresolved();
    out.horizon = step;
    return out;
}

/// Exact total variation distance between two exact laws.
template <class Key>
Rational total_variation(const Distribution<Key, Rational>& p, const Distribution<Key, Rational>& q) {
    Rational sum = 0;
    for (const auto& [k, v] : p.mass) sum += abs(v - q.at(k));
    for (const auto& [k, v] : q.mass)
        if (!p.mass.count(k)) sum += abs(v);
    return sum / 2;
}

template <class Key>
double total_variation(const Distribution<Key, double>& p, const Distribution<Key, double>& q) {
    double sum = 0.0;
    for (const auto& [k, v] : p.mass) sum += std::abs(v - q.at(k));
    for (const auto& [k, v] : q.mass)
        if (!p.mass.count(k)) sum += std::abs(v);
    return sum / 2;
}

/// Outcome of an empirical-versus-exact comparison.
struct ComparisonReport {
    double tv = 0.0;
    double chi_square = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::size_t samples = 0;
    /// Keys observed in the sample but outside the exact support.
    std::size_t unsupported_keys = 0;

    bool supports_match() const { return unsupported_keys == 0; }
    bool passes(double significance) const { return supports_match() && p_value > significance; }
};

/// Pearson chi-square of empirical counts against an exact law, with
/// (support size - 1) degrees of freedom.
template <class Key, class Scalar>
ComparisonReport compare_distributions(const std::map<Key, std::uint64_t>& counts,
                                       const Distribution<Key, Scalar>& expected) {
    ComparisonReport report;
    for (const auto& [k, c] : counts) report.samples += c;
    if (report.samples == 0) throw std::invalid_argument("compare_distributions: no samples");
    const double total = static_cast<double>(report.samples);
    std::size_t support = 0;
    double tv = 0.0;
    for (const auto& [k, v] : expected.mass) {
        double p = scalar_from<double>(Rational(v));
        if (p <= 0.0) continue;
        ++support;
        auto it = counts.find(k);
        double observed = it == counts.end() ? 0.0 : static_cast<double>(it->second);
        double e = p * total;
        report.chi_square += (observed - e) * (observed - e) / e;
        tv += std::abs(observed / total - p);
    }
    for (const auto& [k, c] : counts) {
        auto it = expected.mass.find(k);
        if (it == expected.mass.end() || scalar_from<double>(Rational(it->second)) <= 0.0) {
            ++report.unsupported_keys;
            tv += static_cast<double>(c) / total;
        }
    }
    report.tv = tv / 2;
    report.dof = support > 0 ? support - 1 : 0;
    if (report.dof == 0) {
        report.p_value = report.supports_match() ? 1.0 : 0.0;
    } else {
        boost::math::chi_squared dist(static_cast<double>(report.dof));
        report.p_value = boost::math::cdf(boost::math::complement(dist, report.chi_square));
    }
    if (!report.supports_match()) report.p_value = 0.0;
    return report;
}

/// Exact-versus-exact comparison: TV only.
template <class Key>
ComparisonReport compare_distributions(const Distribution<Key, Rational>& p, const Distribution<Key, Rational>& q) {
    ComparisonReport report;
    report.tv = total_variation(p, q).get_d();
    for (const auto& [k, v] : p.mass)
        if (v != 0 && q.at(k) == 0) ++report.unsupported_keys;
    for (const auto& [k, v] : q.mass)
        if (v != 0 && p.at(k) == 0) ++report.unsupported_keys;
    report.p_value = report.tv == 0.0 ? 1.0 : 0.0;
    return report;
}

}  // namespace spanforge

#endif
