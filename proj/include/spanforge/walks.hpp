#ifndef SPANFORGE_WALKS_HPP
#define SPANFORGE_WALKS_HPP

#include <spanforge/graph.hpp>
#include <spanforge/random.hpp>
#include <spanforge/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace spanforge {

class PathError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Vertex sequence (v_0, ..., v_n); length n is the number of steps.
class Path {
public:
    Path() = default;
    Path(std::initializer_list<VertexId> vertices) : vertices_(vertices) { require_nonempty(); }
    explicit Path(std::vector<VertexId> vertices) : vertices_(std::move(vertices)) { require_nonempty(); }

    std::span<const VertexId> vertices() const { return vertices_; }
    std::size_t length() const { return vertices_.empty() ? 0 : vertices_.size() - 1; }
    bool empty() const { return vertices_.empty(); }
    VertexId start() const { return vertices_.front(); }
    VertexId end() const { return vertices_.back(); }
    VertexId operator[](std::size_t i) const { return vertices_[i]; }

    Path reversed() const { return Path(std::vector<VertexId>(vertices_.rbegin(), vertices_.rend())); }

    /// V(gamma), sorted.
    std::vector<VertexId> vertex_set() const {
        std::vector<VertexId> out(vertices_);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool self_avoiding() const { return vertex_set().size() == vertices_.size(); }

    auto operator<=>(const Path&) const = default;

private:
    void require_nonempty() const {
        if (vertices_.empty()) throw PathError("a path has at least one vertex");
    }

    std::vector<VertexId> vertices_;
};

inline bool is_valid_path(const WeightedGraph& g, const Path& path) {
    if (path.empty()) return false;
    for (VertexId v : path.vertices())
        if (v >= g.vertex_count()) return false;
    for (std::size_t k = 0; k < path.length(); ++k)
        if (!g.adjacent(path[k], path[k + 1])) return false;
    return true;
}

inline void validate_path(const WeightedGraph& g, const Path& path) {
    if (path.empty()) throw PathError("empty path");
    for (VertexId v : path.vertices())
        if (v >= g.vertex_count()) throw PathError("vertex id " + std::to_string(v) + " not in graph");
    for (std::size_t k = 0; k < path.length(); ++k)
        if (!g.adjacent(path[k], path[k + 1]))
            throw PathError("step " + std::to_string(k) + " (" + g.label(path[k]) + " -> " + g.label(path[k + 1]) +
                            ") is not an edge");
}

/// Probability that the network random walk started at v_0 follows `path`.
template <class Scalar = Rational>
Scalar path_probability(const WeightedGraph& g, const Path& path) {
    validate_path(g, path);
    Scalar out(1);
    for (std::size_t k = 0; k < path.length(); ++k) out *= transition_prob<Scalar>(g, path[k], path[k + 1]);
    return out;
}

/// N_{u,v}: number of u -> v steps.
struct TransitionCounts {
    VertexId start = 0;
    std::map<Arc, std::uint64_t> counts;

    std::uint64_t at(VertexId u, VertexId v) const {
        auto it = counts.find({u, v});
        return it == counts.end() ? 0 : it->second;
    }

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (const auto& [arc, c] : counts) sum += c;
        return sum;
    }

    std::map<VertexId, long long> surplus() const {
        std::map<VertexId, long long> out;
        for (const auto& [arc, c] : counts) {
            out[arc.tail] += static_cast<long long>(c);
            out[arc.head] -= static_cast<long long>(c);
        }
        return out;
    }

    /// The walk's endpoint, recovered from the counts alone.
    VertexId implied_end() const {
        for (const auto& [v, s] : surplus())
            if (s < 0 && v != start) return v;
        return start;
    }

    /// Interior vertices have in-count equal to out-count.
    bool flow_balanced() const {
        VertexId end = implied_end();
        for (const auto& [v, s] : surplus()) {
            long long expected = (v == start ? 1 : 0) - (v == end ? 1 : 0);
            if (s != expected) return false;
        }
        return true;
    }
};

inline TransitionCounts transition_counts(const Path& path) {
    TransitionCounts out;
    out.start = path.start();
    for (std::size_t k = 0; k < path.length(); ++k) ++out.counts[{path[k], path[k + 1]}];
    return out;
}

/// C_e: crossings of each unoriented edge, in either direction.
struct CrossingCounts {
    std::map<UEdge, std::uint64_t> counts;

    std::uint64_t at(VertexId a, VertexId b) const {
        auto it = counts.find(unoriented(a, b));
        return it == counts.end() ? 0 : it->second;
    }

    /// I_v = sum of C_e over edges at v.
    std::uint64_t incident(VertexId v) const {
        std::uint64_t sum = 0;
        for (const auto& [e, c] : counts)
            if (e.first == v || e.second == v) sum += c;
        return sum;
    }

    std::uint64_t total() const {
        std::uint64_t sum = 0;
        for (const auto& [e, c] : counts) sum += c;
        return sum;
    }

    bool operator==(const CrossingCounts&) const = default;
};

inline CrossingCounts crossing_counts(const Path& path) {
    CrossingCounts out;
    for (std::size_t k = 0; k < path.length(); ++k) ++out.counts[unoriented(path[k], path[k + 1])];
    return out;
}

/// Number of visits to each vertex, indexed by vertex id up to the largest
/// id on the path.
inline std::map<VertexId, std::uint64_t> visit_counts(const Path& path) {
    std::map<VertexId, std::uint64_t> out;
    for (VertexId v : path.vertices()) ++out[v];
    return out;
}

/// Chronological loop erasure: u_0 = v_0, then repeatedly jump to the last
/// visit l_k of u_k and continue from v_{l_k + 1}.
inline Path loop_erase(const Path& path) {
    const auto vs = path.vertices();
    const std::size_t n = path.length();
    std::map<VertexId, std::size_t> last;
    for (std::size_t j = 0; j <= n; ++j) last[vs[j]] = j;
    std::vector<VertexId> out{vs[0]};
    std::size_t l = last[vs[0]];
    while (l < n) {
        VertexId next = vs[l + 1];
        out.push_back(next);
        l = last[next];
    }
    return Path(std::move(out));
}

/// Occupation data of a walk in progress: crossing counts per edge and
/// the incidence sums I_v. Stop rules only see this object.
class WalkState {
public:
    WalkState(const WeightedGraph& g, VertexId start)
        : graph_(&g), start_(start), position_(start), crossings_(g.edge_count(), 0), incident_(g.vertex_count(), 0) {
        if (start >= g.vertex_count()) throw GraphError(GraphErrc::unknown_vertex, "start id " + std::to_string(start));
        visited_count_ = 1;
    }

    void advance(VertexId next) {
        auto e = graph_->edge_index(position_, next);
        if (!e) throw PathError("walk step is not an edge");
        ++crossings_[*e];
        ++incident_[position_];
        ++incident_[next];
        if (next != start_ && incident_[next] == 1) ++visited_count_;
        position_ = next;
        ++step_;
    }

    /// Undoes the last step, which must have come from `previous`.
    void retreat(VertexId previous) {
        auto e = graph_->edge_index(position_, previous);
        if (!e || step_ == 0 || crossings_[*e] == 0) throw PathError("retreat does not undo a step");
        --crossings_[*e];
        --incident_[previous];
        --incident_[position_];
        if (position_ != start_ && incident_[position_] == 0) --visited_count_;
        position_ = previous;
        --step_;
    }

    const WeightedGraph& graph() const { return *graph_; }
    std::uint64_t step() const { return step_; }
    VertexId start() const { return start_; }
    std::uint64_t crossings(std::size_t edge) const { return crossings_[edge]; }
    std::uint64_t crossings(VertexId a, VertexId b) const {
        auto e = graph_->edge_index(a, b);
        return e ? crossings_[*e] : 0;
    }
    std::uint64_t incident(VertexId v) const { return incident_[v]; }

    /// Visits to v so far, floor((I_v + 1) / 2) away from the start.
    std::uint64_t visits(VertexId v) const { return v == start_ ? incident_[v] / 2 + 1 : (incident_[v] + 1) / 2; }

    /// Parity law: v != start is occupied iff I_v is odd; start iff I_start even.
    bool at(VertexId v) const { return v == start_ ? incident_[v] % 2 == 0 : incident_[v] % 2 == 1; }

    VertexId position() const { return position_; }
    bool visited(VertexId v) const { return v == start_ || incident_[v] > 0; }
    std::size_t visited_count() const { return visited_count_; }
    bool covered() const { return visited_count_ == graph_->vertex_count(); }

private:
    const WeightedGraph* graph_;
    VertexId start_;
    VertexId position_;
    std::uint64_t step_ = 0;
    std::size_t visited_count_ = 0;
    std::vector<std::uint64_t> crossings_;
    std::vector<std::uint64_t> incident_;
};

namespace stop {

struct FixedHorizon {
    std::uint64_t n = 0;
};
struct CoverTime {};
/// n ∧ cover time.
struct CoverOrHorizon {
    std::uint64_t n = 0;
};
/// First k >= 0 with X_k in targets.
struct HittingTime {
    std::vector<VertexId> targets;
};
/// Time of the k-th visit (k >= 1) to targets; time 0 counts as a visit.
struct KthVisit {
    std::vector<VertexId> targets;
    std::uint64_t k = 1;
};
/// KthVisit with k drawn independently from `law`, where law[i] is
/// P[T = i + 1]. Missing mass is the truncation tail.
struct RandomKthVisit {
    std::vector<VertexId> targets;
    std::vector<Rational> law;
};
/// Arbitrary predicate of the crossing counts.
struct Occupation {
    std::function<bool(const WalkState&)> fires;
    std::string name = "occupation";
};
/// Predicate of the full path prefix. Not occupation-measurable; accepted
/// by simulate_walk, rejected by the exact law oracles.
struct PathPredicate {
    std::function<bool(std::span<const VertexId>)> fires;
    std::string name = "path-predicate";
};

}  // namespace stop

using StopRule = std::variant<stop::FixedHorizon, stop::CoverTime, stop::CoverOrHorizon, stop::HittingTime,
                              stop::KthVisit, stop::RandomKthVisit, stop::Occupation, stop::PathPredicate>;

inline bool occupation_measurable(const StopRule& rule) { return !std::holds_alternative<stop::PathPredicate>(rule); }

inline bool is_randomized(const StopRule& rule) { return std::holds_alternative<stop::RandomKthVisit>(rule); }

inline std::uint64_t visits_to(const WalkState& state, const std::vector<VertexId>& targets) {
    std::uint64_t sum = 0;
    for (VertexId v : targets) sum += state.visits(v);
    return sum;
}

inline bool occupies(const WalkState& state, const std::vector<VertexId>& targets) {
    return std::any_of(targets.begin(), targets.end(), [&](VertexId v) { return state.at(v); });
}

/// Whether a (non-randomized) rule fires at the current step.
inline bool rule_fires(const StopRule& rule, const WalkState& state, std::span<const VertexId> prefix) {
    return std::visit(
        [&](const auto& r) -> bool {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, stop::FixedHorizon>) {
                return state.step() == r.n;
            } else if constexpr (std::is_same_v<R, stop::CoverTime>) {
                return state.covered();
            } else if constexpr (std::is_same_v<R, stop::CoverOrHorizon>) {
                return state.covered() || state.step() == r.n;
            } else if constexpr (std::is_same_v<R, stop::HittingTime>) {
                return occupies(state, r.targets);
            } else if constexpr (std::is_same_v<R, stop::KthVisit>) {
                return occupies(state, r.targets) && visits_to(state, r.targets) == r.k;
            } else if constexpr (std::is_same_v<R, stop::RandomKthVisit>) {
                throw std::invalid_argument("randomized rule must be resolved with its own stream first");
            } else if constexpr (std::is_same_v<R, stop::Occupation>) {
                return r.fires(state);
            } else {
                return r.fires(prefix);
            }
        },
        rule);
}

/// Draws T from a truncated law; returns 0 for the truncation tail.
inline std::uint64_t draw_visit_count(const std::vector<Rational>& law, Rng& stream) {
    double u = stream.uniform();
    double running = 0.0;
    for (std::size_t i = 0; i < law.size(); ++i) {
        running += law[i].get_d();
        if (u < running) return i + 1;
    }
    return 0;
}

/// P[T = k] = 2^-k for k = 1..t_max (geometric with parameter 1/2,
/// truncated; tail mass 2^-t_max is left out).
inline std::vector<Rational> geometric_half_law(std::size_t t_max) {
    std::vector<Rational> law;
    Rational p(1, 2);
    for (std::size_t k = 1; k <= t_max; ++k) {
        law.push_back(p);
        p /= 2;
    }
    return law;
}

/// Fixes the random T of a RandomKthVisit using the caller's independent
/// stream; other rules pass through. A tail draw (T beyond the truncation)
/// falls back to T = law.size() + 1.
inline StopRule resolve_rule(const StopRule& rule, Rng& t_stream) {
    if (const auto* r = std::get_if<stop::RandomKthVisit>(&rule)) {
        std::uint64_t k = draw_visit_count(r->law, t_stream);
        if (k == 0) k = r->law.size() + 1;
        return stop::KthVisit{r->targets, k};
    }
    return rule;
}

class StepCapExceeded : public std::runtime_error {
public:
    explicit StepCapExceeded(std::uint64_t cap)
        : std::runtime_error("walk exceeded step cap of " + std::to_string(cap) + " steps"), cap_(cap) {}
    std::uint64_t cap() const noexcept { return cap_; }

private:
    std::uint64_t cap_;
};

/// Runs the network random walk from `start` until `rule` first fires.
inline Path simulate_walk(const WeightedGraph& g, VertexId start, const StopRule& rule, Rng& rng,
                          std::uint64_t step_cap = default_step_cap()) {
    if (is_randomized(rule)) throw std::invalid_argument("randomized rule needs an independent T stream");
    WalkState state(g, start);
    std::vector<VertexId> vertices{start};
    while (!rule_fires(rule, state, vertices)) {
        if (state.step() >= step_cap) throw StepCapExceeded(step_cap);
        VertexId next = g.sample_neighbor(state.position(), rng.uniform());
        state.advance(next);
        vertices.push_back(next);
    }
    return Path(std::move(vertices));
}

/// Randomized-rule overload: T is drawn from `t_stream`, never from `rng`.
inline Path simulate_walk(const WeightedGraph& g, VertexId start, const StopRule& rule, Rng& rng, Rng& t_stream,
                          std::uint64_t step_cap = default_step_cap()) {
    return simulate_walk(g, start, resolve_rule(rule, t_stream), rng, step_cap);
}

/// Markov chain trajectory from `start` until every state has been visited.
inline Path chain_walk_to_cover(const MarkovChain& mc, VertexId start, Rng& rng,
                                std::uint64_t step_cap = default_step_cap()) {
    std::vector<bool> seen(mc.size(), false);
    seen[start] = true;
    std::size_t remaining = mc.size() - 1;
    std::vector<VertexId> vertices{start};
    VertexId at = start;
    while (remaining > 0) {
        if (vertices.size() > step_cap) throw StepCapExceeded(step_cap);
        at = mc.sample_next(at, rng.uniform());
        vertices.push_back(at);
        if (!seen[at]) {
            seen[at] = true;
            --remaining;
        }
    }
    return Path(std::move(vertices));
}

/// Markov chain trajectory from `start` until it first enters `stop_set`
/// (time 0 included).
inline Path chain_walk_to_set(const MarkovChain& mc, VertexId start, const std::vector<bool>& stop_set, Rng& rng,
                              std::uint64_t step_cap = default_step_cap()) {
    std::vector<VertexId> vertices{start};
    VertexId at = start;
    while (!stop_set[at]) {
        if (vertices.size() > step_cap) throw StepCapExceeded(step_cap);
        at = mc.sample_next(at, rng.uniform());
        vertices.push_back(at);
    }
    return Path(std::move(vertices));
}

}  // namespace spanforge

#endif
