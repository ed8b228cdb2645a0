#ifndef SPANFORGE_GRAPH_HPP
#define SPANFORGE_GRAPH_HPP

#include <spanforge/linalg.hpp>
#include <spanforge/rational.hpp>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spanforge {

using VertexId = std::uint32_t;

/// Directed edge between dense vertex ids.
struct Arc {
    VertexId tail = 0;
    VertexId head = 0;

    Arc reversed() const { return {head, tail}; }
    auto operator<=>(const Arc&) const = default;
};

/// Unoriented edge, always stored with first <= second.
using UEdge = std::pair<VertexId, VertexId>;

inline UEdge unoriented(VertexId a, VertexId b) { return a < b ? UEdge{a, b} : UEdge{b, a}; }
inline UEdge unoriented(const Arc& arc) { return unoriented(arc.tail, arc.head); }

enum class GraphErrc {
    empty_edge_list,
    disconnected,
    duplicate_edge,
    non_positive_weight,
    self_loop,
    unknown_vertex,
    invalid_chain,
    reducible_chain,
};

inline const char* to_string(GraphErrc code) {
    switch (code) {
        case GraphErrc::empty_edge_list: return "empty-edge-list";
        case GraphErrc::disconnected: return "disconnected";
        case GraphErrc::duplicate_edge: return "duplicate-edge";
        case GraphErrc::non_positive_weight: return "non-positive-weight";
        case GraphErrc::self_loop: return "self-loop";
        case GraphErrc::unknown_vertex: return "unknown-vertex";
        case GraphErrc::invalid_chain: return "invalid-chain";
        case GraphErrc::reducible_chain: return "reducible-chain";
    }
    return "unknown";
}

class GraphError : public std::runtime_error {
public:
    GraphError(GraphErrc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    GraphErrc code() const noexcept { return code_; }

private:
    GraphErrc code_;
};

/// An enumeration would exceed its configured cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One line of an edge list, before vertex ids are assigned.
struct EdgeSpec {
    std::string u;
    std::string v;
    Rational weight = 1;
};

/// Finite connected simple graph with positive edge weights. Immutable
/// after construction.
class WeightedGraph {
public:
    struct Edge {
        VertexId u = 0;
        VertexId v = 0;
        Rational weight;
        double weight_d = 0.0;
    };

    struct Neighbor {
        VertexId vertex = 0;
        std::size_t edge = 0;
    };

    /// Vertex ids are assigned by first appearance in `edges`.
    static WeightedGraph build(std::span<const EdgeSpec> edges) {
        if (edges.empty()) throw GraphError(GraphErrc::empty_edge_list, "no edges given");
        WeightedGraph g;
        auto intern = [&g](const std::string& label) {
            auto [it, inserted] = g.index_.try_emplace(label, static_cast<VertexId>(g.labels_.size()));
            if (inserted) g.labels_.push_back(label);
            return it->second;
        };
        std::map<UEdge, std::size_t> seen;
        for (const EdgeSpec& spec : edges) {
            if (spec.u == spec.v) throw GraphError(GraphErrc::self_loop, "loop at " + spec.u);
            if (spec.weight <= 0)
                throw GraphError(GraphErrc::non_positive_weight,
                                 spec.u + " " + spec.v + " has weight " + spec.weight.get_str());
            VertexId a = intern(spec.u);
            VertexId b = intern(spec.v);
            if (!seen.emplace(unoriented(a, b), g.edges_.size()).second)
                throw GraphError(GraphErrc::duplicate_edge, spec.u + " " + spec.v);
            g.edges_.push_back({a, b, spec.weight, spec.weight.get_d()});
        }
        g.finalize();
        return g;
    }

    std::size_t vertex_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::string>& labels() const { return labels_; }

    const std::string& label(VertexId v) const {
        check(v);
        return labels_[v];
    }

    std::optional<VertexId> find(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    VertexId id(const std::string& label) const {
        auto found = find(label);
        if (!found) throw GraphError(GraphErrc::unknown_vertex, label);
        return *found;
    }

    /// Neighbors sorted by vertex id.
    std::span<const Neighbor> neighbors(VertexId v) const {
        check(v);
        return adjacency_[v];
    }

    std::optional<std::size_t> edge_index(VertexId a, VertexId b) const {
        check(a);
        check(b);
        const auto& adj = adjacency_[a];
        auto it = std::lower_bound(adj.begin(), adj.end(), b,
                                   [](const Neighbor& n, VertexId target) { return n.vertex < target; });
        if (it == adj.end() || it->vertex != b) return std::nullopt;
        return it->edge;
    }

    bool adjacent(VertexId a, VertexId b) const { return edge_index(a, b).has_value(); }

    /// w(a, b), zero when not adjacent.
    Rational weight(VertexId a, VertexId b) const {
        auto e = edge_index(a, b);
        return e ? edges_[*e].weight : Rational(0);
    }

    /// w(x): total weight of edges at x.
    const Rational& vertex_weight(VertexId v) const {
        check(v);
        return vertex_weight_[v];
    }

    double vertex_weight_d(VertexId v) const {
        check(v);
        return vertex_weight_d_[v];
    }

    /// Neighbor selected by a uniform draw `u` in [0, 1).
    VertexId sample_neighbor(VertexId v, double u) const {
        const auto& cumulative = cumulative_[v];
        double target = u * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        auto index = static_cast<std::size_t>(it - cumulative.begin());
        if (index >= cumulative.size()) index = cumulative.size() - 1;
        return adjacency_[v][index].vertex;
    }

private:
    WeightedGraph() = default;

    void check(VertexId v) const {
        if (v >= labels_.size()) throw GraphError(GraphErrc::unknown_vertex, "vertex id " + std::to_string(v));
    }

    void finalize() {
        const std::size_t n = labels_.size();
        adjacency_.assign(n, {});
        vertex_weight_.assign(n, Rational(0));
        vertex_weight_d_.assign(n, 0.0);
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const Edge& e = edges_[i];
            adjacency_[e.u].push_back({e.v, i});
            adjacency_[e.v].push_back({e.u, i});
            vertex_weight_[e.u] += e.weight;
            vertex_weight_[e.v] += e.weight;
        }
        cumulative_.assign(n, {});
        for (std::size_t v = 0; v < n; ++v) {
            auto& adj = adjacency_[v];
            std::sort(adj.begin(), adj.end(), [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
            double running = 0.0;
            for (const Neighbor& nb : adj) {
                running += edges_[nb.edge].weight_d;
                cumulative_[v].push_back(running);
            }
            vertex_weight_d_[v] = vertex_weight_[v].get_d();
        }
        std::vector<bool> reached(n, false);
        std::vector<VertexId> stack{0};
        reached[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (const Neighbor& nb : adjacency_[v]) {
                if (!reached[nb.vertex]) {
                    reached[nb.vertex] = true;
                    ++count;
                    stack.push_back(nb.vertex);
                }
            }
        }
        if (count != n) {
            VertexId missing = 0;
            while (reached[missing]) ++missing;
            throw GraphError(GraphErrc::disconnected, labels_[missing] + " unreachable from " + labels_[0]);
        }
    }

    std::vector<std::string> labels_;
    std::unordered_map<std::string, VertexId> index_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::vector<Rational> vertex_weight_;
    std::vector<double> vertex_weight_d_;
    std::vector<std::vector<double>> cumulative_;
};

inline WeightedGraph build_graph(std::span<const EdgeSpec> edges) { return WeightedGraph::build(edges); }

inline WeightedGraph build_graph(std::initializer_list<EdgeSpec> edges) {
    return WeightedGraph::build(std::span<const EdgeSpec>(edges.begin(), edges.size()));
}

/// p(u, v) = w(u, v) / w(u) for the network random walk.
template <class Scalar = double>
Scalar transition_prob(const WeightedGraph& g, VertexId u, VertexId v) {
    auto e = g.edge_index(u, v);
    if (!e) return Scalar(0);
    if constexpr (std::is_same_v<Scalar, Rational>) {
        return Rational(g.edges()[*e].weight / g.vertex_weight(u));
    } else {
        return static_cast<Scalar>(g.edges()[*e].weight_d / g.vertex_weight_d(u));
    }
}

/// Start/end-marked directed multigraph. Parallel arcs are distinct
/// objects identified by their index.
class MultiDigraph {
public:
    MultiDigraph(std::size_t universe, std::vector<Arc> arcs, std::optional<VertexId> start = std::nullopt,
                 std::optional<VertexId> end = std::nullopt)
        : universe_(universe), arcs_(std::move(arcs)), start_(start), end_(end) {
        indeg_.assign(universe_, 0);
        outdeg_.assign(universe_, 0);
        std::vector<bool> present(universe_, false);
        auto mark = [&](VertexId v) {
            if (v >= universe_) throw GraphError(GraphErrc::unknown_vertex, "vertex id " + std::to_string(v));
            present[v] = true;
        };
        for (const Arc& a : arcs_) {
            mark(a.tail);
            mark(a.head);
            ++outdeg_[a.tail];
            ++indeg_[a.head];
        }
        if (start_) mark(*start_);
        if (end_) mark(*end_);
        for (VertexId v = 0; v < universe_; ++v)
            if (present[v]) vertices_.push_back(v);
    }

    std::size_t universe() const { return universe_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    /// Sorted vertex set: arc endpoints plus the marks.
    const std::vector<VertexId>& vertices() const { return vertices_; }
    bool contains(VertexId v) const { return std::binary_search(vertices_.begin(), vertices_.end(), v); }
    std::optional<VertexId> start() const { return start_; }
    std::optional<VertexId> end() const { return end_; }
    std::size_t indeg(VertexId v) const { return v < universe_ ? indeg_[v] : 0; }
    std::size_t outdeg(VertexId v) const { return v < universe_ ? outdeg_[v] : 0; }

    /// First vertex whose degree surplus disagrees with the start/end marks,
    /// or nullopt when balanced. Requires both marks.
    std::optional<VertexId> balance_violation() const {
        if (!start_ || !end_) return vertices_.empty() ? std::nullopt : std::optional<VertexId>(vertices_.front());
        for (VertexId v : vertices_) {
            long surplus = static_cast<long>(outdeg_[v]) - static_cast<long>(indeg_[v]);
            long expected = (v == *start_ ? 1 : 0) - (v == *end_ ? 1 : 0);
            if (surplus != expected) return v;
        }
        return std::nullopt;
    }

    bool balanced() const { return !balance_violation().has_value(); }

private:
    std::size_t universe_;
    std::vector<Arc> arcs_;
    std::optional<VertexId> start_;
    std::optional<VertexId> end_;
    std::vector<VertexId> vertices_;
    std::vector<std::size_t> indeg_;
    std::vector<std::size_t> outdeg_;
};

/// Irreducible finite Markov chain.
class MarkovChain {
public:
    static constexpr double kRowTolerance = 1e-12;

    explicit MarkovChain(std::vector<std::vector<double>> transition, std::vector<std::string> labels = {})
        : p_(std::move(transition)), labels_(std::move(labels)) {
        const std::size_t n = p_.size();
        if (n == 0) throw GraphError(GraphErrc::invalid_chain, "empty state space");
        if (labels_.empty())
            for (std::size_t i = 0; i < n; ++i) labels_.push_back(std::to_string(i));
        if (labels_.size() != n) throw GraphError(GraphErrc::invalid_chain, "label count mismatch");
        cumulative_.assign(n, {});
        successors_.assign(n, {});
        for (std::size_t u = 0; u < n; ++u) {
            if (p_[u].size() != n) throw GraphError(GraphErrc::invalid_chain, "row " + std::to_string(u) + " not square");
            double sum = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                double x = p_[u][v];
                if (!(x >= 0.0) || !std::isfinite(x))
                    throw GraphError(GraphErrc::invalid_chain, "negative or non-finite entry in row " + std::to_string(u));
                sum += x;
                if (x > 0.0) {
                    successors_[u].push_back(static_cast<VertexId>(v));
                    cumulative_[u].push_back(sum);
                }
            }
            if (std::abs(sum - 1.0) > kRowTolerance)
                throw GraphError(GraphErrc::invalid_chain, "row " + std::to_string(u) + " sums to " + std::to_string(sum));
        }
        if (!strongly_connected()) throw GraphError(GraphErrc::reducible_chain, "positive-entry digraph not strongly connected");
        stationary_ = solve_stationary();
    }

    /// Network random walk of a weighted graph.
    static MarkovChain from_graph(const WeightedGraph& g) {
        const std::size_t n = g.vertex_count();
        std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
        for (VertexId u = 0; u < n; ++u)
            for (const auto& nb : g.neighbors(u)) p[u][nb.vertex] = transition_prob<double>(g, u, nb.vertex);
        return MarkovChain(std::move(p), g.labels());
    }

    std::size_t size() const { return p_.size(); }
    double p(VertexId u, VertexId v) const { return p_.at(u).at(v); }
    const std::vector<std::vector<double>>& matrix() const { return p_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<VertexId>& successors(VertexId u) const { return successors_.at(u); }

    /// pi solving pi P = pi, sum pi = 1.
    const std::vector<double>& stationary() const { return stationary_; }

    VertexId sample_next(VertexId u, double draw) const {
        const auto& cumulative = cumulative_[u];
        double target = draw * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        auto index = static_cast<std::size_t>(it - cumulative.begin());
        if (index >= cumulative.size()) index = cumulative.size() - 1;
        return successors_[u][index];
    }

    /// I - P as an Eigen matrix.
    Eigen::MatrixXd laplacian() const {
        const auto n = static_cast<Eigen::Index>(size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                m(i, j) -= p_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        return m;
    }

private:
    bool strongly_connected() const {
        const std::size_t n = p_.size();
        auto reach = [&](bool forward) {
            std::vector<bool> seen(n, false);
            std::vector<std::size_t> stack{0};
            seen[0] = true;
            std::size_t count = 1;
            while (!stack.empty()) {
                std::size_t u = stack.back();
                stack.pop_back();
                for (std::size_t v = 0; v < n; ++v) {
                    double x = forward ? p_[u][v] : p_[v][u];
                    if (x > 0.0 && !seen[v]) {
                        seen[v] = true;
                        ++count;
                        stack.push_back(v);
                    }
                }
            }
            return count == n;
        };
        return reach(true) && reach(false);
    }

    std::vector<double> solve_stationary() const {
        const auto n = static_cast<Eigen::Index>(size());
        // (P^T - I) pi = 0 with the last equation replaced by sum pi = 1.
        Eigen::MatrixXd a = -laplacian().transpose();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        a.row(n - 1).setOnes();
        b(n - 1) = 1.0;
        Eigen::VectorXd pi = a.fullPivLu().solve(b);
        return std::vector<double>(pi.data(), pi.data() + n);
    }

    std::vector<std::vector<double>> p_;
    std::vector<std::string> labels_;
    std::vector<std::vector<double>> cumulative_;
    std::vector<std::vector<VertexId>> successors_;
    std::vector<double> stationary_;
};

/// Time reversal: p<-(v, u) = pi(u) p(u, v) / pi(v).
inline MarkovChain reversed_chain(const MarkovChain& mc) {
    const std::size_t n = mc.size();
    const auto& pi = mc.stationary();
    std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
    for (std::size_t v = 0; v < n; ++v) {
        double sum = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            r[v][u] = pi[u] * mc.p(static_cast<VertexId>(u), static_cast<VertexId>(v)) / pi[v];
            sum += r[v][u];
        }
        // Renormalize away the solve residual so the row check holds.
        for (double& x : r[v]) x /= sum;
    }
    return MarkovChain(std::move(r), mc.labels());
}

}  // namespace spanforge

#endif
