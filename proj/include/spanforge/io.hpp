#ifndef SPANFORGE_IO_HPP
#define SPANFORGE_IO_HPP

#include <spanforge/graph.hpp>
#include <spanforge/tree_ops.hpp>
#include <spanforge/walks.hpp>

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace spanforge {

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Whitespace-separated tokens of a line with any `#` comment removed.
inline std::vector<std::string> tokens_of(std::string line) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

inline std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

}  // namespace detail

/// `u v [w]` per line; weight defaults to 1 and is parsed exactly.
inline std::vector<EdgeSpec> parse_edge_list(std::istream& in) {
    std::vector<EdgeSpec> out;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        auto tok = detail::tokens_of(line);
        if (tok.empty()) continue;
        if (tok.size() < 2 || tok.size() > 3)
            throw InputError(detail::where(line_no) + "expected `u v [weight]`, got " + std::to_string(tok.size()) +
                             " fields");
        EdgeSpec spec{tok[0], tok[1], Rational(1)};
        if (tok.size() == 3) {
            try {
                spec.weight = parse_decimal(tok[2]);
            } catch (const std::invalid_argument& e) {
                throw InputError(detail::where(line_no) + e.what());
            }
        }
        out.push_back(std::move(spec));
    }
    return out;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

inline WeightedGraph read_graph(const std::string& path) {
    auto in = open_input(path);
    return build_graph(parse_edge_list(in));
}

/// Labeled multi-digraph read from `u v [multiplicity]` lines.
struct LabeledDigraph {
    std::vector<std::string> labels;
    std::vector<Arc> arcs;

    std::optional<VertexId> find(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return static_cast<VertexId>(i);
        return std::nullopt;
    }

    VertexId id(const std::string& label) const {
        auto v = find(label);
        if (!v) throw GraphError(GraphErrc::unknown_vertex, label);
        return *v;
    }
};

inline LabeledDigraph parse_digraph(std::istream& in) {
    LabeledDigraph out;
    std::map<std::string, VertexId> index;
    auto intern = [&](const std::string& label) {
        auto [it, inserted] = index.try_emplace(label, static_cast<VertexId>(out.labels.size()));
        if (inserted) out.labels.push_back(label);
        return it->second;
    };
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        auto tok = detail::tokens_of(line);
        if (tok.empty()) continue;
        if (tok.size() < 2 || tok.size() > 3)
            throw InputError(detail::where(line_no) + "expected `u v [multiplicity]`");
        std::uint64_t multiplicity = 1;
        if (tok.size() == 3) {
            std::size_t used = 0;
            try {
                multiplicity = std::stoull(tok[2], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok[2].size() || tok[2][0] == '-')
                throw InputError(detail::where(line_no) + "bad multiplicity `" + tok[2] + "`");
        }
        VertexId a = intern(tok[0]);
        VertexId b = intern(tok[1]);
        for (std::uint64_t i = 0; i < multiplicity; ++i) out.arcs.push_back({a, b});
    }
    if (out.arcs.empty()) throw InputError("digraph has no arcs");
    return out;
}

/// Chain with p(u, v) proportional to the weight of arc u -> v, read from
/// `u v [w]` lines.
inline MarkovChain parse_weighted_chain(std::istream& in) {
    std::vector<std::string> labels;
    std::map<std::string, VertexId> index;
    std::vector<std::tuple<VertexId, VertexId, double>> arcs;
    auto intern = [&](const std::string& label) {
        auto [it, inserted] = index.try_emplace(label, static_cast<VertexId>(labels.size()));
        if (inserted) labels.push_back(label);
        return it->second;
    };
    for (const EdgeSpec& spec : parse_edge_list(in)) {
        if (spec.weight <= 0) throw InputError("arc " + spec.u + " " + spec.v + " has non-positive weight");
        VertexId a = intern(spec.u);
        VertexId b = intern(spec.v);
        arcs.emplace_back(a, b, spec.weight.get_d());
    }
    if (arcs.empty()) throw InputError("chain has no arcs");
    const std::size_t n = labels.size();
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
    std::vector<double> row(n, 0.0);
    for (auto [a, b, w] : arcs) {
        p[a][b] += w;
        row[a] += w;
    }
    for (std::size_t u = 0; u < n; ++u) {
        if (row[u] == 0.0) throw GraphError(GraphErrc::invalid_chain, "state " + labels[u] + " has no outgoing arc");
        for (double& x : p[u]) x /= row[u];
    }
    return MarkovChain(std::move(p), std::move(labels));
}

/// Whitespace-separated vertex labels.
inline Path parse_path(const WeightedGraph& g, const std::string& text) {
    std::istringstream in(text);
    std::vector<VertexId> vs;
    for (std::string t; in >> t;) vs.push_back(g.id(t));
    if (vs.empty()) throw PathError("empty path");
    Path p(std::move(vs));
    validate_path(g, p);
    return p;
}

inline std::string format_path(std::span<const std::string> labels, const Path& path) {
    std::string out;
    for (std::size_t i = 0; i <= path.length(); ++i) {
        if (i) out += ' ';
        out += labels[path[i]];
    }
    return out;
}

inline std::string format_path(const WeightedGraph& g, const Path& path) { return format_path(g.labels(), path); }

namespace detail {

inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace detail

/// FNV-1a over the canonical edge list, as 16 hex digits.
inline std::string graph_hash(const WeightedGraph& g) {
    std::string text;
    for (const auto& e : g.edges()) text += g.label(e.u) + ' ' + g.label(e.v) + ' ' + e.weight.get_str() + '\n';
    return detail::fnv1a_hex(text);
}

/// Same digest over the arcs of a chain with their probabilities.
inline std::string chain_hash(const MarkovChain& mc) {
    std::ostringstream text;
    text.precision(17);
    for (std::size_t u = 0; u < mc.size(); ++u)
        for (VertexId v : mc.successors(u)) text << mc.labels()[u] << ' ' << mc.labels()[v] << ' ' << mc.p(u, v) << '\n';
    return detail::fnv1a_hex(text.str());
}

/// Style class by position from the darkest end of a vertex's order:
/// black for the order maximum when it is black, then dark, then light.
inline const char* edge_style_class(const ColoredMultiDigraph& cmd, std::size_t edge) {
    const Arc& a = cmd.arcs()[edge];
    VertexId owner = cmd.coloring() == Coloring::exit ? a.tail : a.head;
    const auto& order = cmd.order(owner);
    auto it = std::find(order.begin(), order.end(), edge);
    std::size_t from_top = static_cast<std::size_t>(order.end() - it) - 1;
    bool has_black = cmd.black(owner).has_value();
    if (has_black && from_top == 0) return "black";
    if (from_top == (has_black ? 1u : 0u)) return "dark";
    return "light";
}

/// DOT rendering: light edges brown and dashed, dark edges gray, black
/// edges thick; edge labels give the position in the vertex order.
inline std::string to_dot(const ColoredMultiDigraph& cmd, std::span<const std::string> labels,
                          const std::string& name = "encoding") {
    std::ostringstream out;
    out << "digraph \"" << name << "\" {\n";
    out << "  // coloring=" << (cmd.coloring() == Coloring::exit ? "exit" : "entrance") << "\n";
    for (VertexId v : cmd.vertices()) {
        out << "  \"" << labels[v] << "\"";
        if (v == cmd.start() && v == cmd.end())
            out << " [shape=doublecircle, xlabel=\"start/end\"]";
        else if (v == cmd.start())
            out << " [shape=doublecircle, xlabel=\"start\"]";
        else if (v == cmd.end())
            out << " [shape=doublecircle, xlabel=\"end\"]";
        out << ";\n";
    }
    for (std::size_t e = 0; e < cmd.edge_count(); ++e) {
        const Arc& a = cmd.arcs()[e];
        VertexId owner = cmd.coloring() == Coloring::exit ? a.tail : a.head;
        const auto& order = cmd.order(owner);
        auto rank = static_cast<std::size_t>(std::find(order.begin(), order.end(), e) - order.begin()) + 1;
        std::string cls = edge_style_class(cmd, e);
        out << "  \"" << labels[a.tail] << "\" -> \"" << labels[a.head] << "\" [class=\"" << cls << "\", ";
        if (cls == "black")
            out << "color=black, penwidth=2.5";
        else if (cls == "dark")
            out << "color=gray";
        else
            out << "color=brown, style=dashed";
        out << ", label=\"" << rank << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

inline nlohmann::json to_json(const ColoredMultiDigraph& cmd, std::span<const std::string> labels) {
    nlohmann::json j;
    j["coloring"] = cmd.coloring() == Coloring::exit ? "exit" : "entrance";
    j["start"] = labels[cmd.start()];
    j["end"] = labels[cmd.end()];
    j["arcs"] = nlohmann::json::array();
    for (const Arc& a : cmd.arcs()) j["arcs"].push_back({labels[a.tail], labels[a.head]});
    j["order"] = nlohmann::json::object();
    for (VertexId v : cmd.vertices()) j["order"][labels[v]] = cmd.order(v);
    return j;
}

inline ColoredMultiDigraph colored_from_json(const nlohmann::json& j, const WeightedGraph& g) {
    try {
        Coloring coloring = j.at("coloring").get<std::string>() == "exit" ? Coloring::exit : Coloring::entrance;
        std::vector<Arc> arcs;
        for (const auto& pair : j.at("arcs"))
            arcs.push_back({g.id(pair.at(0).get<std::string>()), g.id(pair.at(1).get<std::string>())});
        std::vector<std::vector<std::size_t>> order(g.vertex_count());
        for (const auto& [label, list] : j.at("order").items()) order[g.id(label)] = list.get<std::vector<std::size_t>>();
        return ColoredMultiDigraph(g.vertex_count(), std::move(arcs), g.id(j.at("start").get<std::string>()),
                                   g.id(j.at("end").get<std::string>()), coloring, std::move(order));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed encoding JSON: ") + e.what());
    }
}

/// [[u, v], ...] with labels, in canonical order.
inline nlohmann::json tree_to_json(std::span<const std::string> labels, const TreeKey& key) {
    nlohmann::json out = nlohmann::json::array();
    for (const UEdge& e : key) out.push_back({labels[e.first], labels[e.second]});
    return out;
}

inline nlohmann::json arcs_to_json(std::span<const std::string> labels, const ArcKey& key) {
    nlohmann::json out = nlohmann::json::array();
    for (const Arc& a : key) out.push_back({labels[a.tail], labels[a.head]});
    return out;
}

}  // namespace spanforge

#endif
