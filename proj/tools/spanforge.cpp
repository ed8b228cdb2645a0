#include <spanforge/spanforge.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace spanforge;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

/// Usage or input error; `tag` names the kind on stderr.
struct UsageError : std::runtime_error {
    std::string tag;
    UsageError(std::string t, const std::string& what) : std::runtime_error(what), tag(std::move(t)) {}
};

struct Config {
    std::string graph;
    std::string algorithm = "rab";
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::string root;
    std::string start;
    std::string end;
    std::string format;
    std::size_t max_len = 6;
    double tolerance = 1e-10;
    double significance = 1e-3;
    std::string suite = "all";
    std::size_t edges = 8;
    bool directed = false;
    bool trees = false;
    bool round_trip = false;
    bool brute_force = false;
    std::vector<std::string> path;
};

WeightedGraph load_graph(const std::string& file) {
    if (file.empty()) throw UsageError("missing-graph", "--graph is required");
    auto in = open_input(file);
    auto specs = parse_edge_list(in);
    if (specs.empty()) throw UsageError("empty-graph", file + " has no edges");
    return build_graph(specs);
}

VertexId vertex_or(const std::vector<std::string>& labels, const std::string& label, VertexId fallback) {
    if (label.empty()) return fallback;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<VertexId>(i);
    throw GraphError(GraphErrc::unknown_vertex, "unknown vertex label `" + label + "`");
}

std::string tree_tsv(std::span<const std::string> labels, const ArcKey& tree, bool directed) {
    std::string out;
    for (const Arc& a : tree) {
        if (!out.empty()) out += ',';
        out += labels[a.tail] + (directed ? ">" : "-") + labels[a.head];
    }
    return out;
}

int cmd_sample(const Config& cfg) {
    auto algorithm = parse_algorithm(cfg.algorithm);
    if (!algorithm) throw UsageError("unknown-algorithm", "unknown algorithm `" + cfg.algorithm + "`");
    if (cfg.format != "json" && cfg.format != "tsv") throw UsageError("bad-format", "sample supports json or tsv");
    std::optional<WeightedGraph> g;
    std::optional<MarkovChain> chain;
    std::vector<std::string> labels;
    std::string hash;
    if (is_directed(*algorithm)) {
        if (cfg.directed) {
            auto in = open_input(cfg.graph);
            chain.emplace(parse_weighted_chain(in));
        } else {
            chain.emplace(MarkovChain::from_graph(load_graph(cfg.graph)));
        }
        labels = chain->labels();
        hash = chain_hash(*chain);
    } else {
        if (cfg.directed) throw UsageError("bad-option", "--directed applies to dab and dwilson only");
        g.emplace(load_graph(cfg.graph));
        labels = g->labels();
        hash = graph_hash(*g);
    }
    const std::string& anchor_label = *algorithm == Algorithm::wilson || *algorithm == Algorithm::dwilson
                                          ? (cfg.root.empty() ? cfg.start : cfg.root)
                                          : (cfg.start.empty() ? cfg.root : cfg.start);
    VertexId anchor = vertex_or(labels, anchor_label, 0);
    SamplingTarget target = chain ? SamplingTarget(&*chain) : SamplingTarget(&*g);
    const bool directed = is_directed(*algorithm);
    const std::uint64_t samples = cfg.samples == 0 ? 1 : cfg.samples;

    BatchSummary summary;
    if (cfg.format == "tsv") std::cout << "index\tseed\tsteps\ttree\n";
    for (std::uint64_t i = 0; i < samples; ++i) {
        SampleRecord r = draw_sample(*algorithm, target, anchor, cfg.seed, i);
        summary.add(r);
        if (cfg.format == "json") {
            json rec{{"algorithm", to_string(*algorithm)},
                     {"seed", r.seed},
                     {"graph_hash", hash},
                     {"tree", arcs_to_json(labels, r.tree)},
                     {"steps", r.steps}};
            std::cout << rec.dump() << '\n';
        } else {
            std::cout << i << '\t' << r.seed << '\t' << r.steps << '\t' << tree_tsv(labels, r.tree, directed) << '\n';
        }
    }
    if (cfg.format == "json") {
        json hist = json::array();
        for (const auto& [tree, count] : summary.histogram)
            hist.push_back({{"tree", arcs_to_json(labels, tree)}, {"count", count}});
        json s{{"algorithm", to_string(*algorithm)},
               {"base_seed", cfg.seed},
               {"graph_hash", hash},
               {"samples", summary.samples},
               {"mean_steps", static_cast<double>(summary.total_steps) / static_cast<double>(summary.samples)},
               {"histogram", hist}};
        std::cout << json{{"summary", s}}.dump() << '\n';
    } else {
        std::cout << "# count\ttree\n";
        for (const auto& [tree, count] : summary.histogram)
            std::cout << "# " << count << '\t' << tree_tsv(labels, tree, directed) << '\n';
    }
    return kPass;
}

std::vector<CheckResult> run_suite(const std::string& suite, const Config& cfg) {
    std::vector<corpus::Instance> graphs;
    if (!cfg.graph.empty() && !cfg.directed)
        graphs.push_back({cfg.graph, load_graph(cfg.graph)});
    std::vector<CheckResult> out;
    auto guarded = [&](const std::string& instance, auto&& body) {
        try {
            body();
        } catch (const CapExceeded& e) {
            throw UsageError("cap-exceeded", "suite " + suite + " on " + instance + ": " + e.what());
        }
    };
    auto corpus_or_user = [&](std::size_t figure_one_len, std::size_t other_len) {
        if (!graphs.empty()) return std::vector<std::pair<corpus::Instance, std::size_t>>{{graphs[0], cfg.max_len}};
        std::vector<std::pair<corpus::Instance, std::size_t>> list;
        for (auto& in : corpus::all()) list.push_back({in, in.name == "figure-one" ? figure_one_len : other_len});
        return list;
    };
    if (suite == "bijection") {
        for (auto& [in, len] : corpus_or_user(std::min<std::size_t>(cfg.max_len, 6), cfg.max_len))
            guarded(in.name, [&] { out.push_back(suites::bijection(in.name, in.graph, len)); });
    } else if (suite == "corollary23") {
        for (auto& [in, len] : corpus_or_user(std::min<std::size_t>(cfg.max_len, 5), cfg.max_len))
            guarded(in.name, [&] {
                for (auto& r : suites::horizon_laws(in.name, in.graph, len)) out.push_back(r);
            });
    } else if (suite == "stopping") {
        for (auto& [in, len] : corpus_or_user(std::min<std::size_t>(cfg.max_len, 5), cfg.max_len))
            guarded(in.name, [&] {
                for (auto& r : suites::stopping(in.name, in.graph, len)) out.push_back(r);
            });
        if (graphs.empty()) out.push_back(suites::random_visit("triangle", corpus::triangle(), 0, {2}, 40).result);
    } else if (suite == "best") {
        out.push_back(suites::best(cfg.samples ? cfg.samples : 200, cfg.edges, cfg.seed));
    } else if (suite == "mctt") {
        out.push_back(suites::mctt(cfg.samples ? cfg.samples : 100, 5, cfg.seed, cfg.tolerance));
    } else if (suite == "lerw") {
        if (cfg.directed) {
            auto in = open_input(cfg.graph);
            out.push_back(suites::lerw(cfg.graph, parse_weighted_chain(in), false, cfg.tolerance));
        } else {
            for (auto& [in, len] : corpus_or_user(0, 0))
                out.push_back(suites::lerw(in.name, MarkovChain::from_graph(in.graph), true, cfg.tolerance));
            if (graphs.empty()) {
                Rng rng(cfg.seed);
                for (int i = 0; i < 5; ++i)
                    out.push_back(suites::lerw("random-chain-" + std::to_string(i),
                                               random_irreducible_chain(rng, 3 + rng.below(3)), false, cfg.tolerance));
            }
        }
    } else if (suite == "sampler") {
        auto algorithm = parse_algorithm(cfg.algorithm);
        if (!algorithm) throw UsageError("unknown-algorithm", "unknown algorithm `" + cfg.algorithm + "`");
        if (cfg.graph.empty()) throw UsageError("missing-graph", "suite sampler needs --graph");
        if (cfg.directed && !is_directed(*algorithm))
            throw UsageError("bad-option", "--directed applies to dab and dwilson only");
        std::optional<MarkovChain> chain;
        const WeightedGraph* g = graphs.empty() ? nullptr : &graphs[0].graph;
        if (is_directed(*algorithm)) {
            if (cfg.directed) {
                auto in = open_input(cfg.graph);
                chain.emplace(parse_weighted_chain(in));
            } else {
                chain.emplace(MarkovChain::from_graph(*g));
            }
        }
        const auto& labels = chain ? chain->labels() : g->labels();
        std::string anchor_label = cfg.root.empty() ? cfg.start : cfg.root;
        SamplingTarget target = chain ? SamplingTarget(&*chain) : SamplingTarget(g);
        out.push_back(suites::sampler(cfg.graph, *algorithm, target, vertex_or(labels, anchor_label, 0),
                                      cfg.samples ? cfg.samples : 100000, cfg.seed, cfg.significance));
    } else {
        throw UsageError("unknown-suite", "unknown suite `" + suite + "`");
    }
    return out;
}

int cmd_verify(const Config& cfg) {
    std::vector<std::string> names{cfg.suite};
    if (cfg.suite == "all") names = {"bijection", "corollary23", "stopping", "best", "mctt", "lerw"};
    std::vector<CheckResult> results;
    for (const auto& name : names)
        for (auto& r : run_suite(name, cfg)) results.push_back(std::move(r));
    bool ok = all_pass(results);
    if (cfg.format == "tsv") {
        std::cout << "check\tinstance\tstatus\tdiscrepancy\tdetail\n";
        for (const auto& r : results)
            std::cout << r.check << '\t' << r.instance << '\t' << (r.pass ? "pass" : "fail") << '\t' << r.discrepancies
                      << '\t' << r.detail << '\n';
    } else {
        json report{{"suite", cfg.suite}, {"status", ok ? "pass" : "fail"}, {"results", json::array()}};
        for (const auto& r : results) report["results"].push_back(r.to_json());
        std::cout << report.dump(2) << '\n';
    }
    return ok ? kPass : kFail;
}

int cmd_phi(const Config& cfg) {
    WeightedGraph g = load_graph(cfg.graph);
    std::string text;
    for (const auto& label : cfg.path) text += label + ' ';
    Path gamma = parse_path(g, text);
    Path image = phi(g, gamma);
    TreeEdges f = first_entrance_tree(gamma);
    TreeEdges l = last_exit_tree(image);
    bool round_trip_ok = f.same_tree(l) && path_probability<Rational>(g, image) == path_probability<Rational>(g, gamma) &&
                         crossing_counts(image) == crossing_counts(gamma);
    if (cfg.format == "dot") {
        std::cout << to_dot(encode_entrance(gamma, g.vertex_count()), g.labels(), "entrance-coloring");
        std::cout << to_dot(encode_exit(image, g.vertex_count()), g.labels(), "exit-coloring");
    } else if (cfg.format == "json") {
        json out{{"path", format_path(g, gamma)}, {"phi", format_path(g, image)}};
        if (cfg.trees) {
            out["first_entrance"] = tree_to_json(g.labels(), f.key());
            out["last_exit_of_phi"] = tree_to_json(g.labels(), l.key());
        }
        if (cfg.round_trip) out["round_trip"] = round_trip_ok ? "pass" : "fail";
        std::cout << out.dump() << '\n';
    } else {
        std::cout << format_path(g, image) << '\n';
        if (cfg.trees) {
            std::cout << "first-entrance\t" << tree_tsv(g.labels(), as_arc_key(f.key()), false) << '\n';
            std::cout << "last-exit-of-phi\t" << tree_tsv(g.labels(), as_arc_key(l.key()), false) << '\n';
        }
        if (cfg.round_trip) std::cout << "round-trip\t" << (round_trip_ok ? "pass" : "fail") << '\n';
    }
    return cfg.round_trip && !round_trip_ok ? kFail : kPass;
}

int cmd_count(const Config& cfg) {
    if (cfg.graph.empty()) throw UsageError("missing-graph", "--graph is required");
    auto in = open_input(cfg.graph);
    LabeledDigraph parsed = parse_digraph(in);
    const std::size_t n = parsed.labels.size();
    std::vector<long> surplus(n, 0);
    for (const Arc& a : parsed.arcs) {
        ++surplus[a.tail];
        --surplus[a.head];
    }
    std::optional<VertexId> start;
    std::optional<VertexId> end;
    for (VertexId v = 0; v < n; ++v) {
        if (surplus[v] == 1 && !start)
            start = v;
        else if (surplus[v] == -1 && !end)
            end = v;
        else if (surplus[v] != 0)
            throw UsageError("unbalanced", "digraph is not balanced at vertex `" + parsed.labels[v] +
                                               "` (out - in = " + std::to_string(surplus[v]) + ")");
    }
    if (start.has_value() != end.has_value()) {
        VertexId v = start ? *start : *end;
        throw UsageError("unbalanced", "digraph is not balanced at vertex `" + parsed.labels[v] + "`");
    }
    if (!start) {
        std::string label = cfg.start.empty() ? cfg.root : cfg.start;
        start = end = vertex_or(parsed.labels, label, 0);
    } else if (!cfg.start.empty() && parsed.id(cfg.start) != *start) {
        throw UsageError("unbalanced", "--start `" + cfg.start + "` is not the vertex with surplus out-degree");
    }
    MultiDigraph d(n, parsed.arcs, start, end);
    json out{{"start", parsed.labels[*start]},
             {"end", parsed.labels[*end]},
             {"arcs", parsed.arcs.size()},
             {"arborescences", count_arborescences(d, *start, Direction::away_from_root).get_str()},
             {"per_arborescence", eulerian_paths_per_arborescence(d).get_str()},
             {"eulerian", count_eulerian_total(d).get_str()}};
    bool ok = true;
    if (cfg.brute_force) {
        auto paths = enumerate_eulerian_paths(d, std::max<std::size_t>(cfg.edges, 12));
        out["brute_force"] = paths.size();
        ok = count_eulerian_total(d) == BigInt(static_cast<unsigned long>(paths.size()));
        out["status"] = ok ? "pass" : "fail";
    }
    if (cfg.format == "tsv") {
        for (const auto& [k, v] : out.items()) std::cout << k << '\t' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    } else {
        std::cout << out.dump() << '\n';
    }
    return ok ? kPass : kFail;
}

int report(const std::string& tag, const std::string& what) {
    std::cerr << "error[" << tag << "]: " << what << '\n';
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spanning tree samplers, path bijection and counting checks"};
    app.require_subcommand(1);
    Config cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph, "Edge list file (u v [weight]) or digraph (u v [multiplicity])");
        sub->add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
        sub->add_option("--format", cfg.format, "Output format: json, tsv or dot (phi defaults to plain text)");
        sub->add_option("--root", cfg.root, "Root vertex label");
        sub->add_option("--start", cfg.start, "Start vertex label");
        sub->add_option("--end", cfg.end, "End vertex label");
    };

    auto* sample = app.add_subcommand("sample", "Draw spanning trees");
    common(sample);
    sample->add_option("--algorithm", cfg.algorithm, "ab, rab, wilson, dab or dwilson")->capture_default_str();
    sample->add_option("--samples", cfg.samples, "Number of samples (default 1)");
    sample->add_flag("--directed", cfg.directed, "Read --graph as weighted arcs of a chain (dab, dwilson)");

    auto* verify = app.add_subcommand("verify", "Run verification suites");
    common(verify);
    verify->add_option("--suite", cfg.suite, "bijection, corollary23, stopping, best, mctt, lerw, sampler or all")
        ->capture_default_str();
    verify->add_option("--max-len", cfg.max_len, "Longest path length to enumerate")->capture_default_str();
    verify->add_option("--edges", cfg.edges, "Edge bound for random digraphs")->capture_default_str();
    verify->add_option("--samples", cfg.samples, "Instance or sample count");
    verify->add_option("--tolerance", cfg.tolerance, "Floating-point tolerance")->capture_default_str();
    verify->add_option("--significance", cfg.significance, "Chi-square significance level")->capture_default_str();
    verify->add_option("--algorithm", cfg.algorithm, "Sampler for the sampler suite")->capture_default_str();
    verify->add_flag("--directed", cfg.directed, "Read --graph as weighted arcs of a chain");

    auto* phi_cmd = app.add_subcommand("phi", "Apply the path bijection");
    common(phi_cmd);
    phi_cmd->add_option("path", cfg.path, "Vertex labels of the path")->required();
    phi_cmd->add_flag("--trees", cfg.trees, "Also print the first-entrance and last-exit trees");
    phi_cmd->add_flag("--round-trip", cfg.round_trip, "Check F(path) = L(phi(path)) and exit 1 on mismatch");

    auto* count = app.add_subcommand("count", "Count arborescences and Eulerian paths of a digraph");
    common(count);
    count->add_flag("--brute-force", cfg.brute_force, "Cross-check by enumerating Eulerian paths");
    count->add_option("--edges", cfg.edges, "Arc cap for brute force")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }
    if (cfg.format.empty()) cfg.format = phi_cmd->parsed() ? "text" : "json";
    if (cfg.format != "json" && cfg.format != "tsv" && cfg.format != "dot" && cfg.format != "text")
        return report("bad-format", "unknown format `" + cfg.format + "`");

    try {
        if (sample->parsed()) return cmd_sample(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (phi_cmd->parsed()) return cmd_phi(cfg);
        return cmd_count(cfg);
    } catch (const UsageError& e) {
        return report(e.tag, e.what());
    } catch (const GraphError& e) {
        return report(e.code() == GraphErrc::unknown_vertex ? "unknown-vertex" : "invalid-graph", e.what());
    } catch (const PathError& e) {
        return report("invalid-path", e.what());
    } catch (const InputError& e) {
        return report("bad-file", e.what());
    } catch (const StepCapExceeded& e) {
        return report("cap-exceeded", e.what());
    } catch (const CapExceeded& e) {
        return report("cap-exceeded", e.what());
    } catch (const BestError& e) {
        return report("invalid-digraph", e.what());
    } catch (const std::exception& e) {
        return report("internal", e.what());
    }
}
