#ifndef SPANFORGE_CORPUS_HPP
#define SPANFORGE_CORPUS_HPP

#include <spanforge/graph.hpp>
#include <spanforge/walks.hpp>

#include <string>
#include <vector>

namespace spanforge::corpus {

inline WeightedGraph triangle() { return build_graph({{"a", "b"}, {"b", "c"}, {"c", "a"}}); }

/// w(ab) = 2, w(bc) = w(ca) = 1.
inline WeightedGraph weighted_triangle() {
    return build_graph({{"a", "b", Rational(2)}, {"b", "c", Rational(1)}, {"c", "a", Rational(1)}});
}

inline WeightedGraph path3() { return build_graph({{"a", "b"}, {"b", "c"}}); }

inline WeightedGraph four_cycle() { return build_graph({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}}); }

inline WeightedGraph k4() {
    return build_graph({{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}});
}

inline WeightedGraph two_vertex() { return build_graph({{"a", "b"}}); }

/// The eight-vertex worked example for the path bijection.
inline WeightedGraph figure_one() {
    return build_graph({{"x", "b"},
                        {"b", "d"},
                        {"d", "x"},
                        {"x", "a"},
                        {"a", "b"},
                        {"b", "c"},
                        {"c", "a"},
                        {"b", "y"},
                        {"y", "u"},
                        {"u", "v"},
                        {"v", "d"},
                        {"d", "y"}});
}

inline Path labeled_path(const WeightedGraph& g, const std::vector<std::string>& labels) {
    std::vector<VertexId> vs;
    for (const auto& l : labels) vs.push_back(g.id(l));
    Path p(std::move(vs));
    validate_path(g, p);
    return p;
}

inline const std::vector<std::string>& figure_one_path() {
    static const std::vector<std::string> labels{"x", "b", "d", "x", "a", "b", "c",
                                                 "a", "b", "y", "u", "v", "d", "y"};
    return labels;
}

inline const std::vector<std::string>& figure_one_image() {
    static const std::vector<std::string> labels{"x", "d", "v", "u", "y", "d", "b",
                                                 "a", "c", "b", "a", "x", "b", "y"};
    return labels;
}

struct Instance {
    std::string name;
    WeightedGraph graph;
};

/// The fixed verification corpus.
inline std::vector<Instance> all() {
    return {{"triangle", triangle()},   {"path3", path3()},
            {"four-cycle", four_cycle()}, {"k4", k4()},
            {"weighted-triangle", weighted_triangle()}, {"figure-one", figure_one()}};
}

}  // namespace spanforge::corpus

#endif
