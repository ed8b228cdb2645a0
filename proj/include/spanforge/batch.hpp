#ifndef SPANFORGE_BATCH_HPP
#define SPANFORGE_BATCH_HPP

#include <spanforge/oracle.hpp>
#include <spanforge/samplers.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spanforge {

enum class Algorithm { ab, rab, wilson, dab, dwilson };

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "ab") return Algorithm::ab;
    if (name == "rab") return Algorithm::rab;
    if (name == "wilson") return Algorithm::wilson;
    if (name == "dab") return Algorithm::dab;
    if (name == "dwilson") return Algorithm::dwilson;
    return std::nullopt;
}

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::ab: return "ab";
        case Algorithm::rab: return "rab";
        case Algorithm::wilson: return "wilson";
        case Algorithm::dab: return "dab";
        case Algorithm::dwilson: return "dwilson";
    }
    return "?";
}

inline bool is_directed(Algorithm a) { return a == Algorithm::dab || a == Algorithm::dwilson; }

/// Undirected samplers run on a graph, directed ones on a chain.
using SamplingTarget = std::variant<const WeightedGraph*, const MarkovChain*>;

/// One sampled tree. Undirected trees store each edge as (min, max).
struct SampleRecord {
    std::uint64_t seed = 0;
    std::uint64_t steps = 0;
    ArcKey tree;
};

inline ArcKey as_arc_key(const TreeKey& key) {
    ArcKey out;
    for (const UEdge& e : key) out.push_back({e.first, e.second});
    return out;
}

/// Draws sample `index` of a batch. Its stream depends only on (seed, index).
inline SampleRecord draw_sample(Algorithm algorithm, const SamplingTarget& target, VertexId anchor,
                                std::uint64_t seed, std::uint64_t index, std::uint64_t step_cap = default_step_cap()) {
    SampleRecord out;
    out.seed = Rng::derive_seed(seed, index);
    Rng rng(out.seed);
    if (is_directed(algorithm)) {
        const MarkovChain& mc = *std::get<const MarkovChain*>(target);
        SampledArborescence s = algorithm == Algorithm::dab ? directed_aldous_broder(mc, anchor, rng, step_cap)
                                                             : directed_wilson(mc, anchor, rng, step_cap);
        out.steps = s.steps;
        out.tree = s.tree.key();
    } else {
        const WeightedGraph& g = *std::get<const WeightedGraph*>(target);
        SampledTree s = algorithm == Algorithm::ab    ? aldous_broder(g, anchor, rng, step_cap)
                        : algorithm == Algorithm::rab ? reverse_aldous_broder(g, anchor, rng, step_cap)
                                                      : wilson(g, anchor, rng, step_cap);
        out.steps = s.steps;
        out.tree = as_arc_key(s.tree.key());
    }
    return out;
}

/// Exact law each sampler targets, keyed like SampleRecord::tree.
inline ArborescenceDistribution<double> target_law(Algorithm algorithm, const SamplingTarget& target, VertexId anchor) {
    if (algorithm == Algorithm::dab) return exact_directed_ab_law(*std::get<const MarkovChain*>(target), anchor);
    if (algorithm == Algorithm::dwilson) return exact_directed_ust_law(*std::get<const MarkovChain*>(target), anchor);
    ArborescenceDistribution<double> out;
    for (const auto& [key, mass] : exact_ust_distribution(*std::get<const WeightedGraph*>(target)).mass)
        out.add(as_arc_key(key), mass.get_d());
    return out;
}

struct BatchSummary {
    std::uint64_t samples = 0;
    std::uint64_t total_steps = 0;
    std::map<ArcKey, std::uint64_t> histogram;

    void add(const SampleRecord& r) {
        ++samples;
        total_steps += r.steps;
        ++histogram[r.tree];
    }
};

inline BatchSummary sample_batch(Algorithm algorithm, const SamplingTarget& target, VertexId anchor, std::uint64_t seed,
                                 std::uint64_t samples, std::uint64_t step_cap = default_step_cap()) {
    BatchSummary summary;
    for (std::uint64_t i = 0; i < samples; ++i) summary.add(draw_sample(algorithm, target, anchor, seed, i, step_cap));
    return summary;
}

}  // namespace spanforge

#endif
