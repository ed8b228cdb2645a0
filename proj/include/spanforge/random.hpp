#ifndef SPANFORGE_RANDOM_HPP
#define SPANFORGE_RANDOM_HPP

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

namespace spanforge {

/// Deterministic 64-bit generator. Streams are split by mixing a parent
/// seed with a stream index, so samplers never share state.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : engine_(mix(seed)) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform double in [0, 1) built from the top 53 bits; identical on
    /// every standard library, unlike std::uniform_real_distribution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = max() - max() % n;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % n;
    }

    /// Child stream `index` of `seed`.
    static Rng split(std::uint64_t seed, std::uint64_t index) { return Rng(derive_seed(seed, index)); }

    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
        return mix(seed ^ mix(index + 0x632be59bd9b4e019ULL));
    }

    /// splitmix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

inline constexpr std::uint64_t kDefaultStepCap = 100'000'000ULL;

/// Walk step cap; SPANFORGE_STEP_CAP overrides the default.
inline std::uint64_t default_step_cap() {
    if (const char* env = std::getenv("SPANFORGE_STEP_CAP")) {
        try {
            std::size_t used = 0;
            std::string text(env);
            unsigned long long value = std::stoull(text, &used);
            if (used == text.size() && value > 0) return value;
        } catch (const std::exception&) {
        }
    }
    return kDefaultStepCap;
}

}  // namespace spanforge

#endif
