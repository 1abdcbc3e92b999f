#pragma once

#include <cstdint>

namespace polysurf {

/// splitmix64; deterministic across platforms, unlike <random> distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return next() % n; }

    /// Derive an independent stream (e.g. per orbit index).
    static Rng stream(std::uint64_t seed, std::uint64_t idx) {
        Rng mix(seed ^ (0x632be59bd9b4e019ull * (idx + 1)));
        mix.next();
        return mix;
    }

private:
    std::uint64_t state_;
};

}  // namespace polysurf
