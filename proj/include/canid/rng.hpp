#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace canid {

// Counter-based substream RNG. Substreams are derived by hashing
// (seed, index) so that parallel work split across blocks draws the
// same numbers regardless of scheduling.
inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t s = a;
    uint64_t h = splitmix64(s);
    s = h ^ (b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    return splitmix64(s);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // uniform in (0, 1): never returns 0 or 1
    double uniform01() {
        const double u = (next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller, cosine branch only; two uniforms per draw keeps the
    // stream position independent of past draw kinds.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double laplace(double loc, double scale) {
        const double u = uniform01() - 0.5;
        const double a = std::abs(u);
        const double mag = -std::log(1.0 - 2.0 * (a < 0.5 ? a : 0.4999999999999999));
        return loc - scale * (u < 0 ? -mag : mag);
    }

    // index in [0, n)
    size_t index(size_t n) { return static_cast<size_t>(next_u64() % n); }

    // in-place Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(next_u64() % i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

inline Rng substream(uint64_t seed, uint64_t index) { return Rng(mix_seed(seed, index)); }

}  // namespace canid
