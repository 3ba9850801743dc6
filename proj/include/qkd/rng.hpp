// Deterministic seeded randomness for all simulation and Monte Carlo code.
//
// Every random choice in the project flows from a single 64-bit master seed
// through derive_seed(master, index). SplitMix64 is fully specified by its
// update constants, so runs are reproducible across platforms and compilers
// (std::uniform_* distributions are implementation-defined and are not used).

#ifndef QKD_RNG_HPP
#define QKD_RNG_HPP

#include <cmath>
#include <cstdint>

namespace qkd {

inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed splitting scheme: child seed = hash of (master, stream index).
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
    uint64_t s = master ^ (0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL);
    splitmix64_next(s);
    return splitmix64_next(s);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // a few warm-up steps decorrelate near-identical seeds
        splitmix64_next(state_);
        splitmix64_next(state_);
    }

    uint64_t next_u64() { return splitmix64_next(state_); }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    // uniform double in [0, 1), 53 significant bits
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_unit() < p; }

    // uniform integer in [0, bound), unbiased via rejection
    uint64_t next_below(uint64_t bound) {
        if (bound <= 1) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    // standard normal via Box-Muller
    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
    }

private:
    uint64_t state_;
};

} // namespace qkd

#endif
