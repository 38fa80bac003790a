#ifndef DEDT_RNG_HPP
#define DEDT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dedt {

// Deterministic random source. Distribution transforms are implemented here
// instead of <random> distributions so that streams are reproducible across
// standard library implementations. Streams can be derived by id, which keeps
// per-member work order-independent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)), seed_material_(mix(seed)) {}

    // Independent child stream; stable under the order in which siblings are drawn.
    Rng derive(std::uint64_t stream_id) const {
        return Rng(seed_material_ ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection sampling avoids modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller (both values consumed to keep the
    // stream position independent of call parity bookkeeping).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    std::uint64_t seed_material_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dedt

#endif
