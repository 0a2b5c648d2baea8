#pragma once

// Deterministic random number machinery. Every experiment in this library
// derives per-task streams from a (master seed, index) pair, so results are
// reproducible bit-for-bit regardless of worker count or execution order.

#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace sparseopt {

// splitmix64 constants, frozen. Changing any of these breaks golden outputs.
inline constexpr std::uint64_t kSeedGamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kMix1 = 0xBF58476D1CE4E5B9ULL;
inline constexpr std::uint64_t kMix2 = 0x94D049BB133111EBULL;

// 64-bit avalanche finalizer (splitmix64).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * kMix1;
    z = (z ^ (z >> 27)) * kMix2;
    return z ^ (z >> 31);
}

// Stream derivation: the index is spread by the odd constant kSeedGamma
// before mixing, so consecutive indices land far apart. derive_seed(s, i)
// equals the i-th output of a splitmix64 generator seeded with s.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(master_seed + kSeedGamma * (index + 1));
}

// Purpose tags, one per independent sub-stream of a sampler. Keeping edge
// presence and edge weights on separate streams means resampling one never
// shifts the other.
enum class StreamTag : std::uint64_t {
    EdgePresence = 1,
    EdgeWeight = 2,
    Offspring = 3,
    TreeWeight = 4,
    BridgeWeight = 5,
    EnvPrimary = 6,
    EnvResample = 7,
    Replicate = 8,
    Bootstrap = 9,
};

inline std::uint64_t derive_seed(std::uint64_t master_seed, StreamTag tag) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(tag));
}

// splitmix64 generator. Small state, full 64-bit output, passes standard
// avalanche/equidistribution smoke tests; entirely portable, unlike the
// std::<random> distributions whose outputs vary across implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kSeedGamma;
        return mix64(state_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double next_unit_pos() { return 1.0 - next_unit(); }

    // Exp(1) by inversion.
    double next_exp() { return -std::log(next_unit_pos()); }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Poisson by the multiplication method, chunked so the e^-lambda product
    // never underflows. Exact for all lambda >= 0.
    std::uint64_t next_poisson(double lambda) {
        if (lambda < 0.0 || !std::isfinite(lambda))
            throw std::invalid_argument("poisson: lambda must be finite and >= 0");
        std::uint64_t total = 0;
        while (lambda > 60.0) {
            total += poisson_small(60.0);
            lambda -= 60.0;
        }
        return total + poisson_small(lambda);
    }

private:
    std::uint64_t poisson_small(double lambda) {
        const double limit = std::exp(-lambda);
        std::uint64_t count = 0;
        double prod = next_unit_pos();
        while (prod > limit) {
            ++count;
            prod *= next_unit_pos();
        }
        return count;
    }

    std::uint64_t state_;
};

} // namespace sparseopt
