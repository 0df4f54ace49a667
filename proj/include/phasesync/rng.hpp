#pragma once

#include <cstdint>

#include "phasesync/types.hpp"

namespace phasesync {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Seed for stream `index` derived from `parent`. Used for every
/// parent -> child derivation (trial seeds, truth/noise/init streams).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Counter-based SplitMix64 stream: output k is mix64(seed + (k+1) * golden).
/// Gaussians come from the Box-Muller transform, one uniform pair per draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    /// Uniform on (0, 1], 53 bits.
    double uniform();
    /// Standard circular complex Gaussian: real and imaginary parts are
    /// independent N(0, 1/2), so E|w|^2 = 1.
    Complex complex_normal();
    /// Real N(0, 1).
    double normal();
    /// exp(i * theta) with theta uniform on [0, 2 pi).
    Complex unit_phase();

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

CVector random_complex_normal(Rng& rng, Eigen::Index n);

}  // namespace phasesync
