#include "phasesync/rng.hpp"

#include <cmath>
#include <numbers>

namespace phasesync {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix64(mix64(parent) ^ mix64(index + kGolden));
}

std::uint64_t Rng::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double Rng::uniform() {
    // (k + 1) / 2^53 for k in [0, 2^53): never zero, so log() is safe.
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

Complex Rng::complex_normal() {
    const double r = std::sqrt(-std::log(uniform()));
    const double a = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(a), r * std::sin(a)};
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const Complex w = complex_normal() * std::numbers::sqrt2;
    spare_ = w.imag();
    has_spare_ = true;
    return w.real();
}

Complex Rng::unit_phase() {
    const double a = 2.0 * std::numbers::pi * (uniform() - 0x1.0p-53);
    return {std::cos(a), std::sin(a)};
}

CVector random_complex_normal(Rng& rng, Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.complex_normal();
    return v;
}

}  // namespace phasesync
