#include "phasesync/bounds.hpp"

#include <cmath>
#include <numbers>

#include "phasesync/surrogate.hpp"

namespace phasesync {

double exp_bound(Eigen::Index n, double sigma, double c) {
    if (n < 1 || !(sigma > 0.0)) throw DomainError("exp_bound: need n >= 1 and sigma > 0");
    const double nn = static_cast<double>(n);
    return c * std::exp(-nn / (8.0 * sigma * sigma)) + 2.0 * std::pow(nn, -10.0);
}

double tightness_threshold(Eigen::Index n) {
    if (n < 2) throw DomainError("tightness_threshold: need n >= 2");
    const double nn = static_cast<double>(n);
    return std::sqrt(nn / (9.0 * std::log(nn)));
}

double crude_loss_bound(double sigma, double w_norm, Eigen::Index n) {
    if (n < 1) throw DomainError("crude_loss_bound: need n >= 1");
    return 8.0 * sigma * w_norm / static_cast<double>(n);
}

double gaussian_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gaussian_tail_envelope(double x) { return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-0.5 * x * x); }

double min_delta(double eps, double sigma, double w_norm, Eigen::Index n) {
    return 2.0 * std::numbers::sqrt2 * (6.0 * eps + sigma * w_norm / static_cast<double>(n));
}

CountBound fixed_point_count_bound(const CMatrix& y, const CVector& z, double delta, double eps, double sigma,
                                   double w_norm) {
    if (y.rows() != z.size()) throw DimensionError("fixed_point_count_bound: length mismatch");
    const Eigen::Index n = z.size();
    const double nn = static_cast<double>(n);
    const CVector yz = y * z;
    return {8.0 / nn * static_cast<double>(count_small_coordinates(yz, delta * nn)),
            delta >= min_delta(eps, sigma, w_norm, n)};
}

BoundInputs tightness_recipe(Eigen::Index n, double sigma, double w_norm) {
    if (n < 1) throw DomainError("tightness_recipe: need n >= 1");
    const double rn = std::sqrt(static_cast<double>(n));
    BoundInputs b;
    b.c0 = w_norm / rn;
    b.epsilon = std::sqrt(8.0 * b.c0 * sigma / rn);
    b.delta = 49.0 * std::sqrt(b.c0 * sigma / rn);
    b.h = b.delta * rn;
    return b;
}

bool recipe_margin_holds(Eigen::Index n, double sigma, double c0) {
    const double rn = std::sqrt(static_cast<double>(n));
    const double r = c0 * sigma / rn;
    return (196.0 + 2.0 * std::numbers::sqrt2 + 49.0 / rn) * std::sqrt(r) + 3.0 * r <= 0.25;
}

}  // namespace phasesync
