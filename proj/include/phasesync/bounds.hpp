#pragma once

#include "phasesync/model.hpp"

namespace phasesync {

/// c exp(-n / (8 sigma^2)) + 2 n^-10.
double exp_bound(Eigen::Index n, double sigma, double c);

/// sqrt(n / (9 log n)); the noise level below which tightness is expected.
double tightness_threshold(Eigen::Index n);

/// 8 sigma ||W|| / n.
double crude_loss_bound(double sigma, double w_norm, Eigen::Index n);

/// P(N(0,1) > x).
double gaussian_upper_tail(double x);
/// (2 / sqrt(pi)) exp(-x^2 / 2); dominates gaussian_upper_tail for x >= 0.
double gaussian_tail_envelope(double x);

/// 2 sqrt(2) (6 eps + sigma ||W|| / n): the smallest admissible delta in the
/// fixed-point count bound.
double min_delta(double eps, double sigma, double w_norm, Eigen::Index n);

struct CountBound {
    double value = 0.0;
    bool precondition_met = false;
};

/// (8/n) #{j : |[Y z]_j| < delta n}. precondition_met records whether
/// delta >= min_delta(eps, ...) holds.
CountBound fixed_point_count_bound(const CMatrix& y, const CVector& z, double delta, double eps, double sigma,
                                   double w_norm);

/// Parameter choice behind the high-probability tightness argument, with
/// c0 = ||W|| / sqrt(n) measured on the instance.
struct BoundInputs {
    double c0 = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double h = 0.0;
};

/// eps = (8 c0 sigma / sqrt n)^(1/2), delta = 49 (c0 sigma / sqrt n)^(1/2), h = delta sqrt n.
BoundInputs tightness_recipe(Eigen::Index n, double sigma, double w_norm);

/// Whether (196 + 2 sqrt 2 + 49 / sqrt n) (c0 sigma / sqrt n)^(1/2) + 3 c0 sigma / sqrt n <= 1/4,
/// the condition under which every leave-one-out threshold stays above n/2.
bool recipe_margin_holds(Eigen::Index n, double sigma, double c0);

}  // namespace phasesync
