#pragma once

#include <vector>

#include "phasesync/estimators.hpp"
#include "phasesync/model.hpp"

namespace phasesync {

/// Ingredients of the split Y = z* z*^H + sigma W. Non-owning.
struct ModelParts {
    const CVector* truth = nullptr;
    double sigma = 0.0;
    const CMatrix* noise = nullptr;

    /// Requires an observation that carries both truth and noise.
    static ModelParts of(const Observation& obs);
    ModelParts with_noise(const CMatrix& w) const { return {truth, sigma, &w}; }
    Eigen::Index n() const { return truth->size(); }
};

struct SurrogateParams {
    Complex s{0.0, 0.0};
    double t = 1.0;
};

/// Factor applied to estimated operator norms when checking preconditions
/// of the form t >= c sigma ||W||.
inline constexpr double kNormInflation = 1.01;

/// x / max(|x|, t).
Complex g_floor(Complex x, double t);
CVector g_floor(const CVector& x, double t);

/// z*_j s + sigma [W z]_j.
CVector surrogate_input(const CVector& z, Complex s, const ModelParts& parts);

/// Normalized surrogate input, keeping z_j where it vanishes.
CVector apply_f1_prime(const CVector& z, Complex s, const ModelParts& parts);

/// g_t applied entrywise to the surrogate input. Maps the soft set into itself.
CVector apply_g(const CVector& z, const SurrogateParams& p, const ModelParts& parts);

struct SurrogateFixedPoint {
    FixedPointResult<SoftPhaseVector> result;
    /// ||z_{T+1} - z_T|| for every iteration.
    std::vector<double> gaps;
    /// Whether every gap was at most half the previous one (up to roundoff).
    bool halving_held = true;
};

/// Iterates z <- G(z, s, t) from `start` (default z*). Requires
/// t >= 2 sigma ||W|| with ||W|| taken as kNormInflation * w_norm.
SurrogateFixedPoint fixed_point_g(const SurrogateParams& p, const ModelParts& parts, double w_norm,
                                  const SolverOptions& opts = {}, const CVector* start = nullptr);

/// W with row j and column j set to zero.
CMatrix mask_noise(const CMatrix& w, Eigen::Index j);

struct LeaveOneOutBundle {
    Eigen::Index index = 0;
    CMatrix masked_noise;
    /// Fixed point of the map built from the masked noise.
    SoftPhaseVector fixed_point = SoftPhaseVector::trusted(CVector());
    /// Fixed point of the full map.
    SoftPhaseVector full_fixed_point = SoftPhaseVector::trusted(CVector());
    /// ||z^(T) - z^(T,-j)|| for T = 0, 1, ... while either sequence moves.
    std::vector<double> gaps;
    double final_gap = 0.0;
    bool converged = false;
};

/// Runs the full and the masked iterations in lockstep from z*. A sequence
/// that has converged is held at its limit while the other finishes.
LeaveOneOutBundle leave_one_out(const SurrogateParams& p, const ModelParts& parts, Eigen::Index j, double w_norm,
                                const SolverOptions& opts = {});

/// Masked fixed point only; no trace.
SoftPhaseVector loo_fixed_point(const SurrogateParams& p, const ModelParts& parts, Eigen::Index j, double w_norm,
                                const SolverOptions& opts = {});

/// #{j : |x_j| < threshold}.
Eigen::Index count_small_coordinates(const CVector& x, double threshold);

/// s_k = n - k h for k = 0..ceil(n eps / h).
std::vector<double> grid_scalars(Eigen::Index n, double eps, double h);

}  // namespace phasesync
