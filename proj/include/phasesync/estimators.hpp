#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phasesync/model.hpp"

namespace phasesync {

template <class Iterate>
struct FixedPointResult {
    Iterate iterate;
    int iterations = 0;
    /// ||F(x) - x|| at the returned iterate.
    double residual = 0.0;
    double objective = 0.0;
    bool converged = false;
    /// Objective after each iteration, when requested.
    std::vector<double> trace;
};

struct SolverOptions {
    /// Stop once ||x_{T+1} - x_T|| <= tol. Non-positive means 1e-12 * sqrt(n).
    double tol = 0.0;
    int max_iter = 10000;
    bool record_trace = false;
};

double default_solver_tol(Eigen::Index n);

/// [F1(z)]_j = [Yz]_j / |[Yz]_j|, keeping z_j where [Yz]_j = 0.
PhaseVector apply_f1(const CMatrix& y, const PhaseVector& z);
CVector apply_f1(const CMatrix& y, const CVector& z);

/// Column j of F_m(V) is the normalized column j of V Y^H, keeping V_j where
/// that column vanishes.
UnitColumnMatrix apply_fm(const CMatrix& y, const UnitColumnMatrix& v);
CMatrix apply_fm(const CMatrix& y, const CMatrix& v);

/// Entrywise-normalized leading eigenvector of Y.
PhaseVector spectral_init(const CMatrix& y, std::uint64_t seed = 0);

/// Rank-k start (k = min(m, 3)) built from the leading eigenvectors of Y with
/// weights 1, 1/2, 1/3, plus a small seeded full-rank Gaussian term so the
/// iteration can leave that subspace (F_m never raises rank), then
/// column-normalized.
UnitColumnMatrix bm_default_init(const CMatrix& y, int m, std::uint64_t seed);

FixedPointResult<PhaseVector> solve_mle(const CMatrix& y, const std::optional<PhaseVector>& init = std::nullopt,
                                        const SolverOptions& opts = {});

FixedPointResult<UnitColumnMatrix> solve_bm(const CMatrix& y, int m,
                                            const std::optional<UnitColumnMatrix>& init = std::nullopt,
                                            const SolverOptions& opts = {}, std::uint64_t seed = 0);

struct BruteForceResult {
    PhaseVector maximizer;
    double objective = 0.0;
    double grid_objective = 0.0;
    bool refined = false;
};

/// Exhaustive maximization of z^H Y z over z_1 = 1 and z_j in the K-th roots
/// of unity. With refine, the grid maximizer seeds solve_mle and the better
/// of the two is returned with its first entry rotated to 1.
BruteForceResult brute_force_mle(const CMatrix& y, int k, bool refine = true);

}  // namespace phasesync
