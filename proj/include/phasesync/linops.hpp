#pragma once

#include <cstdint>
#include <vector>

#include "phasesync/types.hpp"

namespace phasesync {

struct SpectralEstimate {
    double value = 0.0;
    CVector vector;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

CVector hermitian_matvec(const CMatrix& a, const CVector& x);

/// ||A|| for Hermitian A by power iteration on A^2 from a seeded unit start.
/// value = ||A v|| for the final unit iterate, so it never exceeds the true
/// norm. residual = ||A^2 v - value^2 v|| / value^2; converged iff residual <= tol.
/// A near-tie between the two spectral edges slows the residual far more than
/// the value, so callers that only need the value can pass a loose tol.
SpectralEstimate operator_norm(const CMatrix& a, double tol = 1e-12, int max_iter = 10000,
                               std::uint64_t seed = 0);

/// Top eigenpair of Hermitian Y by power iteration on Y + ||Y||_F I.
/// residual = ||Y v - lambda v||; converged iff residual <= tol * ||Y||_F.
SpectralEstimate leading_eigenvector(const CMatrix& y, double tol = 1e-12, int max_iter = 10000,
                                     std::uint64_t seed = 0);

/// k leading eigenpairs by sequential deflation. The first uses
/// leading_eigenvector; the rest are capped at sub_iter iterations since
/// bulk eigenvalues are nearly degenerate and only a rough basis is needed.
std::vector<SpectralEstimate> top_eigenvectors(const CMatrix& y, int k, double tol = 1e-12,
                                               int max_iter = 10000, int sub_iter = 200,
                                               std::uint64_t seed = 0);

}  // namespace phasesync
