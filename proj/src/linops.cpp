#include "phasesync/linops.hpp"

#include <cmath>
#include <string>

#include "phasesync/rng.hpp"

namespace phasesync {

namespace {

void require_square(const CMatrix& a, const char* what) {
    if (a.rows() == 0 || a.rows() != a.cols())
        throw DimensionError(std::string(what) + ": matrix must be square and non-empty");
}

void require_iter(double tol, int max_iter, const char* what) {
    if (!(tol > 0.0)) throw DomainError(std::string(what) + ": tol must be positive");
    if (max_iter < 1) throw DomainError(std::string(what) + ": max_iter must be >= 1");
}

CVector random_unit(Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    CVector v = random_complex_normal(rng, n);
    return v / v.norm();
}

// Remove components along the given orthonormal vectors (twice, for stability).
void project_out(CVector& v, const std::vector<SpectralEstimate>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= b.vector * b.vector.dot(v);
}

SpectralEstimate shifted_power(const CMatrix& y, const std::vector<SpectralEstimate>& deflate, double tol,
                               int max_iter, std::uint64_t seed) {
    const double shift = y.norm();
    SpectralEstimate out;
    CVector v = random_unit(y.rows(), seed);
    project_out(v, deflate);
    v /= v.norm();
    CVector w;
    for (int it = 1; it <= max_iter; ++it) {
        w.noalias() = y * v;
        const double lambda = v.dot(w).real();
        out.iterations = it;
        out.value = lambda;
        out.residual = (w - lambda * v).norm();
        out.vector = v;
        if (out.residual <= tol * shift) {
            out.converged = true;
            break;
        }
        w += shift * v;
        project_out(w, deflate);
        const double nw = w.norm();
        if (!(nw > 0.0)) break;
        v = w / nw;
    }
    return out;
}

}  // namespace

CVector hermitian_matvec(const CMatrix& a, const CVector& x) {
    require_square(a, "hermitian_matvec");
    if (x.size() != a.cols()) throw DimensionError("hermitian_matvec: vector length mismatch");
    return a * x;
}

SpectralEstimate operator_norm(const CMatrix& a, double tol, int max_iter, std::uint64_t seed) {
    require_square(a, "operator_norm");
    require_iter(tol, max_iter, "operator_norm");
    SpectralEstimate out;
    CVector v = random_unit(a.rows(), seed);
    CVector w, u;
    for (int it = 1; it <= max_iter; ++it) {
        w.noalias() = a * v;
        const double mu = w.norm();
        out.iterations = it;
        out.vector = v;
        out.value = mu;
        if (mu == 0.0) {
            out.residual = 0.0;
            out.converged = true;
            break;
        }
        u.noalias() = a * w;
        const double mu2 = mu * mu;
        out.residual = (u - mu2 * v).norm() / mu2;
        if (out.residual <= tol) {
            out.converged = true;
            break;
        }
        v = u / u.norm();
    }
    return out;
}

SpectralEstimate leading_eigenvector(const CMatrix& y, double tol, int max_iter, std::uint64_t seed) {
    require_square(y, "leading_eigenvector");
    require_iter(tol, max_iter, "leading_eigenvector");
    return shifted_power(y, {}, tol, max_iter, seed);
}

std::vector<SpectralEstimate> top_eigenvectors(const CMatrix& y, int k, double tol, int max_iter, int sub_iter,
                                               std::uint64_t seed) {
    require_square(y, "top_eigenvectors");
    require_iter(tol, max_iter, "top_eigenvectors");
    if (k < 1 || k > y.rows()) throw DomainError("top_eigenvectors: k out of range");
    std::vector<SpectralEstimate> out;
    out.push_back(shifted_power(y, out, tol, max_iter, seed));
    for (int r = 1; r < k; ++r)
        out.push_back(shifted_power(y, out, tol, std::max(1, sub_iter), derive_seed(seed, r)));
    return out;
}

}  // namespace phasesync
