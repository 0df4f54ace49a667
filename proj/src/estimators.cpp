#include "phasesync/estimators.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "phasesync/linops.hpp"
#include "phasesync/losses.hpp"
#include "phasesync/rng.hpp"

namespace phasesync {

namespace {

void require_square(const CMatrix& y, const char* what) {
    if (y.rows() == 0 || y.rows() != y.cols())
        throw DimensionError(std::string(what) + ": Y must be square and non-empty");
}

double resolve_tol(const SolverOptions& opts, Eigen::Index n) {
    if (opts.max_iter < 1) throw DomainError("solver: max_iter must be >= 1");
    return opts.tol > 0.0 ? opts.tol : default_solver_tol(n);
}

}  // namespace

double default_solver_tol(Eigen::Index n) { return 1e-12 * std::sqrt(static_cast<double>(n)); }

CVector apply_f1(const CMatrix& y, const CVector& z) {
    require_square(y, "apply_f1");
    if (z.size() != y.rows()) throw DimensionError("apply_f1: length mismatch");
    return normalize_entries(y * z, z);
}

PhaseVector apply_f1(const CMatrix& y, const PhaseVector& z) {
    return PhaseVector::trusted(apply_f1(y, z.values()));
}

CMatrix apply_fm(const CMatrix& y, const CMatrix& v) {
    require_square(y, "apply_fm");
    if (v.cols() != y.rows() || v.rows() == 0) throw DimensionError("apply_fm: shape mismatch");
    return normalize_columns(v * y.adjoint(), v);
}

UnitColumnMatrix apply_fm(const CMatrix& y, const UnitColumnMatrix& v) {
    return UnitColumnMatrix::trusted(apply_fm(y, v.values()));
}

PhaseVector spectral_init(const CMatrix& y, std::uint64_t seed) {
    require_square(y, "spectral_init");
    return normalize_entries(leading_eigenvector(y, 1e-12, 10000, seed).vector);
}

UnitColumnMatrix bm_default_init(const CMatrix& y, int m, std::uint64_t seed) {
    require_square(y, "bm_default_init");
    if (m < 1) throw DomainError("bm_default_init: m must be >= 1");
    const Eigen::Index n = y.rows();
    const int k = std::min<int>(std::min(m, 3), static_cast<int>(n));
    const auto eig = top_eigenvectors(y, k, 1e-12, 10000, 200, derive_seed(seed, 0));
    const double scale = std::sqrt(static_cast<double>(n));
    CMatrix v = CMatrix::Zero(m, n);
    for (int r = 0; r < k; ++r) v.row(r) = (scale / (1.0 + r)) * eig[r].vector.adjoint();
    Rng rng(derive_seed(seed, 1));
    const double eta = 0.05 / std::sqrt(static_cast<double>(m));
    for (Eigen::Index j = 0; j < n; ++j)
        for (int r = 0; r < m; ++r) v(r, j) += eta * rng.complex_normal();
    CMatrix e1 = CMatrix::Zero(m, n);
    e1.row(0).setOnes();
    return UnitColumnMatrix::trusted(normalize_columns(v, e1));
}

FixedPointResult<PhaseVector> solve_mle(const CMatrix& y, const std::optional<PhaseVector>& init,
                                        const SolverOptions& opts) {
    require_square(y, "solve_mle");
    const Eigen::Index n = y.rows();
    if (init && init->size() != n) throw DimensionError("solve_mle: init length mismatch");
    const double tol = resolve_tol(opts, n);
    CVector z = init ? init->values() : spectral_init(y).values();
    FixedPointResult<PhaseVector> out{PhaseVector::trusted(CVector()), 0, 0.0, 0.0, false, {}};
    CVector yz, next;
    for (int it = 1; it <= opts.max_iter; ++it) {
        yz.noalias() = y * z;
        next = normalize_entries(yz, z);
        const double step = (next - z).norm();
        z.swap(next);
        out.iterations = it;
        if (opts.record_trace) out.trace.push_back(objective_mle(y, z));
        if (step <= tol) {
            out.converged = true;
            break;
        }
    }
    yz.noalias() = y * z;
    out.residual = (normalize_entries(yz, z) - z).norm();
    out.objective = z.dot(yz).real();
    out.iterate = PhaseVector::trusted(std::move(z));
    return out;
}

FixedPointResult<UnitColumnMatrix> solve_bm(const CMatrix& y, int m, const std::optional<UnitColumnMatrix>& init,
                                            const SolverOptions& opts, std::uint64_t seed) {
    require_square(y, "solve_bm");
    if (m < 1) throw DomainError("solve_bm: m must be >= 1");
    const Eigen::Index n = y.rows();
    if (init && (init->cols() != n || init->rows() != m)) throw DimensionError("solve_bm: init shape mismatch");
    const double tol = resolve_tol(opts, n);
    CMatrix v = init ? init->values() : bm_default_init(y, m, seed).values();
    FixedPointResult<UnitColumnMatrix> out{UnitColumnMatrix::trusted(CMatrix()), 0, 0.0, 0.0, false, {}};
    CMatrix vy(m, n), next;
    for (int it = 1; it <= opts.max_iter; ++it) {
        vy.noalias() = v * y.adjoint();
        next = normalize_columns(vy, v);
        const double step = (next - v).norm();
        v.swap(next);
        out.iterations = it;
        if (opts.record_trace) out.trace.push_back(objective_bm(y, v));
        if (step <= tol) {
            out.converged = true;
            break;
        }
    }
    vy.noalias() = v * y.adjoint();
    out.residual = (normalize_columns(vy, v) - v).norm();
    out.objective = vy.cwiseProduct(v.conjugate()).sum().real();
    out.iterate = UnitColumnMatrix::trusted(std::move(v));
    return out;
}

BruteForceResult brute_force_mle(const CMatrix& y, int k, bool refine) {
    require_square(y, "brute_force_mle");
    const int n = static_cast<int>(y.rows());
    if (k < 2) throw DomainError("brute_force_mle: K must be >= 2");
    if (n > 6 || std::pow(static_cast<double>(k), n - 1) > 1e8)
        throw SizeError("brute_force_mle: grid too large (need n <= 6 and K^(n-1) <= 1e8)");

    std::vector<Complex> root(k);
    for (int i = 0; i < k; ++i) root[i] = std::polar(1.0, 2.0 * std::numbers::pi * i / k);

    std::vector<int> idx(n, 0);
    CVector z = CVector::Ones(n);
    CVector best = z;
    double best_obj = -std::numeric_limits<double>::infinity();
    for (;;) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) acc += (std::conj(z[a]) * y(a, b) * z[b]).real();
        double diag = 0.0;
        for (int a = 0; a < n; ++a) diag += y(a, a).real();
        const double obj = diag + 2.0 * acc;
        if (obj > best_obj) {
            best_obj = obj;
            best = z;
        }
        int p = n - 1;
        while (p >= 1 && ++idx[p] == k) {
            idx[p] = 0;
            z[p] = root[0];
            --p;
        }
        if (p < 1) break;
        z[p] = root[idx[p]];
    }

    BruteForceResult out{PhaseVector::trusted(best), best_obj, best_obj, false};
    if (refine) {
        auto fp = solve_mle(y, PhaseVector::trusted(best));
        if (fp.objective >= best_obj) {
            const Complex g = std::conj(fp.iterate[0]);
            CVector r = fp.iterate.values() * g;
            r[0] = 1.0;
            out.maximizer = PhaseVector::trusted(std::move(r));
            out.objective = fp.objective;
            out.refined = true;
        }
    }
    return out;
}

}  // namespace phasesync
