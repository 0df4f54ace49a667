#include "phasesync/surrogate.hpp"

#include <cmath>
#include <string>

namespace phasesync {

namespace {

void require_len(const CVector& z, const ModelParts& parts, const char* what) {
    if (parts.truth == nullptr || parts.noise == nullptr) throw DomainError(std::string(what) + ": incomplete model");
    if (z.size() != parts.n() || parts.noise->rows() != parts.n())
        throw DimensionError(std::string(what) + ": length mismatch");
}

void require_contraction(const SurrogateParams& p, const ModelParts& parts, double w_norm, const char* what) {
    if (!(p.t > 0.0)) throw DomainError(std::string(what) + ": t must be positive");
    if (p.t < 2.0 * parts.sigma * kNormInflation * w_norm)
        throw PreconditionError(std::string(what) + ": requires t >= 2 sigma ||W||");
}

double resolve_tol(const SolverOptions& opts, Eigen::Index n) {
    if (opts.max_iter < 1) throw DomainError("surrogate: max_iter must be >= 1");
    return opts.tol > 0.0 ? opts.tol : default_solver_tol(n);
}

// Absolute slack on the halving test; gaps near roundoff are noise.
constexpr double kGapSlack = 1e-13;

}  // namespace

ModelParts ModelParts::of(const Observation& obs) {
    if (!obs.truth || !obs.noise) throw DomainError("surrogate: observation lacks truth or noise");
    return {&obs.truth->values(), obs.sigma, &obs.noise->w};
}

Complex g_floor(Complex x, double t) {
    if (!(t > 0.0)) throw DomainError("g_floor: t must be positive");
    return x / std::max(std::abs(x), t);
}

CVector g_floor(const CVector& x, double t) {
    if (!(t > 0.0)) throw DomainError("g_floor: t must be positive");
    CVector out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) out[j] = x[j] / std::max(std::abs(x[j]), t);
    return out;
}

CVector surrogate_input(const CVector& z, Complex s, const ModelParts& parts) {
    require_len(z, parts, "surrogate_input");
    CVector x = (*parts.noise) * z;
    x *= parts.sigma;
    x += (*parts.truth) * s;
    return x;
}

CVector apply_f1_prime(const CVector& z, Complex s, const ModelParts& parts) {
    return normalize_entries(surrogate_input(z, s, parts), z);
}

CVector apply_g(const CVector& z, const SurrogateParams& p, const ModelParts& parts) {
    return g_floor(surrogate_input(z, p.s, parts), p.t);
}

SurrogateFixedPoint fixed_point_g(const SurrogateParams& p, const ModelParts& parts, double w_norm,
                                  const SolverOptions& opts, const CVector* start) {
    require_contraction(p, parts, w_norm, "fixed_point_g");
    const double tol = resolve_tol(opts, parts.n());
    CVector z = start ? *start : *parts.truth;
    require_len(z, parts, "fixed_point_g");
    SurrogateFixedPoint out{{SoftPhaseVector::trusted(CVector()), 0, 0.0, 0.0, false, {}}, {}, true};
    for (int it = 1; it <= opts.max_iter; ++it) {
        CVector next = apply_g(z, p, parts);
        const double gap = (next - z).norm();
        if (!out.gaps.empty() && gap > 0.5 * out.gaps.back() + kGapSlack) out.halving_held = false;
        out.gaps.push_back(gap);
        z.swap(next);
        out.result.iterations = it;
        if (gap <= tol) {
            out.result.converged = true;
            break;
        }
    }
    out.result.residual = (apply_g(z, p, parts) - z).norm();
    out.result.iterate = SoftPhaseVector::trusted(std::move(z));
    return out;
}

CMatrix mask_noise(const CMatrix& w, Eigen::Index j) {
    if (j < 0 || j >= w.rows()) throw DimensionError("mask_noise: index out of range");
    CMatrix out = w;
    out.row(j).setZero();
    out.col(j).setZero();
    return out;
}

LeaveOneOutBundle leave_one_out(const SurrogateParams& p, const ModelParts& parts, Eigen::Index j, double w_norm,
                                const SolverOptions& opts) {
    require_contraction(p, parts, w_norm, "leave_one_out");
    const Eigen::Index n = parts.n();
    if (j < 0 || j >= n) throw DimensionError("leave_one_out: index out of range");
    const double tol = resolve_tol(opts, n);

    LeaveOneOutBundle out;
    out.index = j;
    out.masked_noise = mask_noise(*parts.noise, j);
    const ModelParts masked = parts.with_noise(out.masked_noise);

    CVector full = *parts.truth;
    CVector loo = full;
    bool full_done = false;
    bool loo_done = false;
    out.gaps.push_back(0.0);
    for (int it = 1; it <= opts.max_iter && !(full_done && loo_done); ++it) {
        if (!full_done) {
            CVector next = apply_g(full, p, parts);
            full_done = (next - full).norm() <= tol;
            full.swap(next);
        }
        if (!loo_done) {
            CVector next = apply_g(loo, p, masked);
            loo_done = (next - loo).norm() <= tol;
            loo.swap(next);
        }
        out.gaps.push_back((full - loo).norm());
    }
    out.converged = full_done && loo_done;
    out.final_gap = (full - loo).norm();
    out.fixed_point = SoftPhaseVector::trusted(std::move(loo));
    out.full_fixed_point = SoftPhaseVector::trusted(std::move(full));
    return out;
}

SoftPhaseVector loo_fixed_point(const SurrogateParams& p, const ModelParts& parts, Eigen::Index j, double w_norm,
                                const SolverOptions& opts) {
    if (j < 0 || j >= parts.n()) throw DimensionError("loo_fixed_point: index out of range");
    const CMatrix masked = mask_noise(*parts.noise, j);
    return fixed_point_g(p, parts.with_noise(masked), w_norm, opts).result.iterate;
}

Eigen::Index count_small_coordinates(const CVector& x, double threshold) {
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (std::abs(x[j]) < threshold) ++c;
    return c;
}

std::vector<double> grid_scalars(Eigen::Index n, double eps, double h) {
    if (!(eps > 0.0) || !(h > 0.0)) throw DomainError("grid_scalars: eps and h must be positive");
    const double nn = static_cast<double>(n);
    const auto kmax = static_cast<long long>(std::ceil(nn * eps / h));
    std::vector<double> s;
    s.reserve(static_cast<size_t>(kmax) + 1);
    for (long long k = 0; k <= kmax; ++k) s.push_back(nn - static_cast<double>(k) * h);
    return s;
}

}  // namespace phasesync
