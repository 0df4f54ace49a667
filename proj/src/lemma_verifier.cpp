#include "phasesync/lemma_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "phasesync/bounds.hpp"
#include "phasesync/estimators.hpp"
#include "phasesync/linops.hpp"
#include "phasesync/losses.hpp"
#include "phasesync/model.hpp"
#include "phasesync/parallel.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/surrogate.hpp"

namespace phasesync {

namespace {

// ---------------------------------------------------------------------------
// Shared instances: one (truth, noise, ||W||) per (trial, n), built lazily.

struct Instance {
    Eigen::Index n = 0;
    PhaseVector truth = PhaseVector::trusted(CVector());
    NoiseMatrix noise;
    SpectralEstimate norm;
};

class InstancePool {
public:
    InstancePool(std::uint64_t seed, double norm_tol) : seed_(seed), norm_tol_(norm_tol) {}

    const Instance& get(int trial, Eigen::Index n) {
        Slot* slot;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto& p = slots_[{trial, n}];
            if (!p) p = std::make_unique<Slot>();
            slot = p.get();
        }
        std::call_once(slot->once, [&] {
            const std::uint64_t s = derive_seed(derive_seed(seed_, static_cast<std::uint64_t>(trial)), n);
            slot->inst.n = n;
            slot->inst.truth = generate_truth(n, derive_seed(s, 1));
            slot->inst.noise = sample_noise(n, derive_seed(s, 2));
            slot->inst.norm = operator_norm(slot->inst.noise.w, norm_tol_, 100000, derive_seed(s, 3));
        });
        return slot->inst;
    }

private:
    struct Slot {
        std::once_flag once;
        Instance inst;
    };
    std::uint64_t seed_;
    double norm_tol_;
    std::mutex mu_;
    std::map<std::pair<int, Eigen::Index>, std::unique_ptr<Slot>> slots_;
};

// ---------------------------------------------------------------------------
// Per-trial context.

struct Outcome {
    bool evaluated = false;
    double slack = std::numeric_limits<double>::infinity();

    void require(double rhs, double lhs) {
        evaluated = true;
        slack = std::min(slack, rhs - lhs);
    }
};

Outcome skipped() { return {}; }

struct Trial {
    const Instance& inst;
    int m;
    Rng rng;
    const VerifierConfig& cfg;

    Eigen::Index n() const { return inst.n; }
    double nd() const { return static_cast<double>(inst.n); }
    double w_norm() const { return inst.norm.value; }
    double uni(double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

    /// sigma = sqrt(n) / r with r uniform on [lo, hi].
    double sigma_by_ratio(double lo, double hi) { return std::sqrt(nd()) / uni(lo, hi); }

    Observation observe(double sigma) const { return assemble_observation(inst.truth, inst.noise, sigma); }

    CVector random_soft() {
        CVector z(n());
        for (Eigen::Index j = 0; j < n(); ++j) z[j] = rng.unit_phase() * rng.uniform();
        return z;
    }

    CVector random_phases() {
        CVector z(n());
        for (Eigen::Index j = 0; j < n(); ++j) z[j] = rng.unit_phase();
        return z;
    }

    CVector near_phase(const CVector& center, double rho) {
        CVector x = center;
        for (Eigen::Index j = 0; j < n(); ++j) x[j] += rho * rng.complex_normal();
        return normalize_entries(x).values();
    }

    /// Columns a conj(center_j) + rho g_j, normalized, for a random unit a.
    CMatrix near_columns(const CVector& center, int rows, double rho) {
        CVector a = random_complex_normal(rng, rows);
        a.normalize();
        CMatrix v = a * center.adjoint();
        for (Eigen::Index j = 0; j < n(); ++j)
            for (int r = 0; r < rows; ++r) v(r, j) += rho * rng.complex_normal();
        CMatrix fb = CMatrix::Zero(rows, n());
        fb.row(0).setOnes();
        return normalize_columns(v, fb);
    }

    CMatrix random_unit_columns(int rows) {
        CMatrix v(rows, n());
        for (Eigen::Index j = 0; j < n(); ++j) {
            for (int r = 0; r < rows; ++r) v(r, j) = rng.complex_normal();
            v.col(j).normalize();
        }
        return v;
    }

    Complex random_scalar(double lo, double hi) { return rng.unit_phase() * (nd() * uni(lo, hi)); }

    /// Indices for leave-one-out work: all of them for small n, else a sample.
    std::vector<Eigen::Index> loo_indices(bool force_all = false) {
        std::vector<Eigen::Index> idx(static_cast<size_t>(n()));
        for (Eigen::Index j = 0; j < n(); ++j) idx[static_cast<size_t>(j)] = j;
        if (force_all || n() <= cfg.loo_full_max_n) return idx;
        const auto k = static_cast<size_t>(std::min<Eigen::Index>(cfg.loo_samples, n()));
        for (size_t i = 0; i < k; ++i) {
            const auto r = i + static_cast<size_t>(rng.next_u64() % (idx.size() - i));
            std::swap(idx[i], idx[r]);
        }
        idx.resize(k);
        std::sort(idx.begin(), idx.end());
        return idx;
    }
};

double ind(bool b) { return b ? 1.0 : 0.0; }

double count_d(const CVector& x, double threshold) {
    return static_cast<double>(count_small_coordinates(x, threshold));
}

// Smallest eps with both closeness conditions, or a value >= 1/2 when none fits.
double closeness_eps(double l1, double lm) {
    return std::sqrt(std::max(l1, lm)) * (1.0 + 1e-9) + 1e-12;
}

// Grid spacing: either below or above delta sqrt(n) with equal odds, and
// coarse enough to keep at most max_points + 1 grid points.
double draw_grid_step(Trial& tr, double eps, double delta, int max_points) {
    const double base = delta * std::sqrt(tr.nd());
    double h = tr.rng.uniform() < 0.5 ? base * tr.uni(0.2, 1.0) : base * tr.uni(1.0, 3.0);
    return std::max(h, tr.nd() * eps / max_points);
}

// Pair of default estimators at the trial's rank.
struct Estimates {
    FixedPointResult<PhaseVector> mle;
    FixedPointResult<UnitColumnMatrix> bm;
    bool converged() const { return mle.converged && bm.converged; }
};

Estimates default_estimates(const Observation& obs, int m, std::uint64_t seed) {
    return {solve_mle(obs.y), solve_bm(obs.y, m, std::nullopt, {}, seed)};
}

// 72 sum_k (1/n) #{j : sigma |W_j. z^(-j)_{s_k}| > (1 - eps - 4 delta - 3 sigma ||W|| / n) n - h}
//   + 72 h^2 / (delta^2 n^2) 1{h > delta sqrt n}.
// An index whose row norm already certifies sigma |W_j. z| <= threshold for
// every z in the soft set needs no fixed point.
double discrepancy_rhs(const ModelParts& parts, double w_norm, double eps, double delta, double h) {
    const Eigen::Index n = parts.n();
    const double nd = static_cast<double>(n);
    const double sigma = parts.sigma;
    const double thr = (1.0 - eps - 4.0 * delta - 3.0 * sigma * w_norm / nd) * nd - h;
    const CMatrix& w = *parts.noise;
    const auto grid = grid_scalars(n, eps, h);
    double total = 0.0;
    for (double s : grid) {
        double cnt = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (sigma * w.row(j).norm() * std::sqrt(nd) <= thr) continue;
            const CVector zj = loo_fixed_point({Complex(s, 0.0), 2.0 * delta * nd}, parts, j, w_norm).values();
            const double v = sigma * std::abs((w.row(j) * zj)(0, 0));
            if (v > thr) cnt += 1.0;
        }
        total += cnt / nd;
    }
    return 72.0 * total + 72.0 * h * h / (delta * delta * nd * nd) * ind(h > delta * std::sqrt(nd));
}

// ---------------------------------------------------------------------------
// Checks.

Outcome check_loss_connection(Trial& tr) {
    Outcome o;
    const CVector z = tr.random_phases();
    const CMatrix v = tr.near_columns(z, tr.m, tr.uni(0.0, 2.0));
    const double l = loss_ellm(v, z);
    const double f = frob_discrepancy(v, z);
    o.require(l * (2.0 - l / 2.0), f);
    o.require(2.0 * l, l * (2.0 - l / 2.0));
    return o;
}

// Draws (z, V) near the truth with the closeness conditions for a target eps.
struct NearPair {
    CVector z;
    CMatrix v;
    double eps;
};

bool draw_near_pair(Trial& tr, NearPair& out) {
    const CVector& zs = tr.inst.truth.values();
    const double eps = tr.uni(0.02, 0.45);
    for (int attempt = 0; attempt < tr.cfg.max_resample; ++attempt) {
        const double c = tr.uni(0.3, 1.0);
        CVector z = tr.near_phase(zs, eps * c * std::numbers::sqrt2);
        CMatrix v = tr.near_columns(zs, tr.m, eps * c / std::sqrt(static_cast<double>(tr.m)));
        if (loss_ell1(z, zs) <= eps * eps && loss_ellm(v, zs) <= eps * eps) {
            out = {std::move(z), std::move(v), eps};
            return true;
        }
    }
    return false;
}

Outcome check_matmul_contraction(Trial& tr) {
    const double sigma = tr.sigma_by_ratio(2.0, 8.0);
    const Observation obs = tr.observe(sigma);
    NearPair p;
    if (!draw_near_pair(tr, p)) return skipped();
    Outcome o;
    const double lhs = loss_ellm(CMatrix(p.v * obs.y.adjoint()), CVector(obs.y * p.z));
    const double k = 6.0 * p.eps + sigma * tr.w_norm() / tr.nd();
    o.require(tr.nd() * tr.nd() * k * k * loss_ellm(p.v, p.z), lhs);
    return o;
}

Outcome check_normalization_bound(Trial& tr) {
    Outcome o;
    const int dim = 1 + static_cast<int>(tr.rng.next_u64() % 5);
    auto vec = [&](double scale) {
        CVector x = random_complex_normal(tr.rng, dim);
        return CVector(x * scale);
    };
    auto unit_or = [](const CVector& x, const CVector& fb) {
        const double a = x.norm();
        return a > 0.0 ? CVector(x / a) : fb;
    };
    for (int i = 0; i < 300; ++i) {
        const double t = std::pow(10.0, tr.uni(-2.0, 2.0));
        CVector y = vec(t * tr.uni(0.0, 2.0));
        CVector x = (i % 3 == 0) ? CVector(y + vec(t * tr.uni(0.0, 0.2))) : vec(t * tr.uni(0.0, 2.0));
        if (i % 7 == 0) x.setZero();
        if (i % 11 == 0) y.setZero();
        CVector u = vec(1.0), v = vec(1.0);
        u *= tr.rng.uniform() / std::max(u.norm(), 1e-300);
        v *= tr.rng.uniform() / std::max(v.norm(), 1e-300);
        const double rhs = 2.0 * (x - y).norm() / t + 2.0 * ind(y.norm() < t);
        const double rhs_sq = 4.0 * (x - y).squaredNorm() / (t * t) + 4.0 * ind(y.norm() < t);
        const double lhs = (unit_or(x, u) - unit_or(y, v)).norm();
        o.require(rhs, lhs);
        o.require(rhs_sq, lhs * lhs);
    }
    return o;
}

Outcome check_joint_contraction(Trial& tr) {
    const double sigma = tr.sigma_by_ratio(2.0, 8.0);
    const Observation obs = tr.observe(sigma);
    NearPair p;
    if (!draw_near_pair(tr, p)) return skipped();
    Outcome o;
    const double t = tr.nd() * tr.uni(0.05, 1.5);
    const double lhs = loss_ellm(apply_fm(obs.y, p.v), apply_f1(obs.y, p.z));
    const double k = 6.0 * p.eps + sigma * tr.w_norm() / tr.nd();
    const CVector yz = obs.y * p.z;
    const double rhs = 4.0 * tr.nd() * tr.nd() / (t * t) * k * k * loss_ellm(p.v, p.z) + 4.0 / tr.nd() * count_d(yz, t);
    o.require(rhs, lhs);
    return o;
}

Outcome fixed_point_reduction_impl(Trial& tr, bool random_start) {
    const double sigma = tr.sigma_by_ratio(1.5, 8.0);
    const Observation obs = tr.observe(sigma);
    const CVector& zs = tr.inst.truth.values();
    const Estimates e = random_start
                            ? Estimates{solve_mle(obs.y, PhaseVector::trusted(tr.random_phases())),
                                        solve_bm(obs.y, tr.m, UnitColumnMatrix::trusted(tr.random_unit_columns(tr.m)))}
                            : default_estimates(obs, tr.m, tr.rng.next_u64());
    if (!e.converged()) return skipped();
    const auto& mle = e.mle;
    const auto& bm = e.bm;
    const CVector& z = mle.iterate.values();
    const double eps = closeness_eps(loss_ell1(z, zs), loss_ellm(bm.iterate.values(), zs));
    if (!(eps < 0.5)) return skipped();
    const double delta = min_delta(eps, sigma, tr.w_norm(), tr.n()) * tr.uni(1.0, 2.0);
    Outcome o;
    const double lhs = loss_ellm(bm.iterate.values(), z);
    if (random_start) {
        const CVector yz = obs.y * z;
        o.require(8.0 / tr.nd() * count_d(yz, delta * tr.nd()), lhs);
    } else {
        const auto cb = fixed_point_count_bound(obs.y, z, delta, eps, sigma, tr.w_norm());
        if (!cb.precondition_met) return skipped();
        o.require(cb.value, lhs);
    }
    return o;
}

Outcome check_fixed_point_reduction(Trial& tr) { return fixed_point_reduction_impl(tr, true); }
Outcome check_mle_count_bound(Trial& tr) { return fixed_point_reduction_impl(tr, false); }

Outcome check_crude_accuracy(Trial& tr) {
    const double sigma = tr.sigma_by_ratio(1.0, 8.0);
    const Observation obs = tr.observe(sigma);
    const CVector& zs = tr.inst.truth.values();
    const auto e = default_estimates(obs, tr.m, tr.rng.next_u64());
    const double truth_obj = objective_mle(obs.y, zs);
    if (!e.converged() || e.mle.objective < truth_obj || e.bm.objective < truth_obj) return skipped();
    Outcome o;
    const double rhs = crude_loss_bound(sigma, tr.w_norm(), tr.n());
    o.require(rhs, loss_ell1(e.mle.iterate.values(), zs));
    o.require(rhs, loss_ellm(e.bm.iterate.values(), zs));
    return o;
}

Outcome check_floor_lipschitz(Trial& tr) {
    Outcome o;
    for (int i = 0; i < 2000; ++i) {
        const double t = std::pow(10.0, tr.uni(-2.0, 2.0));
        const Complex x = tr.rng.complex_normal() * (t * tr.uni(0.0, 3.0));
        const Complex y = (i % 2 == 0) ? x + tr.rng.complex_normal() * (t * tr.uni(0.0, 0.3))
                                       : tr.rng.complex_normal() * (t * tr.uni(0.0, 3.0));
        o.require(std::abs(x - y) / t, std::abs(g_floor(x, t) - g_floor(y, t)));
    }
    return o;
}

struct SurrogateSetup {
    Observation obs;
    ModelParts parts;
    double sigma;
};

// Parts point into the shared instance, so the setup can be moved freely.
SurrogateSetup surrogate_setup(Trial& tr, double lo, double hi) {
    const double sigma = tr.sigma_by_ratio(lo, hi);
    return {tr.observe(sigma), {&tr.inst.truth.values(), sigma, &tr.inst.noise.w}, sigma};
}

// A t that satisfies the contraction precondition with room to spare.
double contraction_t(Trial& tr, double sigma, double factor_hi) {
    return 2.0 * kNormInflation * sigma * tr.w_norm() * tr.uni(1.0, factor_hi);
}

Outcome check_surrogate_lipschitz(Trial& tr) {
    auto su = surrogate_setup(tr, 1.0, 8.0);
    Outcome o;
    const SurrogateParams p{tr.random_scalar(0.3, 1.0), su.sigma * tr.w_norm() * tr.uni(0.1, 4.0)};
    const double lip = su.sigma * tr.w_norm() / p.t;
    for (int i = 0; i < 5; ++i) {
        const CVector x = tr.random_soft();
        const CVector y = (i == 0) ? CVector(x + tr.inst.norm.vector * tr.uni(0.01, 1.0)) : tr.random_soft();
        o.require(lip * (x - y).norm(), (apply_g(x, p, su.parts) - apply_g(y, p, su.parts)).norm());
    }
    return o;
}

Outcome check_surrogate_halving(Trial& tr) {
    auto su = surrogate_setup(tr, 1.0, 8.0);
    const SurrogateParams p{tr.random_scalar(0.3, 1.0), contraction_t(tr, su.sigma, 3.0)};
    const CVector start = tr.random_soft();
    const auto fp = fixed_point_g(p, su.parts, tr.w_norm(), {}, &start);
    if (!fp.result.converged) throw std::runtime_error("surrogate iteration did not converge");
    Outcome o;
    o.require(0.0, 0.0);
    for (size_t k = 1; k < fp.gaps.size(); ++k) o.require(0.5 * fp.gaps[k - 1], fp.gaps[k]);
    return o;
}

Outcome check_surrogate_uniqueness(Trial& tr) {
    auto su = surrogate_setup(tr, 1.0, 8.0);
    const SurrogateParams p{tr.random_scalar(0.3, 1.0), contraction_t(tr, su.sigma, 3.0)};
    const CVector start = tr.random_soft();
    const auto a = fixed_point_g(p, su.parts, tr.w_norm());
    const auto b = fixed_point_g(p, su.parts, tr.w_norm(), {}, &start);
    if (!a.result.converged || !b.result.converged) throw std::runtime_error("surrogate iteration did not converge");
    const double tol = default_solver_tol(tr.n());
    Outcome o;
    o.require(2.0 * tol, (a.result.iterate.values() - b.result.iterate.values()).norm());
    o.require(tol, a.result.residual);
    return o;
}

Outcome check_surrogate_sensitivity(Trial& tr) {
    auto su = surrogate_setup(tr, 1.0, 8.0);
    const double t = contraction_t(tr, su.sigma, 3.0);
    const Complex s1 = tr.random_scalar(0.3, 1.0);
    const Complex s2 = tr.rng.uniform() < 0.5 ? s1 + tr.rng.complex_normal() * tr.uni(0.1, 10.0)
                                              : tr.random_scalar(0.3, 1.0);
    const auto a = fixed_point_g({s1, t}, su.parts, tr.w_norm());
    const auto b = fixed_point_g({s2, t}, su.parts, tr.w_norm());
    const CVector& z1 = a.result.iterate.values();
    const CVector& z2 = b.result.iterate.values();
    const double ds2 = std::norm(s1 - s2);
    Outcome o;
    o.require(4.0 * tr.nd() / (t * t) * ds2, (z1 - z2).squaredNorm());
    o.require(4.0 * tr.nd() * ds2, (surrogate_input(z1, s1, su.parts) - surrogate_input(z2, s2, su.parts)).squaredNorm());
    return o;
}

Outcome check_surrogate_approximation(Trial& tr) {
    auto su = surrogate_setup(tr, 1.0, 8.0);
    Outcome o;
    for (int i = 0; i < 5; ++i) {
        const CVector z = tr.random_soft();
        const Complex s = tr.random_scalar(0.0, 1.0);
        const double t = tr.nd() * tr.uni(0.01, 1.0);
        const double lhs = (apply_f1_prime(z, s, su.parts) - apply_g(z, {s, t}, su.parts)).squaredNorm();
        o.require(4.0 * count_d(surrogate_input(z, s, su.parts), t), lhs);
    }
    return o;
}

// MLE for the trial plus s_hat = z*^H z_hat; empty when the solver did not converge.
struct MleSetup {
    SurrogateSetup su;
    FixedPointResult<PhaseVector> mle;
    Complex s_hat;
};

std::optional<MleSetup> mle_setup(Trial& tr, double lo, double hi) {
    auto su = surrogate_setup(tr, lo, hi);
    auto mle = solve_mle(su.obs.y);
    if (!mle.converged) return std::nullopt;
    const Complex s_hat = tr.inst.truth.values().dot(mle.iterate.values());
    return MleSetup{std::move(su), std::move(mle), s_hat};
}

Outcome check_mle_surrogate_closeness(Trial& tr) {
    const auto setup = mle_setup(tr, 1.5, 8.0);
    if (!setup) return skipped();
    const MleSetup& ms = *setup;
    const double t = 4.0 * kNormInflation * ms.su.sigma * tr.w_norm() * tr.uni(1.0, 3.0);
    const auto fp = fixed_point_g({ms.s_hat, t}, ms.su.parts, tr.w_norm());
    const CVector& zg = fp.result.iterate.values();
    Outcome o;
    o.require(32.0 * count_d(surrogate_input(zg, ms.s_hat, ms.su.parts), t),
              (ms.mle.iterate.values() - zg).squaredNorm());
    return o;
}

Outcome count_transfer_impl(Trial& tr, bool magnitude) {
    const auto setup = mle_setup(tr, 1.5, 8.0);
    if (!setup) return skipped();
    const MleSetup& ms = *setup;
    const double nd = tr.nd();
    const double delta = 2.0 * kNormInflation * ms.su.sigma * tr.w_norm() / nd * tr.uni(1.0, 2.0);
    const Complex s = magnitude ? Complex(std::abs(ms.s_hat), 0.0) : ms.s_hat;
    const auto fp = fixed_point_g({s, 2.0 * delta * nd}, ms.su.parts, tr.w_norm());
    const CVector& z = fp.result.iterate.values();
    const CVector yz = ms.su.obs.y * ms.mle.iterate.values();
    Outcome o;
    o.require(9.0 / nd * count_d(surrogate_input(z, s, ms.su.parts), 2.0 * delta * nd), count_d(yz, delta * nd) / nd);
    if (magnitude) {
        const CVector x = tr.random_soft();
        const Complex a = tr.rng.unit_phase();
        const SurrogateParams p{ms.s_hat, 2.0 * delta * nd};
        o.require(0.0, (a * apply_g(x, p, ms.su.parts) - apply_g(a * x, {a * p.s, p.t}, ms.su.parts)).norm());
    }
    return o;
}

Outcome check_count_transfer(Trial& tr) { return count_transfer_impl(tr, false); }
Outcome check_count_transfer_magnitude(Trial& tr) { return count_transfer_impl(tr, true); }

Outcome grid_impl(Trial& tr, bool noise_form) {
    const auto setup = mle_setup(tr, 1.5, 8.0);
    if (!setup) return skipped();
    const MleSetup& ms = *setup;
    const CVector& zs = tr.inst.truth.values();
    const double eps = closeness_eps(loss_ell1(ms.mle.iterate.values(), zs), 0.0);
    if (!(eps < 0.5)) return skipped();
    const double nd = tr.nd();
    const double sigma = ms.su.sigma;
    const double delta = 2.0 * kNormInflation * sigma * tr.w_norm() / nd * tr.uni(1.0, 2.0);
    const double h = draw_grid_step(tr, eps, delta, 60);
    double sum = 0.0;
    for (double sk : grid_scalars(tr.n(), eps, h)) {
        const auto fp = fixed_point_g({Complex(sk, 0.0), 2.0 * delta * nd}, ms.su.parts, tr.w_norm());
        const CVector& z = fp.result.iterate.values();
        if (noise_form) {
            const CVector wz = *ms.su.parts.noise * z;
            double c = 0.0;
            for (Eigen::Index j = 0; j < tr.n(); ++j) c += ind(sigma * std::abs(wz[j]) > sk - 4.0 * delta * nd);
            sum += c / nd;
        } else {
            sum += count_d(surrogate_input(z, Complex(sk, 0.0), ms.su.parts), 4.0 * delta * nd) / nd;
        }
    }
    const double rhs = 9.0 * sum + 9.0 * h * h / (delta * delta * nd * nd) * ind(h > delta * std::sqrt(nd));
    const CVector yz = ms.su.obs.y * ms.mle.iterate.values();
    Outcome o;
    o.require(rhs, count_d(yz, delta * nd) / nd);
    return o;
}

Outcome check_grid_count_bound(Trial& tr) { return grid_impl(tr, false); }
Outcome check_grid_noise_count_bound(Trial& tr) { return grid_impl(tr, true); }

struct LooSetup {
    SurrogateSetup su;
    SurrogateParams p;
};

LooSetup loo_setup(Trial& tr) {
    auto su = surrogate_setup(tr, 1.0, 6.0);
    const SurrogateParams p{tr.random_scalar(0.3, 1.0), contraction_t(tr, su.sigma, 2.0)};
    return {std::move(su), p};
}

Outcome check_loo_limits(Trial& tr) {
    auto ls = loo_setup(tr);
    const double tol = default_solver_tol(tr.n());
    Outcome o;
    for (Eigen::Index j : tr.loo_indices()) {
        if (j % 4 != 0 && tr.n() <= tr.cfg.loo_full_max_n) continue;
        const auto b = leave_one_out(ls.p, ls.su.parts, j, tr.w_norm());
        if (!b.converged) throw std::runtime_error("leave-one-out iteration did not converge");
        const ModelParts masked = ls.su.parts.with_noise(b.masked_noise);
        const CVector& zj = b.fixed_point.values();
        o.require(tol, (apply_g(zj, ls.p, masked) - zj).norm());
        const CVector start = tr.random_soft();
        const auto other = fixed_point_g(ls.p, masked, tr.w_norm(), {}, &start);
        o.require(2.0 * tol, (other.result.iterate.values() - zj).norm());
        const CVector& zf = b.full_fixed_point.values();
        o.require(tol, (apply_g(zf, ls.p, ls.su.parts) - zf).norm());
    }
    return o;
}

Outcome check_loo_map_properties(Trial& tr) {
    auto ls = loo_setup(tr);
    Outcome o;
    const auto idx = tr.loo_indices();
    for (size_t i = 0; i < idx.size() && i < 10; ++i) {
        const Eigen::Index j = idx[i];
        const CMatrix wj = mask_noise(*ls.su.parts.noise, j);
        const ModelParts masked = ls.su.parts.with_noise(wj);
        // ||W^(-j) v|| <= ||W u|| with u the normalized projection of v off e_j.
        const auto est = operator_norm(wj, 1e-6, 20000, tr.rng.next_u64());
        CVector u = est.vector;
        u[j] = 0.0;
        const double pu = u.norm();
        if (pu > 0.0) {
            u /= pu;
            o.require((*ls.su.parts.noise * u).norm(), est.value);
        }
        const CVector x = tr.random_soft(), y = tr.random_soft();
        const double lip = ls.su.sigma * tr.w_norm() / ls.p.t;
        o.require(lip * (x - y).norm(), (apply_g(x, ls.p, masked) - apply_g(y, ls.p, masked)).norm());
        const auto fp = fixed_point_g(ls.p, masked, tr.w_norm(), {}, &x);
        for (size_t k = 1; k < fp.gaps.size(); ++k) o.require(0.5 * fp.gaps[k - 1], fp.gaps[k]);
    }
    return o;
}

Outcome check_loo_closeness(Trial& tr) {
    auto ls = loo_setup(tr);
    Outcome o;
    for (Eigen::Index j : tr.loo_indices()) {
        if (j % 4 != 0 && tr.n() <= tr.cfg.loo_full_max_n) continue;
        const auto b = leave_one_out(ls.p, ls.su.parts, j, tr.w_norm());
        if (!b.converged) throw std::runtime_error("leave-one-out iteration did not converge");
        for (double g : b.gaps) o.require(3.0, g);
        o.require(3.0, b.final_gap);
    }
    return o;
}

Outcome check_loo_decoupling(Trial& tr) {
    auto ls = loo_setup(tr);
    const double sigma = ls.su.sigma;
    const CMatrix& w = *ls.su.parts.noise;
    const auto fp = fixed_point_g(ls.p, ls.su.parts, tr.w_norm());
    const CVector wz = w * fp.result.iterate.values();
    std::vector<double> mags(static_cast<size_t>(tr.n()));
    for (Eigen::Index j = 0; j < tr.n(); ++j) mags[static_cast<size_t>(j)] = sigma * std::abs(wz[j]);
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    const auto q = static_cast<size_t>(tr.uni(0.3, 1.0) * static_cast<double>(sorted.size() - 1));
    const double abs_s = std::abs(ls.p.s);
    const double r = abs_s - sorted[q];
    const double lhs_thr = abs_s - r;
    const double rhs_thr = abs_s - r - 3.0 * sigma * tr.w_norm();
    Outcome o;
    const auto idx = tr.loo_indices();
    double lhs_sum = 0.0, rhs_sum = 0.0;
    for (Eigen::Index j : idx) {
        const CVector zj = loo_fixed_point(ls.p, ls.su.parts, j, tr.w_norm()).values();
        const double l = ind(mags[static_cast<size_t>(j)] >= lhs_thr);
        const double rr = ind(sigma * std::abs((w.row(j) * zj)(0, 0)) >= rhs_thr);
        o.require(rr, l);
        lhs_sum += l;
        rhs_sum += rr;
    }
    if (static_cast<Eigen::Index>(idx.size()) == tr.n()) o.require(rhs_sum / tr.nd(), lhs_sum / tr.nd());
    return o;
}

Outcome check_deterministic_discrepancy(Trial& tr) {
    const double sigma = tr.sigma_by_ratio(40.0, 160.0);
    const Observation obs = tr.observe(sigma);
    const ModelParts parts{&tr.inst.truth.values(), sigma, &tr.inst.noise.w};
    const CVector& zs = tr.inst.truth.values();
    const auto e = default_estimates(obs, tr.m, tr.rng.next_u64());
    if (!e.converged()) return skipped();
    const double eps = closeness_eps(loss_ell1(e.mle.iterate.values(), zs), loss_ellm(e.bm.iterate.values(), zs));
    if (!(eps < 0.5)) return skipped();
    const double delta = min_delta(eps, sigma, tr.w_norm(), tr.n()) * tr.uni(1.0, 1.5);
    const double h = draw_grid_step(tr, eps, delta, 30);
    Outcome o;
    o.require(discrepancy_rhs(parts, tr.w_norm(), eps, delta, h), loss_ellm(e.bm.iterate.values(), e.mle.iterate.values()));
    return o;
}

// Largest c0 sigma / sqrt(n) for which the recipe margin holds.
double recipe_ratio_limit(Eigen::Index n) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (recipe_margin_holds(n, mid, 1.0 * std::sqrt(static_cast<double>(n))) ? lo : hi) = mid;
    }
    return lo;
}

Outcome check_tightness_mechanism(Trial& tr) {
    const double c0 = tr.w_norm() / std::sqrt(tr.nd());
    const double sigma = tr.uni(0.2, 0.9) * recipe_ratio_limit(tr.n()) * std::sqrt(tr.nd()) / c0;
    if (!recipe_margin_holds(tr.n(), sigma, c0)) return skipped();
    const Observation obs = tr.observe(sigma);
    const ModelParts parts{&tr.inst.truth.values(), sigma, &tr.inst.noise.w};
    const CVector& zs = tr.inst.truth.values();
    const auto e = default_estimates(obs, tr.m, tr.rng.next_u64());
    if (!e.converged()) return skipped();
    const auto b = tightness_recipe(tr.n(), sigma, tr.w_norm());
    const double l1 = loss_ell1(e.mle.iterate.values(), zs);
    const double lm = loss_ellm(e.bm.iterate.values(), zs);
    if (!(b.epsilon < 0.5) || l1 > b.epsilon * b.epsilon || lm > b.epsilon * b.epsilon) return skipped();
    const double rhs = discrepancy_rhs(parts, tr.w_norm(), b.epsilon, b.delta, b.h);
    const double lhs = loss_ellm(e.bm.iterate.values(), e.mle.iterate.values());
    Outcome o;
    o.require(rhs, lhs);
    if (rhs == 0.0) o.require(tr.cfg.tightness_tol, lhs);
    o.require(2.0 * rhs, frob_discrepancy(e.bm.iterate.values(), e.mle.iterate.values()));
    return o;
}

Outcome check_frobenius_chain(Trial& tr) {
    const double sigma = tr.sigma_by_ratio(1.5, 8.0);
    const Observation obs = tr.observe(sigma);
    const CVector& zs = tr.inst.truth.values();
    const auto e = default_estimates(obs, tr.m, tr.rng.next_u64());
    if (!e.converged()) return skipped();
    const CVector& z = e.mle.iterate.values();
    const CMatrix& v = e.bm.iterate.values();
    const double eps = closeness_eps(loss_ell1(z, zs), loss_ellm(v, zs));
    if (!(eps < 0.5)) return skipped();
    const double delta = min_delta(eps, sigma, tr.w_norm(), tr.n());
    const double lm = loss_ellm(v, z);
    const CVector yz = obs.y * z;
    Outcome o;
    o.require(2.0 * lm, frob_discrepancy(v, z));
    o.require(16.0 / tr.nd() * count_d(yz, delta * tr.nd()), 2.0 * lm);
    return o;
}

// ---------------------------------------------------------------------------
// Registry.

struct Check {
    CheckInfo info;
    std::function<Outcome(Trial&)> run;
};

const std::vector<Check>& checks() {
    static const std::vector<Check> all = {
        {{"loss_connection", "loss_connection", "n^-2 ||V^H V - z z^H||_F^2 <= l_m (2 - l_m / 2) <= 2 l_m(V, z)"},
         check_loss_connection},
        {{"matmul_contraction", "matmul_contraction",
          "l_m(V Y^H, Y z) <= n^2 (6 eps + sigma ||W|| / n)^2 l_m(V, z) for l_1(z, z*), l_m(V, z*) <= eps^2"},
         check_matmul_contraction},
        {{"normalization_bound", "normalization_bound",
          "||x/||x|| - y/||y|||| <= 2 ||x - y|| / t + 2 1{||y|| < t}, zero vectors replaced by u, v with norm <= 1"},
         check_normalization_bound},
        {{"joint_contraction", "joint_contraction",
          "l_m(F_m V, F_1 z) <= 4 n^2 / t^2 (6 eps + sigma ||W|| / n)^2 l_m(V, z) + 4/n #{|[Yz]_j| < t}"},
         check_joint_contraction},
        {{"fixed_point_reduction", "fixed_point_reduction",
          "fixed points V = F_m V, z = F_1 z near z*: l_m(V, z) <= 8/n #{|[Yz]_j| < delta n}"},
         check_fixed_point_reduction},
        {{"mle_count_bound", "mle_count_bound",
          "l_m(V_bm, z_mle) <= 8/n #{|[Y z_mle]_j| < delta n} for delta >= 2 sqrt 2 (6 eps + sigma ||W|| / n)"},
         check_mle_count_bound},
        {{"crude_accuracy_bound", "crude_accuracy_bound", "l_1(z_mle, z*), l_m(V_bm, z*) <= 8 sigma ||W|| / n"},
         check_crude_accuracy},
        {{"floor_lipschitz", "floor_lipschitz", "|g_t(x) - g_t(y)| <= |x - y| / t"}, check_floor_lipschitz},
        {{"surrogate_lipschitz", "surrogate_map_properties", "||G(x) - G(y)|| <= sigma ||W|| / t ||x - y||"},
         check_surrogate_lipschitz},
        {{"surrogate_halving", "surrogate_map_properties",
          "t >= 2 sigma ||W||: successive gaps of z <- G(z) at least halve"},
         check_surrogate_halving},
        {{"surrogate_uniqueness", "surrogate_map_properties",
          "t >= 2 sigma ||W||: the fixed point of G is unique and reached from z*"},
         check_surrogate_uniqueness},
        {{"surrogate_sensitivity", "surrogate_map_properties",
          "||z_s - z_s'||^2 <= 4 n |s - s'|^2 / t^2 and ||(z* s + sigma W z_s) - (z* s' + sigma W z_s')||^2 <= 4 n |s - s'|^2"},
         check_surrogate_sensitivity},
        {{"surrogate_approximation", "surrogate_approximation_error",
          "||F_1'(z, s) - G(z, s, t)||^2 <= 4 #{|z*_j s + sigma [Wz]_j| < t}"},
         check_surrogate_approximation},
        {{"mle_surrogate_closeness", "mle_surrogate_closeness",
          "t >= 4 sigma ||W||: ||z_mle - z_G||^2 <= 32 #{|z*_j s_hat + sigma [W z_G]_j| < t}"},
         check_mle_surrogate_closeness},
        {{"count_transfer", "count_transfer",
          "(1/n) #{|[Y z_mle]_j| < delta n} <= (9/n) #{|z*_j s_hat + sigma [W z]_j| < 2 delta n}"},
         check_count_transfer},
        {{"count_transfer_magnitude", "count_transfer_magnitude",
          "as count_transfer with |s_hat| in place of s_hat; a G(z, s, t) = G(a z, a s, t)"},
         check_count_transfer_magnitude},
        {{"grid_count_bound", "grid_count_bound",
          "(1/n) #{|[Y z_mle]_j| < delta n} <= 9 sum_k (1/n) #{|z* s_k + sigma W z_k| < 4 delta n} + 9 h^2 / (delta n)^2 1{h > delta sqrt n}"},
         check_grid_count_bound},
        {{"grid_noise_count_bound", "grid_noise_count_bound",
          "as grid_count_bound with 1{sigma |[W z_k]_j| > s_k - 4 delta n}"},
         check_grid_noise_count_bound},
        {{"loo_limits", "loo_limits", "z and z^(-j) are the limits of their iterations from z*"}, check_loo_limits},
        {{"loo_map_properties", "loo_map_properties",
          "||W^(-j)|| <= ||W||; G^(-j) is sigma ||W|| / t Lipschitz and halves successive gaps"},
         check_loo_map_properties},
        {{"loo_closeness", "loo_closeness", "||z^(T) - z^(T,-j)|| <= 3 for all T and ||z - z^(-j)|| <= 3"},
         check_loo_closeness},
        {{"loo_decoupling", "loo_decoupling",
          "1{sigma |[Wz]_j| >= |s| - r} <= 1{sigma |W_j. z^(-j)| >= |s| - r - 3 sigma ||W||}, termwise and summed"},
         check_loo_decoupling},
        {{"deterministic_discrepancy_bound", "deterministic_discrepancy_bound",
          "l_m(V_bm, z_mle) <= 72 sum_k (1/n) #{sigma |W_j. z^(-j)_{s_k}| > (1 - eps - 4 delta - 3 sigma ||W|| / n) n - h} + 72 h^2 / (delta n)^2 1{h > delta sqrt n}",
          100},
         check_deterministic_discrepancy},
        {{"tightness_mechanism", "tightness_mechanism",
          "with eps = (8 c0 sigma / sqrt n)^(1/2), delta = 49 (c0 sigma / sqrt n)^(1/2), h = delta sqrt n: l_m <= bound, "
          "bound = 0 implies tight, Frobenius discrepancy <= 2 bound"},
         check_tightness_mechanism},
        {{"frobenius_discrepancy_chain", "frobenius_discrepancy_chain",
          "n^-2 ||V^H V - z z^H||_F^2 <= 2 l_m(V_bm, z_mle) <= 16/n #{|[Y z_mle]_j| < delta n}"},
         check_frobenius_chain},
    };
    return all;
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

std::uint64_t hash_string(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

std::string digest(const VerifierConfig& cfg, const std::string& id) {
    std::ostringstream os;
    os.precision(17);
    os << id << '|' << cfg.trials << '|' << cfg.seed << '|' << cfg.violation_tol << '|' << cfg.tightness_tol << '|'
       << cfg.loo_samples << '|' << cfg.loo_full_max_n << '|' << cfg.norm_tol << '|';
    for (auto n : cfg.n_values) os << n << ',';
    os << '|';
    for (auto m : cfg.m_values) os << m << ',';
    return hex64(mix64(hash_string(os.str())));
}

}  // namespace

std::string CheckResult::status() const {
    if (errors > 0) return "error";
    if (failures > 0) return "fail";
    if (trials == 0) return "skipped";
    return "pass";
}

const std::vector<std::string>& result_catalog() {
    static const std::vector<std::string> keys = {
        "loss_connection",          "matmul_contraction",        "normalization_bound",
        "joint_contraction",        "fixed_point_reduction",     "mle_count_bound",
        "crude_accuracy_bound",     "floor_lipschitz",           "surrogate_map_properties",
        "surrogate_approximation_error", "mle_surrogate_closeness", "count_transfer",
        "count_transfer_magnitude", "grid_count_bound",          "grid_noise_count_bound",
        "loo_limits",               "loo_map_properties",        "loo_closeness",
        "loo_decoupling",           "deterministic_discrepancy_bound", "tightness_mechanism",
        "frobenius_discrepancy_chain",
    };
    return keys;
}

const std::vector<CheckInfo>& check_registry() {
    static const std::vector<CheckInfo> infos = [] {
        std::vector<CheckInfo> v;
        for (const auto& c : checks()) v.push_back(c.info);
        return v;
    }();
    return infos;
}

std::vector<CheckResult> run_suite(const VerifierConfig& cfg) {
    if (cfg.trials < 0) throw DomainError("verifier: trials must be >= 0");
    if (cfg.n_values.empty() || cfg.m_values.empty()) throw DomainError("verifier: empty scale lists");
    for (auto n : cfg.n_values)
        if (n < 3) throw DomainError("verifier: n must be >= 3");
    for (const auto& id : cfg.only) {
        const auto& all = checks();
        if (std::none_of(all.begin(), all.end(), [&](const Check& c) { return c.info.id == id; }))
            throw DomainError("verifier: unknown check '" + id + "'");
    }

    std::vector<const Check*> selected;
    for (const auto& c : checks())
        if (cfg.only.empty() || std::find(cfg.only.begin(), cfg.only.end(), c.info.id) != cfg.only.end())
            selected.push_back(&c);

    InstancePool pool(cfg.seed, cfg.norm_tol);
    std::vector<CheckResult> results(selected.size());
    std::vector<std::mutex> locks(selected.size());

    // One work item per (check, trial) so slow checks spread across workers.
    const size_t per = static_cast<size_t>(cfg.trials);
    std::vector<Outcome> outcomes(selected.size() * per);
    std::vector<std::string> errors(selected.size() * per);
    parallel_for(selected.size() * per, worker_count(cfg.threads), [&](size_t item) {
        const size_t ci = item / per;
        const int t = static_cast<int>(item % per);
        const Check& c = *selected[ci];
        std::vector<Eigen::Index> ns;
        for (auto n : cfg.n_values)
            if (c.info.max_n == 0 || n <= c.info.max_n) ns.push_back(n);
        if (ns.empty()) return;
        try {
            const Eigen::Index n = ns[static_cast<size_t>(t) % ns.size()];
            const int mv = cfg.m_values[(static_cast<size_t>(t) / ns.size()) % cfg.m_values.size()];
            const int m = mv <= 0 ? static_cast<int>(n) : std::min<int>(mv, static_cast<int>(n));
            const Instance& inst = pool.get(t, n);
            Trial tr{inst, m, Rng(derive_seed(derive_seed(cfg.seed, hash_string(c.info.id)), static_cast<std::uint64_t>(t))),
                     cfg};
            outcomes[item] = c.run(tr);
        } catch (const std::exception& e) {
            errors[item] = e.what();
        }
    });

    for (size_t ci = 0; ci < selected.size(); ++ci) {
        CheckResult& r = results[ci];
        r.check_id = selected[ci]->info.id;
        r.covers = selected[ci]->info.covers;
        r.statement = selected[ci]->info.statement;
        r.params_digest = digest(cfg, r.check_id);
        for (size_t t = 0; t < per; ++t) {
            const size_t item = ci * per + t;
            if (!errors[item].empty()) {
                ++r.errors;
                if (r.first_error.empty()) r.first_error = errors[item];
                continue;
            }
            const Outcome& o = outcomes[item];
            if (!o.evaluated) {
                ++r.skipped;
                continue;
            }
            ++r.trials;
            r.worst_slack = std::min(r.worst_slack, o.slack);
            if (o.slack < -cfg.violation_tol) ++r.failures;
        }
    }
    return results;
}

std::string to_json_line(const CheckResult& r) {
    nlohmann::json j;
    j["check_id"] = r.check_id;
    j["covers"] = r.covers;
    j["status"] = r.status();
    j["trials"] = r.trials;
    j["failures"] = r.failures;
    j["skipped"] = r.skipped;
    j["errors"] = r.errors;
    j["worst_slack"] = std::isfinite(r.worst_slack) ? nlohmann::json(r.worst_slack) : nlohmann::json(nullptr);
    j["params_digest"] = r.params_digest;
    j["anchor"] = r.statement;
    if (!r.first_error.empty()) j["error"] = r.first_error;
    return j.dump();
}

std::string format_table(const std::vector<CheckResult>& results) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-32s %-8s %7s %8s %7s %6s %13s\n", "check", "status", "trials", "failures",
                  "skipped", "errors", "worst_slack");
    os << line;
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%-32s %-8s %7d %8d %7d %6d %13.4e\n", r.check_id.c_str(), r.status().c_str(),
                      r.trials, r.failures, r.skipped, r.errors, std::isfinite(r.worst_slack) ? r.worst_slack : 0.0);
        os << line;
    }
    return os.str();
}

}  // namespace phasesync
