#include "phasesync/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phasesync/rng.hpp"

namespace phasesync {

namespace {

void require_nonempty(Eigen::Index n, const char* what) {
    if (n <= 0) throw DimensionError(std::string(what) + ": dimension must be positive");
}

}  // namespace

PhaseVector::PhaseVector(CVector values) : v_(std::move(values)) {
    require_nonempty(v_.size(), "PhaseVector");
    for (Eigen::Index j = 0; j < v_.size(); ++j) {
        if (!(std::abs(std::abs(v_[j]) - 1.0) <= kUnitTol))
            throw DomainError("PhaseVector: entry " + std::to_string(j) + " is not unit modulus");
    }
}

PhaseVector PhaseVector::trusted(CVector values) {
    PhaseVector z;
    z.v_ = std::move(values);
    return z;
}

PhaseVector PhaseVector::from_angles(const RVector& theta) {
    require_nonempty(theta.size(), "PhaseVector");
    CVector v(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) v[j] = std::polar(1.0, theta[j]);
    return trusted(std::move(v));
}

SoftPhaseVector::SoftPhaseVector(CVector values) : v_(std::move(values)) {
    require_nonempty(v_.size(), "SoftPhaseVector");
    for (Eigen::Index j = 0; j < v_.size(); ++j) {
        if (!(std::abs(v_[j]) <= 1.0 + kUnitTol))
            throw DomainError("SoftPhaseVector: entry " + std::to_string(j) + " exceeds unit modulus");
    }
}

SoftPhaseVector SoftPhaseVector::trusted(CVector values) {
    SoftPhaseVector z;
    z.v_ = std::move(values);
    return z;
}

UnitColumnMatrix::UnitColumnMatrix(CMatrix values) : v_(std::move(values)) {
    require_nonempty(v_.rows(), "UnitColumnMatrix");
    require_nonempty(v_.cols(), "UnitColumnMatrix");
    for (Eigen::Index j = 0; j < v_.cols(); ++j) {
        if (!(std::abs(v_.col(j).norm() - 1.0) <= kUnitTol))
            throw DomainError("UnitColumnMatrix: column " + std::to_string(j) + " is not unit norm");
    }
}

UnitColumnMatrix UnitColumnMatrix::trusted(CMatrix values) {
    UnitColumnMatrix v;
    v.v_ = std::move(values);
    return v;
}

PhaseVector generate_truth(Eigen::Index n, std::uint64_t seed) {
    require_nonempty(n, "generate_truth");
    Rng rng(seed);
    CVector v(n);
    for (Eigen::Index j = 0; j < n; ++j) v[j] = rng.unit_phase();
    return PhaseVector::trusted(std::move(v));
}

PhaseVector all_ones_truth(Eigen::Index n) {
    require_nonempty(n, "all_ones_truth");
    return PhaseVector::trusted(CVector::Ones(n));
}

NoiseMatrix sample_noise(Eigen::Index n, std::uint64_t seed) {
    require_nonempty(n, "sample_noise");
    Rng rng(seed);
    CMatrix w = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            const Complex g = rng.complex_normal();
            w(j, k) = g;
            w(k, j) = std::conj(g);
        }
    }
    return {std::move(w), seed};
}

Observation assemble_observation(const PhaseVector& truth, const NoiseMatrix& noise, double sigma) {
    const Eigen::Index n = truth.size();
    if (noise.w.rows() != n || noise.w.cols() != n)
        throw DimensionError("assemble_observation: noise is not n x n");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("assemble_observation: sigma must be finite and >= 0");
    const CVector& z = truth.values();
    CMatrix y(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        y(k, k) = 1.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            const Complex v = z[j] * std::conj(z[k]) + sigma * noise.w(j, k);
            y(j, k) = v;
            y(k, j) = std::conj(v);
        }
    }
    return {std::move(y), sigma, truth, noise};
}

Observation observation_from_matrix(CMatrix y, double sigma, std::optional<PhaseVector> truth) {
    const Eigen::Index n = y.rows();
    require_nonempty(n, "observation");
    if (y.cols() != n) throw DimensionError("observation: Y must be square");
    if (truth && truth->size() != n) throw DimensionError("observation: truth length differs from n");
    for (Eigen::Index k = 0; k < n; ++k) {
        if (y(k, k) != Complex(1.0, 0.0)) throw DomainError("observation: diagonal of Y must be 1");
        for (Eigen::Index j = 0; j < k; ++j) {
            if (y(j, k) != std::conj(y(k, j))) throw DomainError("observation: Y is not Hermitian");
        }
    }
    return {std::move(y), sigma, std::move(truth), std::nullopt};
}

CVector normalize_entries(const CVector& x, const CVector& fallback) {
    if (fallback.size() != x.size()) throw DimensionError("normalize_entries: length mismatch");
    CVector out(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double a = std::abs(x[j]);
        out[j] = a > kZeroGuard ? x[j] / a : fallback[j];
    }
    return out;
}

PhaseVector normalize_entries(const CVector& x) {
    require_nonempty(x.size(), "normalize_entries");
    return PhaseVector::trusted(normalize_entries(x, CVector::Ones(x.size())));
}

CMatrix normalize_columns(const CMatrix& x, const CMatrix& fallback) {
    if (fallback.rows() != x.rows() || fallback.cols() != x.cols())
        throw DimensionError("normalize_columns: shape mismatch");
    CMatrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double a = x.col(j).norm();
        if (a > kZeroGuard)
            out.col(j) = x.col(j) / a;
        else
            out.col(j) = fallback.col(j);
    }
    return out;
}

}  // namespace phasesync
