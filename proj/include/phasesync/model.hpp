#pragma once

#include <cstdint>
#include <optional>

#include "phasesync/types.hpp"

namespace phasesync {

/// Vector with unit-modulus entries.
class PhaseVector {
public:
    /// Validates |z_j| = 1 to within kUnitTol.
    explicit PhaseVector(CVector values);
    /// Skips validation; for values produced by normalization.
    static PhaseVector trusted(CVector values);
    static PhaseVector from_angles(const RVector& theta);

    const CVector& values() const { return v_; }
    Eigen::Index size() const { return v_.size(); }
    Complex operator[](Eigen::Index j) const { return v_[j]; }

private:
    PhaseVector() = default;
    CVector v_;
};

/// Vector with entries of modulus at most one.
class SoftPhaseVector {
public:
    explicit SoftPhaseVector(CVector values);
    static SoftPhaseVector trusted(CVector values);
    SoftPhaseVector(const PhaseVector& z) : v_(z.values()) {}  // NOLINT: every phase vector is soft

    const CVector& values() const { return v_; }
    Eigen::Index size() const { return v_.size(); }
    Complex operator[](Eigen::Index j) const { return v_[j]; }

private:
    SoftPhaseVector() = default;
    CVector v_;
};

/// m x n matrix whose columns have unit Euclidean norm.
class UnitColumnMatrix {
public:
    explicit UnitColumnMatrix(CMatrix values);
    static UnitColumnMatrix trusted(CMatrix values);

    const CMatrix& values() const { return v_; }
    Eigen::Index rows() const { return v_.rows(); }
    Eigen::Index cols() const { return v_.cols(); }

private:
    UnitColumnMatrix() = default;
    CMatrix v_;
};

/// Hermitian noise with zero diagonal and CN(0, 1) off-diagonal entries.
struct NoiseMatrix {
    CMatrix w;
    std::uint64_t seed = 0;
};

/// Y = z z^H + sigma W with unit diagonal. Truth and noise are absent for
/// instances that were loaded from a file without them.
struct Observation {
    CMatrix y;
    double sigma = 0.0;
    std::optional<PhaseVector> truth;
    std::optional<NoiseMatrix> noise;

    Eigen::Index n() const { return y.rows(); }
};

PhaseVector generate_truth(Eigen::Index n, std::uint64_t seed);
PhaseVector all_ones_truth(Eigen::Index n);

/// Upper triangle is filled row by row from a single stream; the lower
/// triangle is its conjugate.
NoiseMatrix sample_noise(Eigen::Index n, std::uint64_t seed);

Observation assemble_observation(const PhaseVector& truth, const NoiseMatrix& noise, double sigma);

/// Wraps an externally supplied Y. Checks shape, exact Hermitian symmetry
/// and unit diagonal.
Observation observation_from_matrix(CMatrix y, double sigma, std::optional<PhaseVector> truth);

/// x_j / |x_j|, falling back to fallback_j where x_j is zero.
CVector normalize_entries(const CVector& x, const CVector& fallback);
/// x_j / |x_j|, falling back to 1 where x_j is zero.
PhaseVector normalize_entries(const CVector& x);

/// Column-wise x_j / ||x_j||, falling back to fallback_j for zero columns.
CMatrix normalize_columns(const CMatrix& x, const CMatrix& fallback);

}  // namespace phasesync
