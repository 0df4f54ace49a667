#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phasesync {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Shape mismatch or an empty operand.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A value that violates a documented domain (non-unit entry, non-Hermitian matrix, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of a deterministic statement does not hold.
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Problem too large for an exhaustive routine.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

/// Malformed user input: config files, instance files, CSV tables.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Entries closer than this to zero are treated as exact zeros when normalizing.
inline constexpr double kZeroGuard = 1e-300;

// Tolerance for unit-modulus and unit-norm validation of user-supplied data.
inline constexpr double kUnitTol = 1e-10;

}  // namespace phasesync
