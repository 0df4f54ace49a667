#pragma once

#include "phasesync/model.hpp"

namespace phasesync {

/// min over unit a of (1/n) ||z' - a z||^2 = (||z'||^2 + ||z||^2 - 2 |z'^H z|) / n.
/// For unit-modulus vectors this is 2 - (2/n) |z'^H z|.
double loss_ell1(const CVector& zp, const CVector& z);
double loss_ell1(const SoftPhaseVector& zp, const PhaseVector& z);

/// min over unit a in C^m of (1/n) ||V - a z^H||_F^2. The minimizer is
/// a = Vz / ||Vz|| and the value (||V||_F^2 + ||z||^2 - 2 ||Vz||) / n, which is
/// 2 - (2/n) ||Vz|| for unit columns and unit-modulus z. Evaluated as a sum of
/// squares at the minimizer, so the result is never negative. If Vz = 0 every
/// unit a is optimal and the value is (||V||_F^2 + ||z||^2) / n.
double loss_ellm(const CMatrix& v, const CVector& z);
double loss_ellm(const UnitColumnMatrix& v, const PhaseVector& z);

/// n^-2 ||V^H V - z z^H||_F^2.
double frob_discrepancy(const CMatrix& v, const CVector& z);
double frob_discrepancy(const UnitColumnMatrix& v, const PhaseVector& z);

/// z^H Y z (real part).
double objective_mle(const CMatrix& y, const CVector& z);
/// <Y, V^H V> = tr(V Y V^H) (real part).
double objective_bm(const CMatrix& y, const CMatrix& v);

}  // namespace phasesync
