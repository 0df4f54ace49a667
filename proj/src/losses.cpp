#include "phasesync/losses.hpp"

#include <cmath>

namespace phasesync {

namespace {

void require_len(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a == 0 || a != b) throw DimensionError(std::string(what) + ": length mismatch or empty input");
}

}  // namespace

double loss_ell1(const CVector& zp, const CVector& z) {
    require_len(zp.size(), z.size(), "loss_ell1");
    const Complex c = z.dot(zp);  // z^H z'
    const Complex a = std::abs(c) > 0.0 ? c / std::abs(c) : Complex(1.0, 0.0);
    return (zp - a * z).squaredNorm() / static_cast<double>(z.size());
}

double loss_ell1(const SoftPhaseVector& zp, const PhaseVector& z) { return loss_ell1(zp.values(), z.values()); }

double loss_ellm(const CMatrix& v, const CVector& z) {
    require_len(v.cols(), z.size(), "loss_ellm");
    const CVector vz = v * z;
    const double nvz = vz.norm();
    const double n = static_cast<double>(z.size());
    if (!(nvz > 0.0)) return (v.squaredNorm() + z.squaredNorm()) / n;
    const CVector a = vz / nvz;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < v.cols(); ++j) acc += (v.col(j) - a * std::conj(z[j])).squaredNorm();
    return acc / n;
}

double loss_ellm(const UnitColumnMatrix& v, const PhaseVector& z) { return loss_ellm(v.values(), z.values()); }

double frob_discrepancy(const CMatrix& v, const CVector& z) {
    require_len(v.cols(), z.size(), "frob_discrepancy");
    const double n = static_cast<double>(z.size());
    CMatrix g = v.adjoint() * v;
    g.noalias() -= z * z.adjoint();
    return g.squaredNorm() / (n * n);
}

double frob_discrepancy(const UnitColumnMatrix& v, const PhaseVector& z) {
    return frob_discrepancy(v.values(), z.values());
}

double objective_mle(const CMatrix& y, const CVector& z) {
    require_len(y.cols(), z.size(), "objective_mle");
    return z.dot(y * z).real();
}

double objective_bm(const CMatrix& y, const CMatrix& v) {
    require_len(y.cols(), v.cols(), "objective_bm");
    const CMatrix vy = v * y;
    return vy.cwiseProduct(v.conjugate()).sum().real();
}

}  // namespace phasesync
