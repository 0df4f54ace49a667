#include <gtest/gtest.h>

#include "phasesync/linops.hpp"
#include "test_util.hpp"

using namespace phasesync;

TEST(Linops, DiagonalNorm) {
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = 3.0;
    a(1, 1) = -5.0;
    a(2, 2) = 1.0;
    const auto est = operator_norm(a);
    EXPECT_TRUE(est.converged);
    EXPECT_NEAR(est.value, 5.0, 1e-12);
    EXPECT_LE(est.residual, 1e-12);
}

TEST(Linops, ZeroMatrix) {
    const auto est = operator_norm(CMatrix::Zero(4, 4));
    EXPECT_TRUE(est.converged);
    EXPECT_EQ(est.value, 0.0);
}

TEST(Linops, WignerNormMatchesDenseSolver) {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto w = sample_noise(120, seed).w;
        const double exact = fixtures::exact_norm(w);
        const auto est = operator_norm(w, 1e-6, 20000, seed);
        EXPECT_LE(est.value, exact * (1 + 1e-12));
        EXPECT_NEAR(est.value, exact, 1e-4 * exact);
    }
}

TEST(Linops, LeadingEigenvectorMatchesDenseSolver) {
    const auto obs = fixtures::make_instance(80, 1.5, 4);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(obs.y);
    const auto est = leading_eigenvector(obs.y);
    ASSERT_TRUE(est.converged);
    EXPECT_NEAR(est.value, es.eigenvalues()[79], 1e-9);
    EXPECT_NEAR(std::abs(est.vector.dot(es.eigenvectors().col(79))), 1.0, 1e-9);
    EXPECT_LE(est.residual, 1e-12 * obs.y.norm());
}

TEST(Linops, TopEigenvectorsAreOrthonormal) {
    const auto obs = fixtures::make_instance(60, 0.5, 8);
    const auto eig = top_eigenvectors(obs.y, 3, 1e-12, 10000, 2000, 1);
    ASSERT_EQ(eig.size(), 3u);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            EXPECT_NEAR(std::abs(eig[a].vector.dot(eig[b].vector)), a == b ? 1.0 : 0.0, 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(obs.y, Eigen::EigenvaluesOnly);
    EXPECT_NEAR(eig[0].value, es.eigenvalues()[59], 1e-9);
    EXPECT_NEAR(eig[1].value, es.eigenvalues()[58], 1e-3 * std::abs(es.eigenvalues()[58]));
}

TEST(Linops, ShapeErrors) {
    EXPECT_THROW(operator_norm(CMatrix::Zero(2, 3)), DimensionError);
    EXPECT_THROW(hermitian_matvec(CMatrix::Zero(2, 2), CVector::Zero(3)), DimensionError);
    EXPECT_THROW(leading_eigenvector(CMatrix::Identity(2, 2), -1.0), DomainError);
}
