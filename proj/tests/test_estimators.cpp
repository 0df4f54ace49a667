#include <gtest/gtest.h>

#include <cmath>

#include "phasesync/estimators.hpp"
#include "phasesync/losses.hpp"
#include "test_util.hpp"

using namespace phasesync;

TEST(Estimators, F1KeepsTruthWithoutNoise) {
    const auto obs = fixtures::make_instance(30, 0.0, 1);
    const auto f = apply_f1(obs.y, *obs.truth);
    EXPECT_NEAR((f.values() - obs.truth->values()).norm(), 0.0, 1e-13);
}

TEST(Estimators, F1FallbackOnZeroCoordinate) {
    CMatrix y(2, 2);
    y << 1.0, -1.0, -1.0, 1.0;
    CVector z(2);
    z << 1.0, Complex(0, 1);
    CVector z0 = CVector::Ones(2);
    EXPECT_EQ(apply_f1(y, z0), z0);
    CMatrix v = CMatrix::Ones(1, 2);
    EXPECT_EQ(apply_fm(y, v), v);
}

TEST(Estimators, FmWithOneRowMatchesF1) {
    const auto obs = fixtures::make_instance(25, 1.0, 2);
    const auto z = generate_truth(25, 99);
    const CVector f1 = apply_f1(obs.y, z.values());
    const CMatrix fm = apply_fm(obs.y, CMatrix(z.values().adjoint()));
    EXPECT_NEAR((fm - CMatrix(f1.adjoint())).norm(), 0.0, 1e-13);
}

TEST(Estimators, FmOutputHasUnitColumns) {
    const auto obs = fixtures::make_instance(20, 2.0, 3);
    Rng rng(4);
    const CMatrix v = apply_fm(obs.y, fixtures::random_unit_columns(4, 20, rng));
    for (int j = 0; j < 20; ++j) EXPECT_NEAR(v.col(j).norm(), 1.0, 1e-14);
}

TEST(Estimators, MleRecoversTruthWithoutNoise) {
    const auto obs = fixtures::make_instance(50, 0.0, 5);
    const auto r = solve_mle(obs.y);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(loss_ell1(r.iterate.values(), obs.truth->values()), 1e-20);
    EXPECT_NEAR(r.objective, 2500.0, 1e-8);
}

TEST(Estimators, FixedPointCertificate) {
    for (double sigma : {0.5, 1.5}) {
        const auto obs = fixtures::make_instance(60, sigma, 6);
        SolverOptions o;
        o.record_trace = true;
        const auto r = solve_mle(obs.y, std::nullopt, o);
        ASSERT_TRUE(r.converged);
        EXPECT_LE(r.residual, 10.0 * default_solver_tol(60));
        EXPECT_EQ(static_cast<int>(r.trace.size()), r.iterations);
        const auto b = solve_bm(obs.y, 3, std::nullopt, o, 1);
        ASSERT_TRUE(b.converged);
        EXPECT_LE(b.residual, 10.0 * default_solver_tol(60));
        EXPECT_EQ(static_cast<int>(b.trace.size()), b.iterations);
    }
}

TEST(Estimators, BurerMonteiroTightAtModerateNoise) {
    const auto obs = fixtures::make_instance(50, 0.8, 7);
    const auto mle = solve_mle(obs.y);
    ASSERT_TRUE(mle.converged);
    for (int m : {2, 5, 50}) {
        const auto bm = solve_bm(obs.y, m, std::nullopt, {}, 11);
        ASSERT_TRUE(bm.converged) << m;
        EXPECT_LE(loss_ellm(bm.iterate, mle.iterate), 1e-9) << m;
        EXPECT_NEAR(bm.objective, mle.objective, 1e-8 * mle.objective);
    }
}

TEST(Estimators, DefaultInitHasUnitColumnsAndFullRank) {
    const auto obs = fixtures::make_instance(12, 1.0, 8);
    const auto v = bm_default_init(obs.y, 12, 3);
    for (int j = 0; j < 12; ++j) EXPECT_NEAR(v.values().col(j).norm(), 1.0, 1e-14);
    Eigen::JacobiSVD<CMatrix> svd(v.values());
    EXPECT_GT(svd.singularValues()[11], 1e-6);
    EXPECT_EQ(v.values(), bm_default_init(obs.y, 12, 3).values());
}

TEST(Estimators, BruteForceMatchesIterativeSolution) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto obs = fixtures::make_instance(4, 0.3, 100 + seed);
        const auto bf = brute_force_mle(obs.y, 72, true);
        const auto mle = solve_mle(obs.y);
        EXPECT_EQ(bf.maximizer[0], Complex(1.0, 0.0));
        EXPECT_GE(bf.objective, bf.grid_objective);
        EXPECT_NEAR(mle.objective, bf.objective, 1e-8);
        EXPECT_NEAR(objective_mle(obs.y, bf.maximizer.values()), bf.objective, 1e-10);
    }
}

TEST(Estimators, BruteForceGridBeatsEveryGridPoint) {
    const auto obs = fixtures::make_instance(3, 1.0, 4);
    const auto bf = brute_force_mle(obs.y, 12, false);
    for (int a = 0; a < 12; ++a)
        for (int b = 0; b < 12; ++b) {
            CVector z(3);
            z << 1.0, std::polar(1.0, 2 * M_PI * a / 12), std::polar(1.0, 2 * M_PI * b / 12);
            EXPECT_LE(objective_mle(obs.y, z), bf.grid_objective + 1e-12);
        }
}

TEST(Estimators, InputErrors) {
    const auto obs = fixtures::make_instance(8, 1.0, 1);
    EXPECT_THROW(brute_force_mle(fixtures::make_instance(7, 1.0, 1).y, 12), SizeError);
    EXPECT_THROW(brute_force_mle(obs.y, 72), SizeError);
    EXPECT_THROW(solve_bm(obs.y, 0), DomainError);
    EXPECT_THROW(solve_mle(obs.y, generate_truth(5, 1)), DimensionError);
    SolverOptions o;
    o.max_iter = 0;
    EXPECT_THROW(solve_mle(obs.y, std::nullopt, o), DomainError);
}
