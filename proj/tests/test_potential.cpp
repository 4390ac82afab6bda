#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "decaylab/potential.hpp"

using namespace decaylab;

namespace {

Grid radial_grid(double rho = 1.0, double L = 12.0, double h = 0.01)
{
    return build_grid(ObstacleSpec::ball(rho), L, h, GridMode::radial3d);
}

}  // namespace

TEST(EvalV, ClosedForms)
{
    const auto p = eval_V_radial(PotentialSpec::power(1.0, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(p.value, 0.25);
    EXPECT_DOUBLE_EQ(2.0 * p.derivative, -0.5);
    EXPECT_EQ(eval_V(PotentialSpec::zero(), {3.0, -1.0, 0.5}).value, 0.0);
    EXPECT_NEAR(eval_V(PotentialSpec::exponential(3.0), {2.0, 0.0, 0.0}).value, 3.0 * std::exp(-2.0), 1e-15);
    EXPECT_NEAR(eval_V(PotentialSpec::exponential(3.0), {2.0, 0.0, 0.0}).value, 0.40601, 1e-5);
    EXPECT_THROW(eval_V_radial(PotentialSpec::power(1.0, 2.0), 0.0), std::domain_error);
    EXPECT_THROW(PotentialSpec::power(-1.0, 2.0), std::invalid_argument);
}

TEST(EvalV, GradientMatchesCentredDifferencesAtSecondOrder)
{
    const Vec3 x{1.3, -0.7, 0.4};
    for (const auto& spec : {PotentialSpec::power(2.0, 3.0), PotentialSpec::exponential(1.5)}) {
        const Vec3 g = eval_V(spec, x).gradient;
        std::vector<double> errs;
        for (double h : {1e-2, 5e-3, 2.5e-3}) {
            const double fx = (eval_V(spec, {x.x + h, x.y, x.z}).value - eval_V(spec, {x.x - h, x.y, x.z}).value) / (2 * h);
            const double fy = (eval_V(spec, {x.x, x.y + h, x.z}).value - eval_V(spec, {x.x, x.y - h, x.z}).value) / (2 * h);
            const double fz = (eval_V(spec, {x.x, x.y, x.z + h}).value - eval_V(spec, {x.x, x.y, x.z - h}).value) / (2 * h);
            errs.push_back(std::hypot(fx - g.x, fy - g.y, fz - g.z));
        }
        for (std::size_t k = 1; k < errs.size(); ++k) {
            EXPECT_NEAR(std::log2(errs[k - 1] / errs[k]), 2.0, 0.1) << spec.describe();
        }
    }
}

TEST(CheckA2, CriticalPowerIsZeroEverywhere)
{
    const auto rep = check_A2(PotentialSpec::power(1.0, 2.0), radial_grid());
    EXPECT_TRUE(rep.pass);
    EXPECT_NEAR(rep.worst, 0.0, 1e-15);
    EXPECT_TRUE(rep.agree);
}

TEST(CheckA2, KleinGordonFails)
{
    const auto rep = check_A2(PotentialSpec::constant(1.0), radial_grid());
    EXPECT_FALSE(rep.pass);
    EXPECT_DOUBLE_EQ(rep.worst, 1.0);
    EXPECT_TRUE(rep.agree);
}

TEST(CheckA2, ExponentialOutsideBallTwo)
{
    const auto rep = check_A2(PotentialSpec::exponential(1.0), radial_grid(2.0, 12.0, 0.01));
    EXPECT_TRUE(rep.pass);
    EXPECT_NEAR(rep.worst, 0.0, 1e-12);
    EXPECT_NEAR(rep.worst_radius, 2.0, 1e-12);
}

TEST(CheckA2, SubcriticalPowerFailsAtTheBoundary)
{
    const auto rep = check_A2(PotentialSpec::power(1.0, 1.5), radial_grid());
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.closed_form_worst, 0.25, 1e-14);
    EXPECT_NEAR(rep.closed_form_radius, 1.0, 1e-14);
    EXPECT_NEAR(rep.worst, 0.25, 1e-14);
    EXPECT_NEAR(rep.worst_radius, 1.0, 1e-14);
    EXPECT_TRUE(rep.agree);
}

TEST(CheckA2, PowerVerdictIffAlphaAtLeastTwo)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> alpha(0.5, 4.0), v0(1e-3, 10.0);
    const Grid radial = radial_grid(1.0, 8.0, 0.02);
    const Grid planar = build_grid(ObstacleSpec::ball(1.0), 6.0, 0.04, GridMode::cartesian2d);
    for (int k = 0; k < 100; ++k) {
        const double a = k == 0 ? 2.0 : alpha(rng);
        const auto spec = PotentialSpec::power(v0(rng), a);
        for (const Grid* g : {&radial, &planar}) {
            const auto rep = check_A2(spec, *g);
            EXPECT_EQ(rep.pass, a >= 2.0) << spec.describe();
            EXPECT_TRUE(rep.agree) << spec.describe();
        }
    }
}

TEST(CheckA2, WorstScalesWithAmplitude)
{
    const Grid g = radial_grid(1.0, 8.0, 0.02);
    for (double a : {1.2, 2.0, 3.5}) {
        const double base = check_A2(PotentialSpec::power(1.0, a), g).worst;
        for (double v0 : {0.5, 3.0, 7.25}) {
            const auto rep = check_A2(PotentialSpec::power(v0, a), g);
            EXPECT_NEAR(rep.worst, v0 * base, 1e-14 * v0);
            EXPECT_EQ(rep.pass, check_A2(PotentialSpec::power(1.0, a), g).pass);
        }
    }
}

TEST(WeightDn, Values)
{
    const WeightParams w3(3, 1.0);
    EXPECT_DOUBLE_EQ(weight_dn(w3, norm(Vec3{3, 4, 0})), 5.0);
    const WeightParams w2(2, 1.0, 2.0);
    EXPECT_NEAR(weight_dn(w2, 1.0), 0.693147, 1e-6);
    EXPECT_THROW(weight_dn(w2, 0.5), std::domain_error);
    EXPECT_THROW(WeightParams(2, 0.5, 2.0), std::invalid_argument);
    EXPECT_DOUBLE_EQ(WeightParams(2, 0.8).B(), 2.5);
}

TEST(WeightPsi, Branches)
{
    const Psi a = weight_psi(0.0, 4.0);
    EXPECT_DOUBLE_EQ(a.value, 5.0);
    EXPECT_DOUBLE_EQ(a.dt, -1.0);
    EXPECT_DOUBLE_EQ(std::abs(a.dr), 1.0);

    const Psi b = weight_psi(3.0, 1.0);
    EXPECT_DOUBLE_EQ(b.value, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(b.dt, -1.0 / 9.0);
    EXPECT_DOUBLE_EQ(std::abs(b.dr), 1.0 / 9.0);

    const Psi c = weight_psi(2.0, 2.0);
    const Psi below = weight_psi(2.0, 2.0 - 1e-12), above = weight_psi(2.0, 2.0 + 1e-12);
    EXPECT_DOUBLE_EQ(c.value, 1.0);
    EXPECT_DOUBLE_EQ(c.dt, -1.0);
    EXPECT_NEAR(below.value, above.value, 1e-11);
    EXPECT_NEAR(below.dt, above.dt, 1e-11);
    EXPECT_NEAR(below.dr, above.dr, 1e-11);

    EXPECT_THROW(weight_psi(1.0, Vec3{0, 0, 0}), std::domain_error);
}

TEST(WeightPsi, PositiveAndBoundedByOnePlusR)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t(0.0, 60.0), r(0.0, 60.0);
    for (int k = 0; k < 10000; ++k) {
        const double tt = t(rng), rr = r(rng);
        const Psi p = weight_psi(tt, rr);
        EXPECT_GT(p.value, 0.0);
        EXPECT_LE(p.value, 1.0 + rr + 1e-12);
    }
}

TEST(Eikonal, Examples)
{
    const auto a = check_eikonal(2.0, {3.0, 0.0, 0.0});
    EXPECT_EQ(a.residual, 0.0);
    EXPECT_EQ(a.psi_t, -1.0);
    EXPECT_TRUE(a.pass);

    const auto b = check_eikonal(5.0, {1.0, 0.0, 0.0});
    EXPECT_NEAR(b.residual, 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(b.psi_t, -1.0 / 25.0);
    EXPECT_TRUE(b.pass);

    const auto c = check_eikonal(0.0, {1.0, 0.0, 0.0});
    EXPECT_EQ(c.residual, 0.0);
    EXPECT_EQ(c.psi_t, -1.0);
    EXPECT_TRUE(c.pass);

    EXPECT_THROW(check_eikonal(1.0, {0.0, 0.0, 0.0}), std::domain_error);
}

TEST(Eikonal, RandomPoints)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t(0.0, 40.0), x(-40.0, 40.0);
    for (int k = 0; k < 100000; ++k) {
        const Vec3 p{x(rng), x(rng), x(rng)};
        const auto e = check_eikonal(t(rng), p);
        ASSERT_LE(std::abs(e.residual), 1e-14);
        ASSERT_TRUE(e.pass);
    }
}
