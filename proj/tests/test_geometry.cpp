#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "decaylab/geometry.hpp"

using namespace decaylab;

namespace {

constexpr double kPi = std::numbers::pi;

ObstacleSpec square()
{
    return ObstacleSpec::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
}

// L-shaped: the top face of the right arm, y = 2 for x in [1, 3], faces away from the origin.
ObstacleSpec l_shape()
{
    return ObstacleSpec::polygon({{-1, -1}, {1, -1}, {1, 2}, {3, 2}, {3, 3}, {-1, 3}});
}

}  // namespace

TEST(BuildGrid, RadialNodeCount)
{
    const Grid g = build_grid(ObstacleSpec::ball(1.0), 10.0, 0.01, GridMode::radial3d);
    EXPECT_EQ(g.size(), 901u);
    EXPECT_DOUBLE_EQ(g.radius(0), 1.0);
    EXPECT_NEAR(g.radius(900), 10.0, 1e-12);
    EXPECT_FALSE(g.active(0));
    EXPECT_FALSE(g.active(900));
    EXPECT_TRUE(g.active(1));
}

TEST(BuildGrid, CartesianMaskMarksObstacleCells)
{
    const Grid g = build_grid(ObstacleSpec::ball(1.0), 4.0, 0.025, GridMode::cartesian2d);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = norm(g.position(i));
        if (r < 1.0) EXPECT_EQ(g.node_class(i), NodeClass::obstacle) << "r = " << r;
        if (r > 1.0 + 1e-12 && r <= 4.0) EXPECT_TRUE(g.active(i)) << "r = " << r;
        if (r > 4.0) EXPECT_EQ(g.node_class(i), NodeClass::outer);
        EXPECT_EQ(g.mask()[i], g.active(i) ? 1.0 : 0.0);
    }
}

TEST(BuildGrid, InteriorStencilsAreClassified)
{
    const Grid g = build_grid(square(), 4.0, 0.025, GridMode::cartesian2d);
    const std::size_t nx = g.nx();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.active(i)) continue;
        ASSERT_GE(i % nx, 2u);
        ASSERT_LT(i % nx, nx - 2);
        ASSERT_GE(i / nx, 2u);
        ASSERT_LT(i / nx, g.size() / nx - 2);
    }
}

TEST(BuildGrid, RejectsBadInput)
{
    EXPECT_THROW(build_grid(ObstacleSpec::ball(1.0), 1.5, 0.001, GridMode::radial3d), std::invalid_argument);
    EXPECT_THROW(build_grid(ObstacleSpec::ball(1.0), 10.0, 0.0, GridMode::radial3d), std::invalid_argument);
    EXPECT_THROW(build_grid(ObstacleSpec::ball(1.0), 10.0, 0.1, GridMode::radial3d), std::invalid_argument);
    EXPECT_THROW(build_grid(square(), 10.0, 0.01, GridMode::radial3d), std::invalid_argument);
    EXPECT_THROW(ObstacleSpec::polygon({{1, 1}, {2, 1}, {2, 2}, {1, 2}}), std::invalid_argument);
    EXPECT_THROW(ObstacleSpec::ball(0.0), std::invalid_argument);
}

TEST(Integrate, AnnulusAreaCartesian)
{
    const Grid g = build_grid(ObstacleSpec::ball(1.0), 4.0, 0.01, GridMode::cartesian2d);
    const std::vector<double> one(g.size(), 1.0);
    const double area = integrate(one, g, Region::ball(2.0));
    EXPECT_NEAR(area, 3.0 * kPi, 0.005 * 3.0 * kPi);
}

TEST(Integrate, ShellVolumeRadial)
{
    const Grid g = build_grid(ObstacleSpec::ball(1.0), 10.0, 0.01, GridMode::radial3d);
    const std::vector<double> one(g.size(), 1.0);
    const double exact = 4.0 * kPi / 3.0 * (8.0 - 1.0);
    EXPECT_NEAR(integrate(one, g, Region::ball(2.0)), exact, 0.005 * exact);
}

TEST(Integrate, ZeroAndDisjointFields)
{
    const Grid g = build_grid(ObstacleSpec::ball(1.0), 10.0, 0.01, GridMode::radial3d);
    const std::vector<double> zero(g.size(), 0.0);
    EXPECT_EQ(integrate(zero, g, Region::ball(5.0)), 0.0);
    EXPECT_EQ(integrate(zero, g, Region::whole()), 0.0);
    std::vector<double> outer(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) outer[i] = g.radius(i) >= 3.0 ? 1.0 : 0.0;
    EXPECT_EQ(integrate(outer, g, Region::ball(2.0)), 0.0);
}

TEST(Integrate, Additivity)
{
    for (GridMode mode : {GridMode::radial3d, GridMode::cartesian2d}) {
        const Grid g = build_grid(ObstacleSpec::ball(1.0), 6.0, 0.04, mode);
        std::vector<double> f(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-g.radius(i)) * (1.0 + std::sin(3.0 * g.radius(i)));
        for (double R : {1.5, 2.0, 4.25}) {
            const double all = integrate(f, g, Region::whole());
            const double split = integrate(f, g, Region::ball(R)) + integrate(f, g, Region::exterior(R));
            EXPECT_NEAR(split, all, 1e-12 * all);
        }
    }
}

TEST(Integrate, FirstOrderConvergence)
{
    const double exact = 4.0 * kPi / 3.0 * (27.0 - 1.0);
    double prev = 0.0;
    for (double h : {0.04, 0.02, 0.01}) {
        const Grid g = build_grid(ObstacleSpec::ball(1.0), 6.0, h, GridMode::radial3d);
        const std::vector<double> one(g.size(), 1.0);
        const double err = std::abs(integrate(one, g, Region::ball(3.0)) - exact);
        if (prev > 0.0) EXPECT_LE(err, 0.6 * prev);
        prev = err;
    }
}

TEST(Integrate, RegionBeyondLThrows)
{
    const Grid g = build_grid(ObstacleSpec::ball(1.0), 10.0, 0.01, GridMode::radial3d);
    const std::vector<double> one(g.size(), 1.0);
    EXPECT_THROW(integrate(one, g, Region::ball(11.0)), std::invalid_argument);
    EXPECT_THROW(integrate(one, g, Region::annulus(2.0, 12.0)), std::invalid_argument);
}

TEST(StarShape, BallWorstIsMinusRadius)
{
    for (double rho : {0.5, 1.0, 2.0}) {
        const StarShapeReport r = check_star_shaped(ObstacleSpec::ball(rho));
        EXPECT_TRUE(r.pass);
        EXPECT_NEAR(r.worst, -rho, 1e-12);
    }
}

TEST(StarShape, SquarePasses)
{
    const StarShapeReport r = check_star_shaped(square());
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.worst, -1.0, 1e-12);
}

TEST(StarShape, ReentrantPolygonFails)
{
    const StarShapeReport r = check_star_shaped(l_shape());
    EXPECT_FALSE(r.pass);
    EXPECT_NEAR(r.worst, 2.0, 1e-12);
    EXPECT_NEAR(dot(r.where.point, r.where.normal), r.worst, 1e-12);
    EXPECT_NEAR(r.where.point.y, 2.0, 1e-12);
}

TEST(Boundary, NormalsAreUnit)
{
    for (const auto& obs : {ObstacleSpec::ball(1.5), square(), l_shape()}) {
        for (const auto& s : sample_boundary(obs, 0.05)) EXPECT_NEAR(norm(s.normal), 1.0, 1e-14);
    }
}

TEST(GridSummary, ReportsCounts)
{
    const Grid g = build_grid(ObstacleSpec::ball(1.0), 4.0, 0.025, GridMode::cartesian2d);
    const auto j = grid_summary(g);
    EXPECT_EQ(j.at("mode").get<std::string>(), "cartesian2d");
    EXPECT_TRUE(j.contains("star_shape"));
}
