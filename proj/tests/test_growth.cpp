#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mmpoincare/growth.hpp"
#include "mmpoincare/net.hpp"
#include "mmpoincare/spaces.hpp"
#include "test_helpers.hpp"

using namespace mmp;
using testutil::at;

TEST_CASE("volume curve") {
    SECTION("antenna closed form at R = 10 and R = 100") {
        auto g = antenna_graph({100});
        const double radii[] = {0.0, 10.0, 100.0};
        auto curve = volume_curve(g, at(g, 0, 0), radii);
        REQUIRE(curve.volumes[0] == 1.0);
        REQUIRE(curve.volumes[1] == 221.0);
        REQUIRE(curve.volumes[2] == 20201.0);
    }
    SECTION("R = 0 returns the center mass") {
        auto g = testutil::random_connected_graph(20, 1.0, 3, true);
        const double radii[] = {0.0};
        auto curve = volume_curve(g, 7, radii);
        REQUIRE(curve.volumes[0] == g.measure(7));
    }
    SECTION("Z^2 matches the antenna count at the origin") {
        auto g = grid_graph(2, 12);
        const double radii[] = {10.0};
        REQUIRE(volume_curve(g, g.guard()->root, radii).volumes[0] == 221.0);
    }
    SECTION("unsorted radii are rejected") {
        auto g = grid_graph(2, 5);
        const double radii[] = {3.0, 1.0};
        REQUIRE_THROWS_AS(volume_curve(g, 0, radii), std::invalid_argument);
    }
    SECTION("curves are nondecreasing") {
        auto g = testutil::random_connected_graph(200, 1.3, 8, true);
        std::vector<double> radii;
        for (int r = 0; r <= 12; ++r) radii.push_back(r);
        auto curve = volume_curve(g, 3, radii);
        for (std::size_t i = 1; i < curve.volumes.size(); ++i)
            REQUIRE(curve.volumes[i] >= curve.volumes[i - 1]);
    }
}

TEST_CASE("fit_growth") {
    SECTION("exact power curve V = 3 R^2") {
        VolumeCurve curve;
        for (double R : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
            curve.radii.push_back(R);
            curve.volumes.push_back(3.0 * R * R);
        }
        auto fit = fit_growth(curve, 2.0, 64.0);
        REQUIRE(fit.alpha_hat == Catch::Approx(2.0).margin(1e-12));
        REQUIRE(fit.v_prime == Catch::Approx(3.0).margin(1e-10));
        REQUIRE(fit.residual < 1e-12);
        REQUIRE(fit.growth_class == GrowthClass::Polynomial);
        REQUIRE(fit.R0_prime == 2.0);
    }
    SECTION("antenna closed-form curve over [16, 512]") {
        VolumeCurve curve;
        for (int R = 1; R <= 512; R *= 2) {
            curve.radii.push_back(R);
            curve.volumes.push_back(antenna_ball_volume(R));
        }
        auto fit = fit_growth(curve, 16.0, 512.0);
        REQUIRE(fit.alpha_hat > 1.95);
        REQUIRE(fit.alpha_hat < 2.05);
        REQUIRE(fit.growth_class == GrowthClass::Polynomial);
        // tightness: the bound holds on every in-range sample and touches one
        bool touched = false;
        for (std::size_t i = 0; i < curve.radii.size(); ++i) {
            if (curve.radii[i] < 16.0) continue;
            const double bound = fit.v_prime * std::pow(curve.radii[i], fit.alpha_hat);
            REQUIRE(curve.volumes[i] <= bound * (1.0 + 1e-12));
            if (curve.volumes[i] >= bound * (1.0 - 1e-9)) touched = true;
        }
        REQUIRE(touched);
        // the fitted bound keeps holding down to R0_prime and fails below it
        REQUIRE(fit.R0_prime == 16.0);
        REQUIRE(antenna_ball_volume(8) > fit.v_prime * std::pow(8.0, fit.alpha_hat));
    }
    SECTION("full binary tree is classified exponential") {
        auto g = tree_graph(2, 14);
        std::vector<double> radii;
        for (int r = 2; r <= 14; ++r) radii.push_back(r);
        auto curve = volume_curve(g, 0, radii);
        // oracle: V(R) = 2^{R+1} - 1 at the root
        for (std::size_t i = 0; i < radii.size(); ++i)
            REQUIRE(curve.volumes[i] == std::pow(2.0, radii[i] + 1.0) - 1.0);
        auto fit = fit_growth(curve, 2.0, 14.0);
        REQUIRE(fit.growth_class == GrowthClass::Exponential);
    }
    SECTION("fewer than 5 in-range samples is a parameter error") {
        VolumeCurve curve;
        for (double R : {1.0, 2.0, 3.0, 4.0}) {
            curve.radii.push_back(R);
            curve.volumes.push_back(R * R);
        }
        REQUIRE_THROWS_AS(fit_growth(curve, 1.0, 4.0), std::invalid_argument);
    }
    SECTION("nonpositive volumes in range are rejected") {
        VolumeCurve curve;
        for (double R : {1.0, 2.0, 3.0, 4.0, 5.0}) {
            curve.radii.push_back(R);
            curve.volumes.push_back(R - 1.0);
        }
        REQUIRE_THROWS_AS(fit_growth(curve, 1.0, 5.0), std::invalid_argument);
    }
    SECTION("a violating sample above the range pushes the onset past it") {
        VolumeCurve curve;
        for (double R : {2.0, 4.0, 8.0, 16.0, 32.0}) {
            curve.radii.push_back(R);
            curve.volumes.push_back(R * R);
        }
        curve.radii.push_back(64.0);
        curve.volumes.push_back(1e9); // superquadratic jump outside the fit range
        auto fit = fit_growth(curve, 2.0, 32.0);
        REQUIRE(fit.R0_prime > 32.0); // the fitted bound does not hold onward from any sample
    }
}

TEST_CASE("doubling constants") {
    SECTION("single-vertex graph has C_r = 1") {
        auto g = MMGraph::from_edges(1, {});
        const VertexId centers[] = {0};
        const double radii[] = {1.0, 3.0};
        auto report = doubling_constants(g, centers, radii);
        REQUIRE(report.constants[0] == 1.0);
        REQUIRE(report.constants[1] == 1.0);
    }
    SECTION("antenna at the origin, r = 10") {
        auto g = antenna_graph({40});
        const VertexId centers[] = {at(g, 0, 0), at(g, 3, 1)};
        const double radii[] = {10.0};
        auto report = doubling_constants(g, centers, radii);
        REQUIRE(report.constants[0] >= 841.0 / 221.0 - 1e-12);
    }
    SECTION("Z^2 doubling approaches 4") {
        auto g = grid_graph(2, 70);
        const VertexId centers[] = {g.guard()->root};
        const double radii[] = {32.0};
        auto report = doubling_constants(g, centers, radii);
        const double expected = antenna_ball_volume(64) / antenna_ball_volume(32);
        REQUIRE(report.constants[0] == Catch::Approx(expected));
        REQUIRE(std::abs(report.constants[0] - 4.0) < 0.1);
    }
}

TEST_CASE("bishop-gromov doubling bound") {
    REQUIRE(bishop_gromov_doubling(2, 0.0, 5.0) == 4.0);
    REQUIRE(bishop_gromov_doubling(3, 0.0, 0.1) == 8.0);
    REQUIRE(bishop_gromov_doubling(2, 1.0, 1.0) == Catch::Approx(4.0 * std::exp(2.0)));
    REQUIRE_THROWS_AS(bishop_gromov_doubling(0, 0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(bishop_gromov_doubling(2, -1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(bishop_gromov_doubling(2, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("growth exponent transfers across a rough isometry") {
    // Euclidean square sample vs. the Z^2 grid: fitted exponents agree.
    auto cloud = box_cloud(2, 2.0, 6000, 42);
    NetConfig cfg{0.08, 1};
    auto net = build_net(cloud, cfg);
    auto g = net_graph(cloud, net, cfg);
    // center-most net vertex
    VertexId center = 0;
    double best = 1e9;
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        const auto& c = g.coordinates()[i];
        const double d = std::abs(c[0] - 1.0) + std::abs(c[1] - 1.0);
        if (d < best) {
            best = d;
            center = static_cast<VertexId>(i);
        }
    }
    std::vector<double> radii;
    for (int r = 3; r <= 11; ++r) radii.push_back(r);
    auto fit = fit_growth(volume_curve(g, center, radii), 3.0, 11.0);

    auto grid = grid_graph(2, 40);
    std::vector<double> grid_radii;
    for (int r = 3; r <= 11; ++r) grid_radii.push_back(r);
    auto grid_fit = fit_growth(volume_curve(grid, grid.guard()->root, grid_radii), 3.0, 11.0);

    REQUIRE(std::abs(fit.alpha_hat - grid_fit.alpha_hat) < 0.15);
}
