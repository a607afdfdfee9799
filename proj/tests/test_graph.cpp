#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "mmpoincare/graph.hpp"
#include "mmpoincare/spaces.hpp"
#include "test_helpers.hpp"

using namespace mmp;
using testutil::at;

TEST_CASE("construction validates its invariants") {
    SECTION("disconnected input is an error") {
        REQUIRE_THROWS_AS(MMGraph::from_edges(4, {{0, 1}, {2, 3}}), std::invalid_argument);
    }
    SECTION("self-loops are rejected") {
        REQUIRE_THROWS_AS(MMGraph::from_edges(2, {{0, 0}, {0, 1}}), std::invalid_argument);
    }
    SECTION("non-positive measure is rejected") {
        REQUIRE_THROWS_AS(MMGraph::from_edges(2, {{0, 1}}, {1.0, 0.0}), std::invalid_argument);
        REQUIRE_THROWS_AS(MMGraph::from_edges(2, {{0, 1}}, {1.0, -2.0}), std::invalid_argument);
    }
    SECTION("duplicate edges collapse") {
        auto g = MMGraph::from_edges(2, {{0, 1}, {1, 0}, {0, 1}});
        REQUIRE(g.degree(0) == 1);
        REQUIRE(g.edge_count() == 1);
    }
    SECTION("counting measure is the default") {
        auto g = MMGraph::from_edges(3, {{0, 1}, {1, 2}});
        REQUIRE(g.measure(1) == 1.0);
        REQUIRE(g.total_measure() == 3.0);
    }
}

TEST_CASE("shortest path distance on the antenna") {
    auto g = antenna_graph({12});
    SECTION("identity") { REQUIRE(shortest_path_distance(g, at(g, 0, 0), at(g, 0, 0)) == 0); }
    SECTION("cross-arm pairs go through the spine: |m|+|m'|+|n-n'|") {
        REQUIRE(shortest_path_distance(g, at(g, 3, 2), at(g, -1, 5)) == 7);
        REQUIRE(shortest_path_distance(g, at(g, 1, -1), at(g, 2, 3)) == 7);
    }
    SECTION("same-arm pairs stay on the arm") {
        // (2,4) -> (5,4): 3 hops along the row; the through-the-spine count
        // would be 7.
        REQUIRE(shortest_path_distance(g, at(g, 2, 4), at(g, 5, 4)) == 3);
    }
}

TEST_CASE("balls on the antenna") {
    auto g = antenna_graph({30});
    const auto origin = at(g, 0, 0);
    SECTION("radius 0") {
        auto b = ball(g, origin, 0.0);
        REQUIRE(b.members.size() == 1);
        REQUIRE(b.total_mass == 1.0);
    }
    SECTION("radius 1 is the origin plus its 4 neighbors") {
        auto b = ball(g, origin, 1.0);
        REQUIRE(b.members.size() == 5);
    }
    SECTION("radius 10 matches the closed form 2R^2+2R+1") {
        auto b = ball(g, origin, 10.0);
        REQUIRE(b.members.size() == 221);
        REQUIRE(b.total_mass == 221.0);
    }
    SECTION("negative radius is rejected") {
        REQUIRE_THROWS_AS(ball(g, origin, -1.0), std::invalid_argument);
    }
}

TEST_CASE("field average") {
    SECTION("constant field averages to itself") {
        auto g = antenna_graph({9});
        ScalarField u(g.vertex_count(), 3.25);
        REQUIRE(field_average(g, u, ball(g, at(g, 0, 0), 5.0)) == Catch::Approx(3.25));
    }
    SECTION("odd height field has zero average on symmetric balls") {
        auto g = antenna_graph({15});
        auto u = coordinate_field(g, 1);
        for (double R : {1.0, 4.0, 9.0})
            REQUIRE(field_average(g, u, ball(g, at(g, 0, 0), R)) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("P3 with u = (-1, 0, 1)") {
        auto g = testutil::path_graph(3);
        ScalarField u{-1.0, 0.0, 1.0};
        REQUIRE(field_average(g, u, ball(g, 1, 1.0)) == Catch::Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("gradient length") {
    auto g = antenna_graph({12});
    auto u = coordinate_field(g, 1);
    SECTION("constant field has zero gradient everywhere") {
        ScalarField c(g.vertex_count(), 7.0);
        for (VertexId v = 0; v < 40; ++v) REQUIRE(gradient_length(g, c, v) == 0.0);
    }
    SECTION("height field at the spine sees the two vertical neighbors") {
        REQUIRE(gradient_length(g, u, at(g, 0, 0)) == Catch::Approx(std::sqrt(2.0)));
    }
    SECTION("height field is flat along arms") {
        REQUIRE(gradient_length(g, u, at(g, 5, 3)) == 0.0);
    }
}

TEST_CASE("lp norm on a vertex set") {
    auto g = testutil::path_graph(3);
    SECTION("zero field") {
        ScalarField u(3, 0.0);
        std::vector<VertexId> all{0, 1, 2};
        REQUIRE(lp_norm_on_set(g, u, all, 2.0) == 0.0);
    }
    SECTION("P3, u = (-1,0,1), sigma = 2") {
        ScalarField u{-1.0, 0.0, 1.0};
        std::vector<VertexId> all{0, 1, 2};
        REQUIRE(lp_norm_on_set(g, u, all, 2.0) == Catch::Approx(std::sqrt(2.0)));
    }
    SECTION("sigma = 1 equals the weighted absolute sum") {
        auto h = testutil::random_connected_graph(40, 0.8, 7, true);
        Rng rng(11);
        auto u = testutil::random_field(h.vertex_count(), rng);
        std::vector<VertexId> set;
        for (VertexId v = 0; v < 40; v += 3) set.push_back(v);
        double expected = 0.0;
        for (VertexId v : set) expected += std::abs(u[v]) * h.measure(v);
        REQUIRE(lp_norm_on_set(h, u, set, 1.0) == Catch::Approx(expected));
    }
    SECTION("sigma below 1 is a parameter error") {
        ScalarField u(3, 1.0);
        std::vector<VertexId> all{0, 1, 2};
        REQUIRE_THROWS_AS(lp_norm_on_set(g, u, all, 0.5), std::invalid_argument);
    }
}

TEST_CASE("metric axioms against an all-pairs reference") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const std::size_t n = 30 + 40 * seed;
        auto g = testutil::random_connected_graph(n, 1.2, seed);
        auto ref = testutil::floyd_warshall(g);
        Rng rng(seed * 77);
        for (int k = 0; k < 200; ++k) {
            auto x = static_cast<VertexId>(rng.below(n));
            auto y = static_cast<VertexId>(rng.below(n));
            const int d = shortest_path_distance(g, x, y);
            REQUIRE(d == ref[x][y]);
            REQUIRE(d == shortest_path_distance(g, y, x));
            REQUIRE((d == 0) == (x == y));
        }
    }
}

TEST_CASE("metric axioms on a large graph, sampled triples") {
    auto g = testutil::random_connected_graph(1000, 1.5, 17);
    Rng rng(99);
    for (int k = 0; k < 40; ++k) {
        auto x = static_cast<VertexId>(rng.below(1000));
        auto dx = bfs_distances(g, x);
        auto y = static_cast<VertexId>(rng.below(1000));
        auto z = static_cast<VertexId>(rng.below(1000));
        auto dy = bfs_distances(g, y);
        REQUIRE(dx[y] == dy[x]);
        REQUIRE(dx[z] <= dx[y] + dy[z]);
    }
}

TEST_CASE("ball monotonicity in the radius") {
    auto g = testutil::random_connected_graph(300, 1.0, 5);
    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
        auto p = static_cast<VertexId>(rng.below(300));
        const double r1 = rng.uniform(0.0, 6.0);
        const double r2 = r1 + rng.uniform(0.0, 6.0);
        auto b1 = ball(g, p, r1);
        auto b2 = ball(g, p, r2);
        REQUIRE(b1.total_mass <= b2.total_mass);
        REQUIRE(std::includes(b2.members.begin(), b2.members.end(), b1.members.begin(),
                              b1.members.end()));
    }
}

TEST_CASE("gradient vanishes everywhere iff the field is constant") {
    auto g = testutil::random_connected_graph(120, 0.7, 9);
    ScalarField c(g.vertex_count(), -2.5);
    for (std::size_t v = 0; v < g.vertex_count(); ++v)
        REQUIRE(gradient_length(g, c, static_cast<VertexId>(v)) == 0.0);
    // flipping any single value creates gradient somewhere
    Rng rng(4);
    for (int k = 0; k < 10; ++k) {
        auto u = c;
        u[rng.below(g.vertex_count())] += 1.0;
        double total = 0.0;
        for (std::size_t v = 0; v < g.vertex_count(); ++v)
            total += gradient_length(g, u, static_cast<VertexId>(v));
        REQUIRE(total > 0.0);
    }
}

TEST_CASE("ball average nearly minimizes the sigma-deviation: factor 2^sigma") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        auto g = testutil::random_connected_graph(60, 0.9, 100 + trial, true);
        auto u = testutil::random_field(g.vertex_count(), rng);
        const double sigma = 1.0 + 2.5 * rng.uniform();
        auto b = ball(g, static_cast<VertexId>(rng.below(60)), rng.uniform(1.0, 5.0));
        const double mean = field_average(g, u, b);
        double dev_mean = 0.0;
        for (VertexId v : b.members)
            dev_mean += std::pow(std::abs(u[v] - mean), sigma) * g.measure(v);
        for (int t = 0; t < 10; ++t) {
            const double tau = rng.normal() * 2.0;
            double dev_tau = 0.0;
            for (VertexId v : b.members)
                dev_tau += std::pow(std::abs(u[v] - tau), sigma) * g.measure(v);
            REQUIRE(dev_mean <= std::pow(2.0, sigma) * dev_tau * (1.0 + 1e-12));
        }
    }
}
