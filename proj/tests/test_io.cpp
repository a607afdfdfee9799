#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "mmpoincare/io.hpp"
#include "test_helpers.hpp"

using namespace mmp;

TEST_CASE("edge list format") {
    SECTION("round trip preserves adjacency and measure") {
        auto g = testutil::random_connected_graph(25, 1.1, 7, true);
        std::ostringstream out;
        write_edge_list(out, g);
        std::istringstream in(out.str());
        auto h = read_edge_list(in);
        REQUIRE(h.vertex_count() == g.vertex_count());
        REQUIRE(h.edge_count() == g.edge_count());
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            auto a = g.neighbors(static_cast<VertexId>(v));
            auto b = h.neighbors(static_cast<VertexId>(v));
            REQUIRE(std::vector<VertexId>(a.begin(), a.end()) ==
                    std::vector<VertexId>(b.begin(), b.end()));
            REQUIRE(h.measure(static_cast<VertexId>(v)) == g.measure(static_cast<VertexId>(v)));
        }
    }
    SECTION("comments and the optional measure block") {
        std::istringstream in(
            "# a 3-path with non-uniform masses\n"
            "vertices 3\n"
            "0 1\n"
            "1 2  # inline comment\n"
            "measure\n"
            "0 1.5\n"
            "1 2.5\n"
            "2 0.25\n");
        auto g = read_edge_list(in);
        REQUIRE(g.vertex_count() == 3);
        REQUIRE(g.measure(1) == 2.5);
    }
    SECTION("counting measure when the block is absent") {
        std::istringstream in("vertices 2\n0 1\n");
        auto g = read_edge_list(in);
        REQUIRE(g.measure(0) == 1.0);
    }
    SECTION("malformed inputs") {
        std::istringstream no_header("0 1\n");
        REQUIRE_THROWS_AS(read_edge_list(no_header), std::runtime_error);
        std::istringstream bad_line("vertices 2\n0 1 2\n");
        REQUIRE_THROWS_AS(read_edge_list(bad_line), std::runtime_error);
        std::istringstream missing("vertices 2\n0 1\nmeasure\n0 1.0\n");
        REQUIRE_THROWS_AS(read_edge_list(missing), std::runtime_error);
    }
}

TEST_CASE("point cloud format") {
    SECTION("unweighted round trip") {
        PointCloud cloud = PointCloud::euclidean({0.0, 1.0, 0.5, -2.25, 3.125, 4.0}, 2);
        std::ostringstream out;
        write_point_cloud(out, cloud, false);
        std::istringstream in(out.str());
        auto raw = read_point_cloud(in);
        REQUIRE(raw.dim == 2);
        REQUIRE(raw.coords == cloud.coords());
        REQUIRE(raw.weights.empty());
    }
    SECTION("weighted round trip") {
        PointCloud cloud = PointCloud::euclidean({0.1, 0.2, 0.3}, 1, {1.0, 0.5, 2.0});
        std::ostringstream out;
        write_point_cloud(out, cloud, true);
        REQUIRE(out.str().rfind("weighted\n", 0) == 0);
        std::istringstream in(out.str());
        auto raw = read_point_cloud(in);
        REQUIRE(raw.dim == 1);
        REQUIRE(raw.weights == cloud.weights());
    }
    SECTION("inconsistent field counts are rejected") {
        std::istringstream in("1.0 2.0\n3.0\n");
        REQUIRE_THROWS_AS(read_point_cloud(in), std::runtime_error);
    }
}

TEST_CASE("format_double round-trips exactly") {
    for (double x : {0.1, 1.0 / 3.0, 2.0, -1.75e-17, 3.141592653589793, 1e300, 0.0}) {
        const std::string s = format_double(x);
        REQUIRE(std::stod(s) == x);
    }
}

TEST_CASE("csv writer") {
    CsvWriter csv({"R", "volume"});
    csv.add_row({"1", "5"});
    csv.add_row({"2", "13"});
    REQUIRE(csv.str() == "R,volume\n1,5\n2,13\n");
    REQUIRE_THROWS_AS(csv.add_row({"only-one"}), std::invalid_argument);
}
