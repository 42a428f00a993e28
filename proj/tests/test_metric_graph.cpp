#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "modspace/metric_graph.hpp"
#include "modspace/spaces.hpp"

using namespace modspace;

namespace {

MetricGraph two_vertex_graph() {
    return MetricGraph({{0, {}}, {1, {}}}, {{0, 1, 1.0, 1.0}});
}

MetricGraph triangle_1_1_3() {
    return MetricGraph({{0, {}}, {1, {}}, {2, {}}},
                       {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}, {0, 2, 3.0, 1.0}});
}

MetricGraph unit_grid_3x3() {
    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    auto id = [](int i, int j) { return i * 3 + j; };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Eigen::VectorXd c(2);
            c << i, j;
            vs.push_back({id(i, j), c});
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i < 2) es.push_back({id(i, j), id(i + 1, j), 1.0, 1.0});
            if (j < 2) es.push_back({id(i, j), id(i, j + 1), 1.0, 1.0});
        }
    return MetricGraph(std::move(vs), std::move(es));
}

MetricGraph cycle_graph(int n) {
    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    for (int i = 0; i < n; ++i) vs.push_back({i, {}});
    for (int i = 0; i < n; ++i) es.push_back({i, (i + 1) % n, 1.0, 1.0});
    return MetricGraph(std::move(vs), std::move(es));
}

}  // namespace

TEST_CASE("construction rejects invalid graphs") {
    CHECK_THROWS_AS(MetricGraph({{0, {}}}, {{0, 0, 1.0, 1.0}}), InvalidInputError);
    CHECK_THROWS_AS(MetricGraph({{0, {}}, {1, {}}}, {{0, 1, 0.0, 1.0}}), InvalidInputError);
    CHECK_THROWS_AS(MetricGraph({{0, {}}, {1, {}}}, {{0, 1, 1.0, -0.5}}), InvalidInputError);
    CHECK_THROWS_AS(MetricGraph({{0, {}}, {1, {}}}, {{0, 1, 1.0, 0.0}}), InvalidInputError);
    CHECK_THROWS_AS(MetricGraph({{0, {}}, {0, {}}}, {}), InvalidInputError);
}

TEST_CASE("shortest_path basics") {
    MetricGraph g = two_vertex_graph();
    auto r = g.shortest_path(0, 1);
    CHECK(r.distance == doctest::Approx(1.0));
    CHECK(r.path == std::vector<int>{0, 1});

    auto same = g.shortest_path(1, 1);
    CHECK(same.distance == 0.0);
    CHECK(same.path == std::vector<int>{1});
}

TEST_CASE("shortest_path picks the two-edge route on the 1,1,3 triangle") {
    MetricGraph g = triangle_1_1_3();
    auto r = g.shortest_path(0, 2);
    CHECK(r.distance == doctest::Approx(2.0));
    CHECK(r.path == std::vector<int>{0, 1, 2});
}

TEST_CASE("shortest_path throws on disconnected input") {
    MetricGraph g({{0, {}}, {1, {}}, {2, {}}, {3, {}}}, {{0, 1, 1.0, 1.0}, {2, 3, 1.0, 1.0}});
    CHECK_THROWS_AS(g.shortest_path(0, 3), DisconnectedError);
}

TEST_CASE("open balls") {
    MetricGraph g = unit_grid_3x3();
    CHECK(g.ball(4, 0.0).empty());
    CHECK(g.ball(4, 100.0).size() == 9);

    // center (1,1), r = 1.5: center plus the 4 axis neighbors
    auto b = g.ball(4, 1.5);
    CHECK(b.size() == 5);
    auto d = g.distances_from(4);
    for (int v = 0; v < 9; ++v) {
        bool inside = std::find(b.begin(), b.end(), v) != b.end();
        CHECK(inside == (d[static_cast<std::size_t>(v)] < 1.5));
    }
}

TEST_CASE("doubling constant on a single edge is 1 once the ball stops growing") {
    MetricGraph g = two_vertex_graph();
    CHECK(doubling_constant(g, {1.5}, {0}) == doctest::Approx(1.0));
}

TEST_CASE("doubling constant of the 64-cycle at quarter circumference") {
    MetricGraph g = cycle_graph(64);
    // arc counting: B(x,r) spans 2*ceil(r)-2 edges for integer r on unit edges
    double expected = 62.0 / 30.0;
    CHECK(doubling_constant(g, {16.0}, {0}) == doctest::Approx(expected));
    CHECK(doubling_constant(g, {16.0}, {0}) == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("doubling constant throws when every sampled ball is empty") {
    MetricGraph g = two_vertex_graph();
    CHECK_THROWS_AS(doubling_constant(g, {1e-9}, {0}), EmptyBallError);
}

TEST_CASE("grid doubling stays bounded across refinement levels") {
    for (int n : {4, 8, 16}) {
        MetricGraph g = grid_square(n);
        std::vector<int> centers;
        for (const auto& v : g.vertices()) {
            if (v.coords[0] > 0.2 && v.coords[0] < 0.8 && v.coords[1] > 0.2 && v.coords[1] < 0.8)
                centers.push_back(v.id);
        }
        if (centers.size() > 12) centers.resize(12);
        double c = doubling_constant(g, {0.1, 0.2, 0.3}, centers);
        CHECK(c <= 16.0);
        CHECK(c >= 1.0);
    }
}

TEST_CASE("metric axioms hold on random triples of generated spaces") {
    std::mt19937_64 rng(31337);
    auto check_space = [&](const MetricGraph& g) {
        const auto& dist = g.all_pairs_distances();
        std::uniform_int_distribution<int> pick(0, g.vertex_count() - 1);
        for (int t = 0; t < 1000; ++t) {
            int a = pick(rng), b = pick(rng), c = pick(rng);
            CHECK(dist(a, a) == 0.0);
            CHECK(dist(a, b) == doctest::Approx(dist(b, a)));
            CHECK(dist(a, c) <= dist(a, b) + dist(b, c) + 1e-12);
            if (a != b) CHECK(dist(a, b) > 0.0);
        }
    };
    check_space(grid_square(5));
    check_space(sierpinski_carpet(3, 1));
    check_space(slit_carpet_level(1, 1).graph);
}
