#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "doctest.h"
#include "modspace/curves.hpp"
#include "modspace/modulus.hpp"
#include "modspace/spaces.hpp"

using namespace modspace;

namespace {

MetricGraph path_graph(int n, double len = 1.0) {
    std::vector<VertexSpec> vs;
    std::vector<EdgeSpec> es;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd c(1);
        c << i * len;
        vs.push_back({i, c});
    }
    for (int i = 0; i + 1 < n; ++i) es.push_back({i, i + 1, len, 1.0});
    return MetricGraph(std::move(vs), std::move(es));
}

}  // namespace

TEST_CASE("DiscreteCurve validates its steps") {
    MetricGraph g = path_graph(4);
    auto c = DiscreteCurve::create(g, {0, 1, 2, 3});
    CHECK(curve_length(c) == doctest::Approx(3.0));

    CHECK_THROWS_AS(DiscreteCurve::create(g, {0}), InvalidInputError);
    CHECK_THROWS_AS(DiscreteCurve::create(g, {0, 2}), InvalidInputError);
    // constant curves are rejected (their modulus would be infinite)
    CHECK_THROWS_AS(DiscreteCurve::create(g, {1, 1, 1}), InvalidInputError);
}

TEST_CASE("curve length counts traversals with multiplicity") {
    MetricGraph g = path_graph(2, 0.7);
    auto once = DiscreteCurve::create(g, {0, 1});
    CHECK(curve_length(once) == doctest::Approx(0.7));
    auto back_forth = DiscreteCurve::create(g, {0, 1, 0, 1});
    CHECK(curve_length(back_forth) == doctest::Approx(3 * 0.7));

    MetricGraph grid = grid_square(4);
    std::vector<int> bottom_row;
    for (int i = 0; i <= 4; ++i) bottom_row.push_back(i * 5);  // ids i*(n+1)+0
    auto line = DiscreteCurve::create(grid, bottom_row);
    CHECK(curve_length(line) == doctest::Approx(1.0));
}

TEST_CASE("line integrals") {
    MetricGraph g = grid_square(2);
    // horizontal crossing along y = 0: ids 0 -> 3 -> 6
    auto curve = DiscreteCurve::create(g, {0, 3, 6});
    Density zero{std::vector<double>(static_cast<std::size_t>(g.edge_count()), 0.0)};
    CHECK(line_integral(zero, g, curve) == 0.0);

    Density constant{std::vector<double>(static_cast<std::size_t>(g.edge_count()), 2.5)};
    CHECK(line_integral(constant, g, curve) == doctest::Approx(2.5 * curve_length(curve)));

    Density one_edge{std::vector<double>(static_cast<std::size_t>(g.edge_count()), 0.0)};
    one_edge.values[static_cast<std::size_t>(g.edge_between(0, 3))] = 1.0;
    CHECK(line_integral(one_edge, g, curve) == doctest::Approx(0.5));

    Density short_density{std::vector<double>(3, 1.0)};
    CHECK_THROWS_AS(line_integral(short_density, g, curve), MissingEdgeDensityError);

    // additivity under concatenation and linearity in rho
    auto left = DiscreteCurve::create(g, {0, 3});
    auto right = DiscreteCurve::create(g, {3, 6});
    Density mix{std::vector<double>(static_cast<std::size_t>(g.edge_count()), 0.0)};
    for (std::size_t e = 0; e < mix.values.size(); ++e) mix.values[e] = 0.1 * (1 + e % 5);
    CHECK(line_integral(mix, g, curve) ==
          doctest::Approx(line_integral(mix, g, left) + line_integral(mix, g, right)));

    Density combo = mix;
    for (std::size_t e = 0; e < combo.values.size(); ++e)
        combo.values[e] = 2.0 * mix.values[e] + 0.4 * one_edge.values[e];
    CHECK(line_integral(combo, g, curve) ==
          doctest::Approx(2.0 * line_integral(mix, g, curve) +
                          0.4 * line_integral(one_edge, g, curve)));

    Density negative{std::vector<double>(static_cast<std::size_t>(g.edge_count()), -1.0)};
    CHECK_THROWS_AS(line_integral(negative, g, curve), InvalidInputError);
}

TEST_CASE("metric derivative from difference quotients") {
    Fragment f;
    f.metric = FragmentMetric::euclidean;
    for (int i = 0; i <= 4; ++i) {
        f.domain.push_back(i * 0.25);
        Eigen::VectorXd p(2);
        p << i * 0.25, 0.0;
        f.points.push_back(p);
    }
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
        CHECK(metric_derivative(f, i) == doctest::Approx(1.0));

    // double-speed parametrization: gamma(t) moves 2t along the line
    Fragment fast;
    fast.metric = FragmentMetric::euclidean;
    for (int i = 0; i <= 4; ++i) {
        fast.domain.push_back(i * 0.25);
        Eigen::VectorXd p(2);
        p << i * 0.5, 0.0;
        fast.points.push_back(p);
    }
    CHECK(metric_derivative(fast, 2) == doctest::Approx(2.0));

    Fragment lone;
    lone.domain = {0.0};
    lone.points = {Eigen::VectorXd::Zero(2)};
    CHECK_THROWS_AS(metric_derivative(lone, 0), IsolatedPointError);
}

TEST_CASE("monotone crossing family on the grid is the n+1 straight lines") {
    for (int n : {2, 4, 7}) {
        MetricGraph g = grid_square(n);
        std::vector<int> left, right;
        for (const auto& v : g.vertices()) {
            if (v.coords[0] == 0.0) left.push_back(v.id);
            if (v.coords[0] == 1.0) right.push_back(v.id);
        }
        CurveFamily fam = crossing_family(g, left, right, 1000, CrossingStrategy::monotone);
        CHECK(fam.curves.size() == static_cast<std::size_t>(n + 1));
        for (const auto& c : fam.curves) {
            CHECK(curve_length(c) == doctest::Approx(1.0));
            double y = g.coords_of(c.vertex_ids().front())[1];
            for (int id : c.vertex_ids()) CHECK(g.coords_of(id)[1] == doctest::Approx(y));
        }
    }
}

TEST_CASE("two-vertex crossing family is the single edge") {
    MetricGraph g = path_graph(2);
    CurveFamily fam = crossing_family(g, {0}, {1}, 10, CrossingStrategy::all_simple);
    REQUIRE(fam.curves.size() == 1);
    CHECK(fam.curves[0].vertex_ids() == std::vector<int>{0, 1});
}

TEST_CASE("all_simple matches a DFS oracle") {
    MetricGraph g = grid_square(2);
    std::vector<int> left = {0, 1, 2}, right = {6, 7, 8};
    CurveFamily fam = crossing_family(g, left, right, 100000, CrossingStrategy::all_simple);

    // oracle: count simple left->right paths that leave the source set once
    std::set<int> src(left.begin(), left.end()), snk(right.begin(), right.end());
    int count = 0;
    std::vector<int> stack;
    std::set<int> seen;
    std::function<void(int)> dfs = [&](int u) {
        stack.push_back(u);
        seen.insert(u);
        if (snk.count(u) && stack.size() >= 2) {
            ++count;
        } else {
            for (const auto& [v, e] : g.neighbors(u)) {
                if (seen.count(v) || src.count(v)) continue;
                dfs(v);
            }
        }
        stack.pop_back();
        seen.erase(u);
    };
    for (int s : src) dfs(s);
    CHECK(fam.curves.size() == static_cast<std::size_t>(count));
}

TEST_CASE("shortest_k returns simple paths in nondecreasing length order") {
    MetricGraph g = grid_square(3);
    std::vector<int> left, right;
    for (const auto& v : g.vertices()) {
        if (v.coords[0] == 0.0) left.push_back(v.id);
        if (v.coords[0] == 1.0) right.push_back(v.id);
    }
    CurveFamily fam = crossing_family(g, left, right, 12, CrossingStrategy::shortest_k);
    REQUIRE(fam.curves.size() == 12);
    double prev = 0.0;
    for (const auto& c : fam.curves) {
        double len = curve_length(c);
        CHECK(len >= prev - 1e-12);
        prev = len;
        std::set<int> uniq(c.vertex_ids().begin(), c.vertex_ids().end());
        CHECK(uniq.size() == c.vertex_ids().size());  // loopless
    }
    // the four shortest crossings are the straight lines of length 1
    CHECK(curve_length(fam.curves[0]) == doctest::Approx(1.0));
    CHECK(curve_length(fam.curves[3]) == doctest::Approx(1.0));
    CHECK(curve_length(fam.curves[4]) > 1.0);
}

TEST_CASE("crossing_family error paths") {
    MetricGraph g({{0, {}}, {1, {}}, {2, {}}, {3, {}}}, {{0, 1, 1.0, 1.0}, {2, 3, 1.0, 1.0}});
    CHECK_THROWS_AS(crossing_family(g, {0}, {3}, 5, CrossingStrategy::all_simple), NoPathError);
    CHECK_THROWS_AS(crossing_family(g, {}, {3}, 5, CrossingStrategy::all_simple),
                    InvalidInputError);
    CHECK_THROWS_AS(crossing_family(g, {0}, {0}, 5, CrossingStrategy::all_simple),
                    InvalidInputError);
}

TEST_CASE("fragment_from_curve splits at pauses and turnarounds") {
    MetricGraph g = path_graph(5);

    auto straight = fragment_from_curve(g, DiscreteCurve::create(g, {0, 1, 2, 3, 4}));
    REQUIRE(straight.size() == 1);
    CHECK(straight[0].size() == 5);
    CHECK(straight[0].bi_lipschitz == doctest::Approx(1.0));

    auto paused = fragment_from_curve(g, DiscreteCurve::create(g, {0, 1, 2, 2, 3, 4}));
    CHECK(paused.size() == 2);

    auto back_forth = fragment_from_curve(g, DiscreteCurve::create(g, {0, 1, 0}));
    REQUIRE(back_forth.size() == 2);
    for (const auto& f : back_forth) {
        CHECK(f.size() == 2);
        CHECK(f.domain.back() == doctest::Approx(1.0));
    }
}

TEST_CASE("fragments pass the exhaustive bi-Lipschitz pair test") {
    MetricGraph g = grid_square(4);
    // an L-shaped curve: right along the bottom, then up the right side
    std::vector<int> ids;
    for (int i = 0; i <= 4; ++i) ids.push_back(i * 5);
    for (int j = 1; j <= 4; ++j) ids.push_back(4 * 5 + j);
    auto frags = fragment_from_curve(g, DiscreteCurve::create(g, ids));
    REQUIRE(frags.size() == 1);
    const Fragment& f = frags[0];
    double L = f.bi_lipschitz;
    CHECK(L >= 1.0);
    CHECK(L == doctest::Approx(f.tight_bi_lipschitz()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            double dt = f.domain[j] - f.domain[i];
            double dx = f.distance(i, j);
            CHECK(dx <= L * dt + 1e-12);
            CHECK(dx >= dt / L - 1e-12);
        }
    }
}
