#include <cmath>
#include <random>

#include "doctest.h"
#include "modspace/heisenberg.hpp"

using namespace modspace;

namespace {

std::mt19937_64 rng(4242);
std::uniform_real_distribution<double> unit(-1.0, 1.0);

HeisenbergPoint rnd() { return {unit(rng), unit(rng), unit(rng)}; }

}  // namespace

TEST_CASE("group law basics") {
    HeisenbergPoint p{0.3, -0.7, 0.2};
    HeisenbergPoint e = h_mul(p, {0, 0, 0});
    CHECK(e.x == p.x);
    CHECK(e.y == p.y);
    CHECK(e.z == p.z);

    HeisenbergPoint a = h_mul({1, 0, 0}, {0, 1, 0});
    CHECK(a.x == 1.0);
    CHECK(a.y == 1.0);
    CHECK(a.z == doctest::Approx(0.5));

    HeisenbergPoint b = h_mul({0, 1, 0}, {1, 0, 0});
    CHECK(b.z == doctest::Approx(-0.5));
}

TEST_CASE("inverse and associativity") {
    HeisenbergPoint q = h_inv({1, 2, 3});
    CHECK(q.x == -1.0);
    CHECK(q.y == -2.0);
    CHECK(q.z == -3.0);
    HeisenbergPoint e = h_mul({1, 2, 3}, q);
    CHECK(std::abs(e.x) + std::abs(e.y) + std::abs(e.z) == 0.0);

    for (int i = 0; i < 2000; ++i) {
        HeisenbergPoint p = rnd(), r = rnd(), s = rnd();
        HeisenbergPoint lhs = h_mul(h_mul(p, r), s);
        HeisenbergPoint rhs = h_mul(p, h_mul(r, s));
        CHECK(std::abs(lhs.x - rhs.x) <= 1e-12);
        CHECK(std::abs(lhs.y - rhs.y) <= 1e-12);
        CHECK(std::abs(lhs.z - rhs.z) <= 1e-12);
        HeisenbergPoint id = h_mul(h_inv(p), p);
        CHECK(std::abs(id.x) + std::abs(id.y) + std::abs(id.z) <= 1e-12);
        CHECK(std::abs(koranyi_norm(p) - koranyi_norm(h_inv(p))) <= 1e-12);
    }
}

TEST_CASE("Koranyi norm values") {
    CHECK(koranyi_norm({1, 0, 0}) == doctest::Approx(1.0));
    CHECK(koranyi_norm({0, 0, 1}) == doctest::Approx(2.0));  // (16)^(1/4)
}

TEST_CASE("left invariance and dilation homogeneity") {
    std::uniform_real_distribution<double> ts(0.3, 2.5);
    for (int i = 0; i < 2000; ++i) {
        HeisenbergPoint p = rnd(), q = rnd(), r = rnd();
        CHECK(std::abs(h_dist(p, q) - h_dist(h_mul(r, p), h_mul(r, q))) <= 1e-12);
        double t = ts(rng);
        CHECK(std::abs(h_dist(h_dilate(t, p), h_dilate(t, q)) - t * h_dist(p, q)) <= 1e-12);
    }
    HeisenbergPoint d = h_dilate(2.0, {1, 1, 1});
    CHECK(d.x == 2.0);
    CHECK(d.y == 2.0);
    CHECK(d.z == 4.0);
    HeisenbergPoint same = h_dilate(1.0, {0.3, 0.4, 0.5});
    CHECK(same.x == 0.3);
    CHECK(same.z == 0.5);
    CHECK_THROWS_AS(h_dilate(0.0, {1, 1, 1}), InvalidInputError);
}

TEST_CASE("lattice counting, total measure, and 4-regularity") {
    HeisenbergLattice small = heisenberg_lattice(4, 1.0);
    CHECK(small.points.size() == 125);
    CHECK(small.total_measure() == doctest::Approx(8.0).epsilon(1e-12));

    HeisenbergLattice lat = heisenberg_lattice(40, 1.0);
    CHECK(lat.total_measure() == doctest::Approx(8.0).epsilon(1e-12));
    // L(B(0,r)) ~ r^4 once the ball's z-extent r^2/4 spans a few lattice layers;
    // below that scale direct summation overestimates the slab
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    double last = 0.0;
    for (double r : {0.28, 0.4, 0.5, 0.7, 0.9}) {
        double ratio = lat.ball_measure({0, 0, 0}, r) / (r * r * r * r);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        last = ratio;
    }
    CHECK(hi / lo <= 4.0);
    // continuum Koranyi ball volume constant is pi^2/8
    CHECK(last == doctest::Approx(M_PI * M_PI / 8.0).epsilon(0.2));
}

TEST_CASE("alpha and beta curves are unit-speed Koranyi geodesics") {
    // axes through the origin
    auto axis = heisenberg_curve_family(HeisenbergCurveKind::alpha, {{0.0, 0.0}},
                                        {-0.5, -0.25, 0.0, 0.25, 0.5});
    REQUIRE(axis.size() == 1);
    const Fragment& f = axis[0];
    CHECK(f.bi_lipschitz == doctest::Approx(1.0));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j)
            CHECK(f.distance(i, j) == doctest::Approx(f.domain[j] - f.domain[i]).epsilon(1e-12));

    std::uniform_real_distribution<double> half(-0.5, 0.5);
    for (int i = 0; i < 500; ++i) {
        double a = half(rng), b = half(rng), s = half(rng), t = half(rng);
        for (auto kind : {HeisenbergCurveKind::alpha, HeisenbergCurveKind::beta}) {
            Eigen::Vector3d ps = heisenberg_curve_point(kind, a, b, s);
            Eigen::Vector3d pt = heisenberg_curve_point(kind, a, b, t);
            double d = h_dist({ps[0], ps[1], ps[2]}, {pt[0], pt[1], pt[2]});
            CHECK(std::abs(d - std::abs(s - t)) <= 1e-12);
        }
    }
}

TEST_CASE("alpha/beta fragments have unit metric derivative inside") {
    std::vector<std::array<double, 2>> ps = {{0.2, -0.3}, {-0.4, 0.1}};
    std::vector<double> ts;
    for (int i = 0; i <= 16; ++i) ts.push_back(-0.5 + i / 16.0);
    for (auto kind : {HeisenbergCurveKind::alpha, HeisenbergCurveKind::beta}) {
        for (const Fragment& f : heisenberg_curve_family(kind, ps, ts)) {
            for (std::size_t i = 1; i + 1 < f.size(); ++i)
                CHECK(metric_derivative(f, i) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(f.bi_lipschitz <= 1.0 + 1e-12);
        }
    }
}
