#include <cmath>
#include <random>

#include "doctest.h"
#include "modspace/point_cloud.hpp"

using namespace modspace;

namespace {

Eigen::VectorXd v2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

PointCloud cloud(std::initializer_list<Eigen::VectorXd> pts) {
    return PointCloud::from_points(std::vector<Eigen::VectorXd>(pts), v2(0, 0));
}

PointCloud random_cloud(std::mt19937_64& rng, int n, double extent) {
    std::uniform_real_distribution<double> u(-extent, extent);
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < n; ++i) pts.push_back(v2(u(rng), u(rng)));
    return PointCloud::from_points(std::move(pts), v2(0, 0));
}

}  // namespace

TEST_CASE("pointed Hausdorff distance basics") {
    PointCloud a = cloud({v2(0, 0), v2(1, 0)});
    CHECK(pointed_hausdorff_distance(a, a, 2.0) == 0.0);

    // window cutoff: the far point of B is invisible at radius R
    PointCloud origin = cloud({v2(0, 0)});
    PointCloud with_far = cloud({v2(0, 0), v2(3.0, 0)});
    CHECK(pointed_hausdorff_distance(origin, with_far, 2.0) == 0.0);

    PointCloud b = cloud({v2(0, 0), v2(1.2, 0)});
    CHECK(pointed_hausdorff_distance(a, b, 2.0) == doctest::Approx(0.2));
    CHECK(pointed_hausdorff_distance(b, a, 2.0) == doctest::Approx(0.2));
}

TEST_CASE("d_R is monotone in R and symmetric") {
    std::mt19937_64 rng(5150);
    for (int t = 0; t < 20; ++t) {
        PointCloud a = random_cloud(rng, 30, 2.0);
        PointCloud b = random_cloud(rng, 25, 2.0);
        double prev = 0.0;
        for (double R : {0.5, 1.0, 1.5, 2.5}) {
            double d = pointed_hausdorff_distance(a, b, R);
            CHECK(d == pointed_hausdorff_distance(b, a, R));
            CHECK(d >= prev - 1e-15);
            prev = d;
        }
    }
}

TEST_CASE("d_R rejects mismatched dimensions") {
    PointCloud a = cloud({v2(0, 0)});
    Eigen::VectorXd p3(3);
    p3 << 0, 0, 0;
    PointCloud b = PointCloud::from_points({p3}, p3);
    CHECK_THROWS_AS(pointed_hausdorff_distance(a, b, 1.0), DimensionMismatchError);
}

TEST_CASE("dee distance of identical data is numerically zero") {
    std::mt19937_64 rng(99);
    PointCloud a = random_cloud(rng, 40, 1.5);
    SampledFunction f;
    for (const auto& p : a.points) {
        Eigen::VectorXd v(1);
        v << 0.5 * p[0] - 0.25 * p[1];
        f.values.push_back(v);
    }
    CHECK(dee_distance(a, f, a, f) <= 1e-9);
}

TEST_CASE("dee distance sees a constant function shift") {
    std::mt19937_64 rng(1234);
    PointCloud a = random_cloud(rng, 30, 0.9);  // inside B(0,1)
    SampledFunction f, g;
    for (const auto& p : a.points) {
        Eigen::VectorXd v(1);
        v << 0.3 * p[0];
        f.values.push_back(v);
        Eigen::VectorXd w(1);
        w << 0.3 * p[0] + 0.3;
        g.values.push_back(w);
    }
    // function mismatch dominates: the defining inf is exactly 0.3
    CHECK(dee_distance(a, f, a, g) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("dee distance caps at one half") {
    PointCloud a = cloud({v2(0, 0)});
    PointCloud b = cloud({v2(0, 0)});
    SampledFunction f, g;
    Eigen::VectorXd v(1);
    v << 0.0;
    f.values.push_back(v);
    v << 100.0;  // no eps < 1/2 can absorb this mismatch
    g.values.push_back(v);
    CHECK(dee_distance(a, f, b, g) == 0.5);
}

TEST_CASE("dee distance quasi-triangle inequality on random triples") {
    std::mt19937_64 rng(777);
    auto make = [&](PointCloud& c, SampledFunction& f) {
        c = random_cloud(rng, 35, 2.0);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double s1 = u(rng), s2 = u(rng), s0 = u(rng);
        for (const auto& p : c.points) {
            Eigen::VectorXd v(1);
            v << s1 * p[0] + s2 * p[1] + 0.3 * std::sin(s0 * (p[0] + p[1]));
            f.values.push_back(v);
        }
    };
    for (int t = 0; t < 50; ++t) {
        PointCloud A, B, C;
        SampledFunction f, g, h;
        make(A, f);
        make(B, g);
        make(C, h);
        double d12 = dee_distance(A, f, B, g);
        double d23 = dee_distance(B, g, C, h);
        double d13 = dee_distance(A, f, C, h);
        CHECK(d13 <= 2.0 * (d12 + d23) + 1e-8);
        CHECK(d12 == dee_distance(B, g, A, f));
    }
}
