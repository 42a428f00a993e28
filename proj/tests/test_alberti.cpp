#include <cmath>

#include "doctest.h"
#include "modspace/alberti.hpp"
#include "modspace/modulus.hpp"
#include "modspace/scenarios.hpp"
#include "modspace/spaces.hpp"

using namespace modspace;

namespace {

Eigen::VectorXd v2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

}  // namespace

TEST_CASE("cone membership") {
    Cone c(v2(1, 0), 0.5);
    CHECK_FALSE(cone_contains(c, v2(0, 0)));
    CHECK(cone_contains(c, v2(1, 0)));
    CHECK(cone_contains(c, v2(1, 1)));  // exactly 45 degrees, >= holds
    CHECK_FALSE(cone_contains(c, v2(0, 1)));
    CHECK_FALSE(cone_contains(c, v2(-1, 0.1)));

    Cone everything(v2(0, 1), -1.5);
    CHECK(cone_contains(everything, v2(-3, -7)));
    CHECK_FALSE(cone_contains(everything, v2(0, 0)));
}

TEST_CASE("cone independence refuter") {
    Cone cx(v2(1, 0), std::sqrt(3.0) / 2.0);
    Cone cy(v2(0, 1), std::sqrt(3.0) / 2.0);
    CHECK(cones_independent({cx, cy}, 10000).independent);

    // the same cone twice: any shared direction is a rank-1 witness
    auto res = cones_independent({cx, cx}, 1000);
    CHECK_FALSE(res.independent);
    REQUIRE(res.witness.size() == 2);
    Eigen::MatrixXd M(2, 2);
    M.col(0) = res.witness[0];
    M.col(1) = res.witness[1];
    CHECK(std::abs(M.determinant()) <= 1e-9);

    // wide axis cones overlap at 45 degrees and are caught
    Cone wx(v2(1, 0), 0.5), wy(v2(0, 1), 0.5);
    CHECK_FALSE(cones_independent({wx, wy}, 10000).independent);

    CHECK(cones_independent({cx}, 100).independent);

    Cone cz(v2(std::sqrt(0.5), std::sqrt(0.5)), 0.99);
    CHECK_FALSE(cones_independent({cx, cy, cz}, 100).independent);  // k > n
}

TEST_CASE("fragment direction checks") {
    Fragment horiz;
    horiz.metric = FragmentMetric::euclidean;
    for (int i = 0; i <= 4; ++i) {
        horiz.domain.push_back(i * 0.25);
        horiz.points.push_back(v2(i * 0.25, 0.3));
    }
    Cone cx(v2(1, 0), 0.5);
    auto r1 = fragment_direction(horiz, phi_identity(), cx);
    CHECK(r1.pass);
    CHECK(r1.violation_fraction == 0.0);

    Fragment vert;
    vert.metric = FragmentMetric::euclidean;
    for (int i = 0; i <= 4; ++i) {
        vert.domain.push_back(i * 0.25);
        vert.points.push_back(v2(0.3, i * 0.25));
    }
    auto r2 = fragment_direction(vert, phi_identity(), cx);
    CHECK_FALSE(r2.pass);
    CHECK(r2.violation_fraction == 1.0);

    Fragment tiny;
    tiny.domain = {0.0, 1.0};
    tiny.points = {v2(0, 0), v2(1, 0)};
    CHECK_THROWS_AS(fragment_direction(tiny, phi_identity(), cx), TooFewPointsError);
}

TEST_CASE("heisenberg alpha curves sit in the x-axis cone under phi_xy") {
    auto frags = heisenberg_curve_family(HeisenbergCurveKind::alpha, {{0.3, -0.2}},
                                         {-0.5, -0.25, 0.0, 0.25, 0.5});
    Cone cx(v2(1, 0), 0.5);
    auto r = fragment_direction(frags[0], phi_xy(), cx);
    CHECK(r.pass);
    CHECK(r.violation_fraction == 0.0);
}

TEST_CASE("fubini representation is exact on every cell") {
    for (int n : {1, 2, 5}) {
        MetricGraph g = grid_square(n);
        CellPartition cells = grid_cell_partition(n);
        auto mu = [&](const Box& b) { return grid_cell_measure(g, b); };
        for (auto orient : {GridOrientation::rows, GridOrientation::cols}) {
            AlbertiRepresentation rep = fubini_representation(g, orient);
            CHECK(rep.fragments.size() == static_cast<std::size_t>(n + 1));
            double wsum = 0.0;
            for (double w : rep.weights) {
                CHECK(w == doctest::Approx(1.0 / (n + 1)));
                wsum += w;
            }
            CHECK(wsum == doctest::Approx(1.0));
            RepresentationReport rr = validate_representation(rep, mu, cells, 1e-12);
            CHECK(rr.pass);
            CHECK(rr.max_relative_residual <= 1e-12);
            CHECK(rr.direction_violation_fraction == 0.0);
        }
    }
    CHECK_THROWS_AS(fubini_representation(sierpinski_carpet(3, 1), GridOrientation::rows),
                    WrongGeneratorError);
}

TEST_CASE("perturbing a fubini weight is detected") {
    MetricGraph g = grid_square(4);
    CellPartition cells = grid_cell_partition(4);
    auto mu = [&](const Box& b) { return grid_cell_measure(g, b); };
    AlbertiRepresentation rep = fubini_representation(g, GridOrientation::rows);
    rep.weights[2] *= 1.1;
    RepresentationReport rr = validate_representation(rep, mu, cells, 1e-12);
    CHECK_FALSE(rr.pass);
    CHECK(rr.max_relative_residual >= 0.01);
}

TEST_CASE("validate_representation flags an empty partition as vacuous") {
    MetricGraph g = grid_square(2);
    AlbertiRepresentation rep = fubini_representation(g, GridOrientation::rows);
    RepresentationReport rr = validate_representation(
        rep, [](const Box&) { return 0.0; }, CellPartition{}, 1e-12);
    CHECK(rr.vacuous);
    CHECK(rr.pass);
}

TEST_CASE("heisenberg representation residual shrinks with the parameter grid") {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -0.25);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 0.25);
    CellPartition cells = box_partition(lo, hi, 4);
    auto volume = [](const Box& b) {
        double v = 1.0;
        for (Eigen::Index d = 0; d < b.lo.size(); ++d) v *= b.hi[d] - b.lo[d];
        return v;
    };
    double prev = -1.0;
    for (int pres : {6, 12}) {
        AlbertiRepresentation rep =
            heisenberg_representation(HeisenbergCurveKind::beta, pres, 16);
        RepresentationReport rr = validate_representation(rep, volume, cells, 1.0);
        double l1 = 0.0;
        for (double r : rr.cell_residuals) l1 += r;
        if (prev >= 0.0) CHECK(l1 <= 0.75 * prev);
        prev = l1;
        CHECK(rr.direction_violation_fraction == 0.0);
    }
}

TEST_CASE("curves_to_alberti represents the induced measure exactly") {
    MetricGraph g = grid_square(4);
    CurveFamily fam = axis_crossing_family(g, 0);
    ModulusCertificate cert = solve_modulus(g, fam, 2.0);

    Cone whole(v2(1, 0), -2.0);  // no directional restriction
    AlbertiRepresentation rep =
        curves_to_alberti(cert.dual_weights, g, fam, phi_identity(), "identity", whole);
    double wsum = 0.0;
    for (double w : rep.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0));

    CellPartition cells = grid_cell_partition(4);
    auto eta_mu = [&](const Box& b) { return eta_measure_in_box(cert.eta, g, b); };
    RepresentationReport rr = validate_representation(rep, eta_mu, cells, 1e-9);
    CHECK(rr.pass);
    CHECK(rr.max_relative_residual <= 1e-9);

    // nu mass is bounded by fragment length times the density ceiling
    for (std::size_t i = 0; i < rep.fragments.size(); ++i) {
        double len = rep.fragments[i].domain.back() - rep.fragments[i].domain.front();
        double max_density = 0.0;
        for (double d : rep.nu[i].segment_density) max_density = std::max(max_density, d);
        CHECK(rep.nu[i].total_mass(rep.fragments[i]) <= (1 + 1e-12) * len * max_density);
    }
}

TEST_CASE("curves_to_alberti drops pauses and keeps eta exact") {
    MetricGraph g = grid_square(2);
    CurveFamily fam;
    fam.curves.push_back(DiscreteCurve::create(g, {0, 3, 3, 6}));  // pause at the middle
    std::vector<double> weights = {1.0};
    Cone whole(v2(1, 0), -2.0);
    AlbertiRepresentation rep =
        curves_to_alberti(weights, g, fam, phi_identity(), "identity", whole);
    CHECK(rep.fragments.size() == 2);

    auto eta = eta_measure(weights, g, fam);
    CellPartition cells = grid_cell_partition(2);
    auto eta_mu = [&](const Box& b) { return eta_measure_in_box(eta, g, b); };
    RepresentationReport rr = validate_representation(rep, eta_mu, cells, 1e-12);
    CHECK(rr.pass);
}

TEST_CASE("curves_to_alberti rejects direction violations") {
    MetricGraph g = grid_square(2);
    CurveFamily fam;
    fam.curves.push_back(DiscreteCurve::create(g, {0, 1, 2}));  // vertical line x = 0
    Cone cx(v2(1, 0), 0.5);
    CHECK_THROWS_AS(curves_to_alberti({1.0}, g, fam, phi_identity(), "identity", cx),
                    DirectionViolationError);
}

TEST_CASE("single curve representation has arc-length nu") {
    MetricGraph g = grid_square(2);
    CurveFamily fam;
    fam.curves.push_back(DiscreteCurve::create(g, {0, 3, 6}));
    Cone whole(v2(1, 0), -2.0);
    AlbertiRepresentation rep =
        curves_to_alberti({1.0}, g, fam, phi_identity(), "identity", whole);
    REQUIRE(rep.fragments.size() == 1);
    CHECK(rep.weights[0] == doctest::Approx(1.0));
    // with a single fragment the length-biased density is identically 1
    for (double d : rep.nu[0].segment_density) CHECK(d == doctest::Approx(1.0));
    CHECK(rep.nu[0].total_mass(rep.fragments[0]) == doctest::Approx(1.0));
}
