#include <cmath>

#include "doctest.h"
#include "modspace/json_io.hpp"
#include "modspace/scenarios.hpp"

using namespace modspace;

TEST_CASE("space JSON round-trips byte-identically") {
    for (int n : {1, 3}) {
        MetricGraph g = grid_square(n);
        json j1 = space_to_json(g);
        MetricGraph g2 = space_from_json(j1);
        json j2 = space_to_json(g2);
        CHECK(j1.dump() == j2.dump());
        CHECK(space_hash(j1) == space_hash(j2));
    }

    SlitCarpet sc = slit_carpet_level(1, 1);
    json j = space_to_json(sc.graph, &sc.spec);
    SlitSpec spec = slits_from_json(j);
    CHECK(spec.slits.size() == sc.spec.slits.size());
    CHECK(spec.slits[0].x == sc.spec.slits[0].x);
    MetricGraph g2 = space_from_json(j);
    CHECK(g2.vertex_count() == sc.graph.vertex_count());
    CHECK(g2.generator().name == "slit");
}

TEST_CASE("family JSON round-trip and hash guard") {
    MetricGraph g = grid_square(3);
    json jspace = space_to_json(g);
    CurveFamily fam = axis_crossing_family(g, 1);
    json jfam = family_to_json(fam, space_hash(jspace));

    CurveFamily fam2 = family_from_json(jfam, g, space_hash(jspace));
    REQUIRE(fam2.curves.size() == fam.curves.size());
    for (std::size_t i = 0; i < fam.curves.size(); ++i)
        CHECK(fam2.curves[i].vertex_ids() == fam.curves[i].vertex_ids());
    CHECK(family_to_json(fam2, space_hash(jspace)).dump() == jfam.dump());

    CHECK_THROWS_AS(family_from_json(jfam, g, "deadbeef"), InvalidInputError);
}

TEST_CASE("certificate JSON round-trip including p = 1") {
    MetricGraph g = grid_square(2);
    CurveFamily fam = axis_crossing_family(g, 0);
    for (double p : {1.0, 2.0}) {
        ModulusCertificate cert = solve_modulus(g, fam, p);
        json j1 = certificate_to_json(cert);
        ModulusCertificate back = certificate_from_json(j1);
        CHECK(certificate_to_json(back).dump() == j1.dump());
        CHECK(back.value == cert.value);
        CHECK(std::isinf(back.q) == (p == 1.0));
    }
}

TEST_CASE("cloud JSON round-trip") {
    PointCloud cloud = slit_carpet_cloud(1, 1);
    json j1 = cloud_to_json(cloud);
    PointCloud back = cloud_from_json(j1);
    CHECK(cloud_to_json(back).dump() == j1.dump());
    CHECK(back.points.size() == cloud.points.size());
}

TEST_CASE("svg and csv emitters produce well-formed output") {
    std::vector<ChartSeries> series = {{"mod2", {{1, 0.51}, {2, 0.52}, {3, 0.55}}}};
    std::string svg = svg_line_chart("title", "k", "Mod2", series);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    std::string csv = series_to_csv(series);
    CHECK(csv.find("x,mod2\n") == 0);
    CHECK(csv.find("3,0.55") != std::string::npos);
}

TEST_CASE("representation JSON carries the schema fields") {
    MetricGraph g = grid_square(2);
    AlbertiRepresentation rep = fubini_representation(g, GridOrientation::rows);
    json j = representation_to_json(rep);
    CHECK(j.contains("P"));
    CHECK(j.at("nu") == "arclength");
    CHECK(j.at("direction").at("phi") == "identity");
    CHECK(j.at("P").size() == rep.fragments.size());
    double wsum = 0.0;
    for (const auto& jf : j.at("P")) wsum += jf.at("w").get<double>();
    CHECK(wsum == doctest::Approx(1.0));
}
