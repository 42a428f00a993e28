#include "modspace/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace modspace {

json space_to_json(const MetricGraph& g, const SlitSpec* slits) {
    json j;
    j["vertices"] = json::array();
    for (const auto& v : g.vertices()) {
        json jv;
        jv["id"] = v.id;
        if (v.coords.size() > 0) {
            json xy = json::array();
            for (Eigen::Index d = 0; d < v.coords.size(); ++d) xy.push_back(v.coords[d]);
            jv["xy"] = xy;
        }
        j["vertices"].push_back(jv);
    }
    j["edges"] = json::array();
    for (const auto& e : g.edges())
        j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"len", e.length}, {"mu", e.mu}});

    json meta;
    meta["generator"] = g.generator().name;
    meta["params"] = json::object();
    for (const auto& [k, v] : g.generator().params) meta["params"][k] = v;
    if (slits) {
        json js = json::array();
        for (const auto& s : slits->slits) js.push_back({s.x, s.y_lo, s.y_hi, s.generation});
        meta["slits"] = js;
        meta["slit_level"] = slits->level;
    }
    j["metadata"] = meta;
    return j;
}

MetricGraph space_from_json(const json& j) {
    std::vector<VertexSpec> vertices;
    for (const auto& jv : j.at("vertices")) {
        VertexSpec v;
        v.id = jv.at("id").get<int>();
        if (jv.contains("xy")) {
            const auto& xy = jv.at("xy");
            v.coords.resize(static_cast<Eigen::Index>(xy.size()));
            for (std::size_t d = 0; d < xy.size(); ++d)
                v.coords[static_cast<Eigen::Index>(d)] = xy[d].get<double>();
        }
        vertices.push_back(std::move(v));
    }
    std::vector<EdgeSpec> edges;
    for (const auto& je : j.at("edges"))
        edges.push_back({je.at("u").get<int>(), je.at("v").get<int>(), je.at("len").get<double>(),
                         je.at("mu").get<double>()});
    GeneratorInfo info;
    if (j.contains("metadata")) {
        const auto& meta = j.at("metadata");
        info.name = meta.value("generator", "");
        if (meta.contains("params"))
            for (const auto& [k, v] : meta.at("params").items()) info.params[k] = v.get<double>();
    }
    return MetricGraph(std::move(vertices), std::move(edges), std::move(info));
}

SlitSpec slits_from_json(const json& j) {
    SlitSpec spec;
    const auto& meta = j.at("metadata");
    spec.level = meta.value("slit_level", 0);
    for (const auto& js : meta.at("slits"))
        spec.slits.push_back(
            {js[0].get<double>(), js[1].get<double>(), js[2].get<double>(), js[3].get<int>()});
    return spec;
}

std::string space_hash(const json& space_json) {
    json core;
    core["vertices"] = space_json.at("vertices");
    core["edges"] = space_json.at("edges");
    std::string s = core.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

json family_to_json(const CurveFamily& family, const std::string& hash) {
    json j;
    j["space"] = hash;
    j["tag"] = family.tag;
    j["curves"] = json::array();
    for (const auto& c : family.curves) j["curves"].push_back(c.vertex_ids());
    return j;
}

CurveFamily family_from_json(const json& j, const MetricGraph& g,
                             const std::string& expected_hash) {
    if (!expected_hash.empty() && j.at("space").get<std::string>() != expected_hash)
        throw InvalidInputError("family_from_json: family was built for a different space");
    CurveFamily family;
    family.tag = j.value("tag", "");
    for (const auto& jc : j.at("curves"))
        family.curves.push_back(DiscreteCurve::create(g, jc.get<std::vector<int>>()));
    return family;
}

json certificate_to_json(const ModulusCertificate& cert) {
    json j;
    j["p"] = cert.p;
    if (std::isfinite(cert.q))
        j["q"] = cert.q;
    else
        j["q"] = "inf";
    j["value"] = cert.value;
    j["rhoStar"] = cert.rho_star.values;
    j["dualP"] = cert.dual_weights;
    j["etaP"] = cert.eta;
    j["f"] = cert.f;
    j["curveIntegrals"] = cert.curve_integrals;
    // |int rho* ds - 1| per curve carrying dual mass
    json beurling = json::array();
    for (std::size_t ci = 0; ci < cert.dual_weights.size(); ++ci)
        beurling.push_back(cert.dual_weights[ci] > 0.0
                               ? std::abs(cert.curve_integrals[ci] - 1.0)
                               : 0.0);
    j["beurlingResiduals"] = beurling;
    j["primalDualGap"] = cert.primal_dual_gap;
    j["cappedEdges"] = cert.capped_edges;
    j["iterations"] = cert.iterations;
    j["converged"] = cert.converged;
    return j;
}

ModulusCertificate certificate_from_json(const json& j) {
    ModulusCertificate cert;
    cert.p = j.at("p").get<double>();
    cert.q = j.at("q").is_string() ? std::numeric_limits<double>::infinity()
                                   : j.at("q").get<double>();
    cert.value = j.at("value").get<double>();
    cert.rho_star.values = j.at("rhoStar").get<std::vector<double>>();
    cert.dual_weights = j.at("dualP").get<std::vector<double>>();
    cert.eta = j.at("etaP").get<std::vector<double>>();
    cert.f = j.at("f").get<std::vector<double>>();
    cert.curve_integrals = j.at("curveIntegrals").get<std::vector<double>>();
    cert.primal_dual_gap = j.at("primalDualGap").get<double>();
    cert.capped_edges = j.at("cappedEdges").get<std::vector<int>>();
    cert.iterations = j.at("iterations").get<int>();
    cert.converged = j.at("converged").get<bool>();
    return cert;
}

json representation_to_json(const AlbertiRepresentation& rep) {
    json j;
    j["P"] = json::array();
    for (std::size_t i = 0; i < rep.fragments.size(); ++i) {
        json jf;
        jf["w"] = rep.weights[i];
        json dom = json::array(), pts = json::array();
        for (double t : rep.fragments[i].domain) dom.push_back(t);
        for (const auto& p : rep.fragments[i].points) {
            json jp = json::array();
            for (Eigen::Index d = 0; d < p.size(); ++d) jp.push_back(p[d]);
            pts.push_back(jp);
        }
        jf["fragment"] = {{"domain", dom}, {"points", pts}};
        jf["nuDensity"] = rep.nu[i].segment_density;
        j["P"].push_back(jf);
    }
    j["nu"] = "arclength";
    if (rep.direction) {
        json cone;
        cone["t"] = rep.direction->cone.t;
        json w = json::array();
        for (Eigen::Index d = 0; d < rep.direction->cone.w.size(); ++d)
            w.push_back(rep.direction->cone.w[d]);
        cone["w"] = w;
        j["direction"] = {{"phi", rep.direction->phi_name}, {"cone", cone}};
    }
    return j;
}

json cloud_to_json(const PointCloud& cloud) {
    json j;
    j["points"] = json::array();
    for (const auto& p : cloud.points) {
        json jp = json::array();
        for (Eigen::Index d = 0; d < p.size(); ++d) jp.push_back(p[d]);
        j["points"].push_back(jp);
    }
    json base = json::array();
    for (Eigen::Index d = 0; d < cloud.basepoint.size(); ++d) base.push_back(cloud.basepoint[d]);
    j["basepoint"] = base;
    return j;
}

PointCloud cloud_from_json(const json& j) {
    auto parse_vec = [](const json& arr) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
        for (std::size_t d = 0; d < arr.size(); ++d)
            v[static_cast<Eigen::Index>(d)] = arr[d].get<double>();
        return v;
    };
    std::vector<Eigen::VectorXd> pts;
    for (const auto& jp : j.at("points")) pts.push_back(parse_vec(jp));
    return PointCloud::from_points(std::move(pts), parse_vec(j.at("basepoint")));
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write " + path);
    out << j.dump(2) << "\n";
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidInputError("cannot write " + path);
    out << text;
}

}  // namespace modspace
