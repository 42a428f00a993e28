#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modspace/heisenberg.hpp"
#include "modspace/json_io.hpp"
#include "modspace/scenarios.hpp"
#include "modspace/splitting.hpp"

namespace {

using namespace modspace;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

std::vector<Eigen::VectorXd> parse_directions(const std::string& spec) {
    // "0,1;1,0" -> {(0,1), (1,0)}
    std::vector<Eigen::VectorXd> dirs;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::vector<double> comps;
        std::stringstream cs(item);
        std::string c;
        while (std::getline(cs, c, ',')) comps.push_back(std::stod(c));
        Eigen::VectorXd v(static_cast<Eigen::Index>(comps.size()));
        for (std::size_t d = 0; d < comps.size(); ++d) v[static_cast<Eigen::Index>(d)] = comps[d];
        dirs.push_back(std::move(v));
    }
    return dirs;
}

std::vector<double> parse_scales(const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modspace: discrete p-modulus, Alberti representations, and tangent splitting"};
    app.require_subcommand(1);

    // ---- gen ----------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate an example space");
    gen->require_subcommand(1);
    std::string gen_out = "space.json";

    int grid_n = 8;
    auto* gen_grid = gen->add_subcommand("grid", "unit-square grid");
    gen_grid->add_option("--n", grid_n, "cells per side")->check(CLI::PositiveNumber);
    gen_grid->add_option("--out", gen_out, "output path");

    int carpet_p = 3, carpet_k = 1;
    auto* gen_carpet = gen->add_subcommand("carpet", "Sierpinski carpet prefractal");
    gen_carpet->add_option("--p", carpet_p, "subdivision (odd, >= 3)");
    gen_carpet->add_option("--k", carpet_k, "level");
    gen_carpet->add_option("--out", gen_out, "output path");

    int slit_k = 1, slit_m = 1;
    auto* gen_slit = gen->add_subcommand("slit", "slit-carpet prefractal");
    gen_slit->add_option("--k", slit_k, "slit generations 0..k");
    gen_slit->add_option("--m", slit_m, "mesh refinement");
    gen_slit->add_option("--out", gen_out, "output path");

    int heis_n = 10;
    double heis_s = 1.0;
    auto* gen_heis = gen->add_subcommand("heis", "Heisenberg lattice with Lebesgue weights");
    gen_heis->add_option("--n", heis_n, "lattice resolution");
    gen_heis->add_option("--s", heis_s, "box half-side");
    gen_heis->add_option("--out", gen_out, "output path");

    // ---- family -------------------------------------------------------------
    auto* fam = app.add_subcommand("family", "build a crossing curve family");
    std::string fam_space, fam_out = "family.json", fam_strategy = "monotone";
    int fam_axis = 1, fam_max = 1024;
    fam->add_option("--space", fam_space, "space JSON")->required();
    fam->add_option("--strategy", fam_strategy, "all_simple | shortest_k | monotone");
    fam->add_option("--axis", fam_axis, "crossing axis (0 = x, 1 = y)");
    fam->add_option("--max", fam_max, "maximum number of curves");
    fam->add_option("--out", fam_out, "output path");

    // ---- modulus ------------------------------------------------------------
    auto* mod = app.add_subcommand("modulus", "solve the p-modulus program");
    std::string mod_space, mod_family, mod_out = "cert.json";
    double mod_p = 2.0, mod_tol = 1e-6;
    mod->add_option("--space", mod_space, "space JSON")->required();
    mod->add_option("--family", mod_family, "family JSON")->required();
    mod->add_option("--p", mod_p, "exponent p >= 1");
    mod->add_option("--tol", mod_tol, "relative duality-gap tolerance");
    mod->add_option("--out", mod_out, "certificate output path");

    // ---- duality-check --------------------------------------------------------
    auto* dual = app.add_subcommand("duality-check", "verify a modulus certificate");
    std::string dc_space, dc_family, dc_cert, dc_out;
    double dc_tol = 1e-6;
    dual->add_option("--space", dc_space, "space JSON")->required();
    dual->add_option("--family", dc_family, "family JSON")->required();
    dual->add_option("cert", dc_cert, "certificate JSON")->required();
    dual->add_option("--tol", dc_tol, "tolerance");
    dual->add_option("--out", dc_out, "report output path");

    // ---- alberti --------------------------------------------------------------
    auto* alb = app.add_subcommand("alberti", "build and validate Alberti representations");
    std::string alb_mode = "fubini", alb_space, alb_family, alb_cert, alb_orient = "rows";
    std::string alb_out = "rep.json";
    alb->add_option("--mode", alb_mode, "fubini | from-dual");
    alb->add_option("--space", alb_space, "space JSON")->required();
    alb->add_option("--family", alb_family, "family JSON (from-dual)");
    alb->add_option("--cert", alb_cert, "certificate JSON (from-dual)");
    alb->add_option("--orientation", alb_orient, "rows | cols (fubini)");
    alb->add_option("--out", alb_out, "output path");

    // ---- heis -------------------------------------------------------------------
    auto* heis = app.add_subcommand("heis", "Heisenberg geodesic representation");
    std::string heis_kind = "alpha", heis_out = "rep.json";
    int heis_pres = 24, heis_tres = 32;
    heis->add_option("--kind", heis_kind, "alpha | beta");
    heis->add_option("--p-res", heis_pres, "parameter grid resolution");
    heis->add_option("--t-res", heis_tres, "curve sampling resolution");
    heis->add_option("--out", heis_out, "output path");

    // ---- blowup -----------------------------------------------------------------
    auto* blow = app.add_subcommand("blowup", "rescaling sequence of a space's vertex cloud");
    std::string blow_space, blow_scales = "0.5,0.25,0.125", blow_out = "seq.json";
    int blow_base = 0;
    double blow_R = 2.0, blow_eps = 0.05;
    blow->add_option("--space", blow_space, "space JSON")->required();
    blow->add_option("--base", blow_base, "basepoint vertex id");
    blow->add_option("--scales", blow_scales, "comma-separated decreasing scales");
    blow->add_option("--R", blow_R, "window radius");
    blow->add_option("--eps", blow_eps, "Cauchy-tail threshold");
    blow->add_option("--out", blow_out, "output path");

    // ---- split ---------------------------------------------------------------------
    auto* split = app.add_subcommand("split", "product-factorization test of a point cloud");
    std::string split_cloud, split_dirs = "0,1", split_out = "split.json";
    double split_R = 0.5, split_eps = 0.05, split_step = 0.0;
    split->add_option("--cloud", split_cloud, "cloud JSON")->required();
    split->add_option("--dirs", split_dirs, "directions, e.g. \"0,1;1,0\"");
    split->add_option("--R", split_R, "window radius");
    split->add_option("--eps", split_eps, "tolerance");
    split->add_option("--step", split_step, "resampling step (0 = auto)");
    split->add_option("--out", split_out, "output path");

    // ---- report ---------------------------------------------------------------------
    auto* rep = app.add_subcommand("report", "run a reproduction scenario");
    std::string rep_scenario, rep_config, rep_outdir = ".";
    rep->add_option("--scenario", rep_scenario, "scenario name (uses built-in defaults)");
    rep->add_option("--config", rep_config, "scenario config JSON (overrides --scenario)");
    rep->add_option("--out-dir", rep_outdir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (gen_grid->parsed()) {
                save_json_file(gen_out, space_to_json(grid_square(grid_n)));
            } else if (gen_carpet->parsed()) {
                save_json_file(gen_out, space_to_json(sierpinski_carpet(carpet_p, carpet_k)));
            } else if (gen_slit->parsed()) {
                SlitCarpet sc = slit_carpet_level(slit_k, slit_m);
                save_json_file(gen_out, space_to_json(sc.graph, &sc.spec));
            } else if (gen_heis->parsed()) {
                HeisenbergLattice lat = heisenberg_lattice(heis_n, heis_s);
                json j;
                j["points"] = json::array();
                for (const auto& p : lat.points) j["points"].push_back({p.x, p.y, p.z});
                j["weights"] = lat.weights;
                j["metadata"] = {{"generator", "heis"},
                                 {"params", {{"n", heis_n}, {"s", heis_s}}}};
                save_json_file(gen_out, j);
            }
            std::cout << "wrote " << gen_out << "\n";
            return kExitOk;
        }

        if (fam->parsed()) {
            json jspace = load_json_file(fam_space);
            MetricGraph g = space_from_json(jspace);
            CurveFamily family;
            if (fam_strategy == "monotone") {
                family = axis_crossing_family(g, fam_axis);
            } else {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (const auto& v : g.vertices()) {
                    lo = std::min(lo, v.coords[fam_axis]);
                    hi = std::max(hi, v.coords[fam_axis]);
                }
                CrossingStrategy strat = fam_strategy == "all_simple"
                                             ? CrossingStrategy::all_simple
                                             : CrossingStrategy::shortest_k;
                family = crossing_family(g, side_ids(g, fam_axis, lo), side_ids(g, fam_axis, hi),
                                         fam_max, strat);
            }
            family.tag = fam_strategy;
            save_json_file(fam_out, family_to_json(family, space_hash(jspace)));
            std::cout << "wrote " << fam_out << " (" << family.curves.size() << " curves)\n";
            return kExitOk;
        }

        if (mod->parsed()) {
            json jspace = load_json_file(mod_space);
            MetricGraph g = space_from_json(jspace);
            CurveFamily family = family_from_json(load_json_file(mod_family), g, space_hash(jspace));
            SolveOptions opts;
            opts.tol = mod_tol;
            ModulusCertificate cert = solve_modulus(g, family, mod_p, opts);
            save_json_file(mod_out, certificate_to_json(cert));
            std::cout << "Mod_" << mod_p << " = " << cert.value << " (gap "
                      << cert.primal_dual_gap << ")\n";
            return cert.converged ? kExitOk : kExitCheckFailed;
        }

        if (dual->parsed()) {
            json jspace = load_json_file(dc_space);
            MetricGraph g = space_from_json(jspace);
            CurveFamily family = family_from_json(load_json_file(dc_family), g, space_hash(jspace));
            ModulusCertificate cert = certificate_from_json(load_json_file(dc_cert));
            DualityReport report = verify_duality(g, family, cert, dc_tol);
            json j = {{"normIdentityResidual", report.norm_identity_residual},
                      {"pointwiseResidualMax", report.pointwise_residual_max},
                      {"pointwiseChecked", report.pointwise_checked},
                      {"pointwiseOffSupportMax", report.pointwise_off_support_max},
                      {"beurlingResidualMax", report.beurling_residual_max},
                      {"pass", report.pass}};
            if (!dc_out.empty()) save_json_file(dc_out, j);
            std::cout << j.dump(2) << "\n";
            return report.pass ? kExitOk : kExitCheckFailed;
        }

        if (alb->parsed()) {
            json jspace = load_json_file(alb_space);
            MetricGraph g = space_from_json(jspace);
            AlbertiRepresentation rep_out;
            RepresentationReport rr;
            if (alb_mode == "fubini") {
                rep_out = fubini_representation(
                    g, alb_orient == "cols" ? GridOrientation::cols : GridOrientation::rows);
                int n = static_cast<int>(g.generator().params.at("n"));
                CellPartition cells = grid_cell_partition(n);
                rr = validate_representation(
                    rep_out, [&](const Box& b) { return grid_cell_measure(g, b); }, cells, 1e-12);
            } else if (alb_mode == "from-dual") {
                CurveFamily family =
                    family_from_json(load_json_file(alb_family), g, space_hash(jspace));
                ModulusCertificate cert = certificate_from_json(load_json_file(alb_cert));
                Eigen::VectorXd w0 = Eigen::VectorXd::Zero(g.coord_dim());
                w0[0] = 1.0;
                rep_out = curves_to_alberti(cert.dual_weights, g, family, phi_identity(),
                                            "identity", Cone(w0, -2.0));
                CellPartition cells = grid_cell_partition(8);
                rr = validate_representation(
                    rep_out,
                    [&](const Box& b) { return eta_measure_in_box(cert.eta, g, b); }, cells,
                    1e-9);
            } else {
                std::cerr << "unknown --mode " << alb_mode << "\n";
                return kExitError;
            }
            json j = representation_to_json(rep_out);
            j["validation"] = {{"maxRelativeResidual", rr.max_relative_residual},
                               {"directionViolationFraction", rr.direction_violation_fraction},
                               {"pass", rr.pass}};
            save_json_file(alb_out, j);
            std::cout << "max relative residual " << rr.max_relative_residual << "\n";
            return rr.pass ? kExitOk : kExitCheckFailed;
        }

        if (heis->parsed()) {
            AlbertiRepresentation rep_out = heisenberg_representation(
                heis_kind == "beta" ? HeisenbergCurveKind::beta : HeisenbergCurveKind::alpha,
                heis_pres, heis_tres);
            Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -0.25);
            Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 0.25);
            CellPartition cells = box_partition(lo, hi, 8);
            auto volume = [](const Box& b) {
                double v = 1.0;
                for (Eigen::Index d = 0; d < b.lo.size(); ++d) v *= b.hi[d] - b.lo[d];
                return v;
            };
            RepresentationReport rr = validate_representation(rep_out, volume, cells, 1.0);
            json j = representation_to_json(rep_out);
            double l1 = 0.0, tot = 0.0;
            for (std::size_t i = 0; i < rr.cell_residuals.size(); ++i) {
                l1 += rr.cell_residuals[i];
                tot += volume(cells.cells[i]);
            }
            j["validation"] = {{"l1Residual", l1 / tot},
                               {"directionViolationFraction", rr.direction_violation_fraction}};
            save_json_file(heis_out, j);
            std::cout << "L1 representation residual " << l1 / tot << "\n";
            return kExitOk;
        }

        if (blow->parsed()) {
            MetricGraph g = space_from_json(load_json_file(blow_space));
            std::vector<Eigen::VectorXd> pts;
            for (const auto& v : g.vertices()) pts.push_back(v.coords);
            PointCloud cloud = PointCloud::from_points(std::move(pts), g.coords_of(blow_base));
            TangentSequence seq = tangent_sequence(cloud, cloud.basepoint,
                                                   parse_scales(blow_scales), blow_R, blow_eps);
            json j;
            j["clouds"] = json::array();
            for (const auto& c : seq.clouds) j["clouds"].push_back(cloud_to_json(c));
            json mat = json::array();
            for (Eigen::Index i = 0; i < seq.d_matrix.rows(); ++i) {
                json row = json::array();
                for (Eigen::Index jj = 0; jj < seq.d_matrix.cols(); ++jj)
                    row.push_back(seq.d_matrix(i, jj));
                mat.push_back(row);
            }
            j["dR"] = mat;
            j["cauchyTail"] = seq.cauchy_tail;
            save_json_file(blow_out, j);
            std::cout << "wrote " << blow_out << (seq.cauchy_tail ? " (Cauchy tail)" : "") << "\n";
            return kExitOk;
        }

        if (split->parsed()) {
            PointCloud cloud = cloud_from_json(load_json_file(split_cloud));
            PointCloud centered = rescale(cloud, cloud.basepoint, 1.0);
            SplittingReport report =
                factor_product(centered, parse_directions(split_dirs), split_R, split_eps,
                               split_step);
            json j = {{"productError", report.product_error},
                      {"lineTestFraction", report.line_test_fraction},
                      {"gridStep", report.grid_step},
                      {"zCloud", cloud_to_json(report.z_cloud)},
                      {"pass", report.pass}};
            save_json_file(split_out, j);
            std::cout << "product error " << report.product_error << "\n";
            return report.pass ? kExitOk : kExitCheckFailed;
        }

        if (rep->parsed()) {
            json config;
            if (!rep_config.empty()) {
                config = load_json_file(rep_config);
            } else if (!rep_scenario.empty()) {
                config = {{"scenario", rep_scenario}};
            } else {
                std::cerr << "report: need --scenario or --config\n";
                return kExitError;
            }
            ScenarioResult result = run_scenario(config);
            std::string base = rep_outdir + "/" + result.name;
            json j = {{"scenario", result.name},
                      {"pass", result.pass},
                      {"detail", result.detail},
                      {"data", result.data}};
            save_json_file(base + ".json", j);
            if (!result.series.empty()) {
                save_text_file(base + ".csv", series_to_csv(result.series));
                save_text_file(base + ".svg",
                               svg_line_chart(result.name, "parameter", "value", result.series));
            }
            std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << ": "
                      << result.detail << "\n";
            return result.pass ? kExitOk : kExitCheckFailed;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
