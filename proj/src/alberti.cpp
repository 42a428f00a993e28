#include "modspace/alberti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "modspace/heisenberg.hpp"

namespace modspace {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Cone::Cone(Eigen::VectorXd w_, double t_) : w(std::move(w_)), t(t_) {
    double n = w.norm();
    if (!(n > 0.0)) throw InvalidInputError("Cone: direction must be nonzero");
    if (std::abs(n - 1.0) > 1e-12) w /= n;
}

bool cone_contains(const Cone& c, const Eigen::VectorXd& v, double tol) {
    if (v.size() != c.w.size()) throw DimensionMismatchError("cone_contains: dimension mismatch");
    double n = v.norm();
    if (!(n > 0.0)) return false;
    return v.dot(c.w) >= c.t * n - tol * n;
}

IndependenceResult cones_independent(const std::vector<Cone>& cones, int sample_count,
                                     std::uint64_t seed) {
    IndependenceResult res;
    const int k = static_cast<int>(cones.size());
    if (k == 0) {
        res.independent = true;
        return res;
    }
    const int n = static_cast<int>(cones.front().w.size());
    for (const auto& c : cones)
        if (static_cast<int>(c.w.size()) != n)
            throw DimensionMismatchError("cones_independent: mixed dimensions");
    if (k > n) {
        // more cones than dimensions can never be independent
        res.independent = false;
        return res;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_unit = [&]() {
        Eigen::VectorXd v(n);
        for (;;) {
            for (int i = 0; i < n; ++i) v[i] = gauss(rng);
            double nn = v.norm();
            if (nn > 1e-12) return Eigen::VectorXd(v / nn);
        }
    };
    // Sample a unit vector of the cone: interior by rejection, boundary by
    // rotating an orthogonal direction to polar angle acos(t).
    auto sample_cone = [&](const Cone& c, bool boundary) -> Eigen::VectorXd {
        if (c.t <= -1.0) return random_unit();
        if (boundary && std::abs(c.t) <= 1.0) {
            Eigen::VectorXd u = random_unit();
            Eigen::VectorXd perp = u - u.dot(c.w) * c.w;
            double pn = perp.norm();
            if (pn > 1e-12) {
                perp /= pn;
                return c.t * c.w + std::sqrt(std::max(0.0, 1.0 - c.t * c.t)) * perp;
            }
        }
        for (int tries = 0; tries < 10000; ++tries) {
            Eigen::VectorXd v = random_unit();
            if (v.dot(c.w) >= c.t) return v;
        }
        return c.w;  // narrow cone: the axis always qualifies (t <= 1)
    };

    auto dependent = [&](const std::vector<Eigen::VectorXd>& sel) {
        Eigen::MatrixXd M(n, k);
        for (int i = 0; i < k; ++i) M.col(i) = sel[static_cast<std::size_t>(i)];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        double smax = svd.singularValues()[0];
        double smin = svd.singularValues()[svd.singularValues().size() - 1];
        return smin <= 1e-10 * std::max(1.0, smax);
    };

    // Pairwise shared-direction probes: a vector lying in two cones at once is
    // an immediate witness (use it twice, pad with samples from the others).
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            for (int s = 0; s < std::max(64, sample_count / 8); ++s) {
                Eigen::VectorXd v = sample_cone(cones[static_cast<std::size_t>(i)], s % 2 == 0);
                if (!cone_contains(cones[static_cast<std::size_t>(j)], v)) continue;
                std::vector<Eigen::VectorXd> sel(static_cast<std::size_t>(k));
                sel[static_cast<std::size_t>(i)] = v;
                sel[static_cast<std::size_t>(j)] = 2.0 * v;
                for (int l = 0; l < k; ++l)
                    if (l != i && l != j)
                        sel[static_cast<std::size_t>(l)] =
                            sample_cone(cones[static_cast<std::size_t>(l)], false);
                res.independent = false;
                res.witness = std::move(sel);
                return res;
            }
        }
    }

    for (int s = 0; s < sample_count; ++s) {
        std::vector<Eigen::VectorXd> sel;
        sel.reserve(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            sel.push_back(sample_cone(cones[static_cast<std::size_t>(i)], s % 3 == 0));
        if (dependent(sel)) {
            res.independent = false;
            res.witness = std::move(sel);
            return res;
        }
    }
    res.independent = true;
    return res;
}

PhiMap phi_identity() {
    return [](const Eigen::VectorXd& x) { return x; };
}

PhiMap phi_xy() {
    return [](const Eigen::VectorXd& x) {
        if (x.size() < 2) throw DimensionMismatchError("phi_xy: needs at least 2 coordinates");
        return Eigen::VectorXd(x.head(2));
    };
}

DirectionCheck fragment_direction(const Fragment& f, const PhiMap& phi, const Cone& cone,
                                  double report_threshold) {
    if (f.size() < 3) throw TooFewPointsError("fragment_direction: fewer than 3 domain points");
    std::size_t interior = f.size() - 2;
    std::size_t violations = 0;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        Eigen::VectorXd back =
            (phi(f.points[i]) - phi(f.points[i - 1])) / (f.domain[i] - f.domain[i - 1]);
        Eigen::VectorXd fwd =
            (phi(f.points[i + 1]) - phi(f.points[i])) / (f.domain[i + 1] - f.domain[i]);
        Eigen::VectorXd deriv = 0.5 * (back + fwd);
        if (!cone_contains(cone, deriv)) ++violations;
    }
    DirectionCheck out;
    out.violation_fraction = static_cast<double>(violations) / static_cast<double>(interior);
    out.pass = out.violation_fraction <= report_threshold;
    return out;
}

bool Box::contains(const Eigen::VectorXd& p) const {
    for (Eigen::Index d = 0; d < lo.size(); ++d) {
        bool closed = !closed_hi.empty() && closed_hi[static_cast<std::size_t>(d)];
        if (p[d] < lo[d]) return false;
        if (closed ? p[d] > hi[d] : p[d] >= hi[d]) return false;
    }
    return true;
}

CellPartition box_partition(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int divisions) {
    if (divisions < 1) throw InvalidInputError("box_partition: divisions must be >= 1");
    const int dim = static_cast<int>(lo.size());
    CellPartition part;
    std::vector<int> idx(static_cast<std::size_t>(dim), 0);
    for (;;) {
        Box cell;
        cell.lo.resize(dim);
        cell.hi.resize(dim);
        cell.closed_hi.assign(static_cast<std::size_t>(dim), false);
        for (int d = 0; d < dim; ++d) {
            double step = (hi[d] - lo[d]) / divisions;
            int i = idx[static_cast<std::size_t>(d)];
            cell.lo[d] = lo[d] + i * step;
            cell.hi[d] = (i + 1 == divisions) ? hi[d] : lo[d] + (i + 1) * step;
            cell.closed_hi[static_cast<std::size_t>(d)] = (i + 1 == divisions);
        }
        part.cells.push_back(std::move(cell));
        int d = 0;
        while (d < dim && ++idx[static_cast<std::size_t>(d)] == divisions) {
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == dim) break;
    }
    return part;
}

double segment_fraction_in_box(const Eigen::VectorXd& p0, const Eigen::VectorXd& p1,
                               const Box& box) {
    double t_lo = 0.0, t_hi = 1.0;
    for (Eigen::Index d = 0; d < box.lo.size(); ++d) {
        double a = p0[d], delta = p1[d] - p0[d];
        bool closed = !box.closed_hi.empty() && box.closed_hi[static_cast<std::size_t>(d)];
        if (delta == 0.0) {
            // Constant coordinate: half-open membership decides the whole segment,
            // which keeps segments lying on a shared cell face in exactly one cell.
            if (a < box.lo[d]) return 0.0;
            if (closed ? a > box.hi[d] : a >= box.hi[d]) return 0.0;
            continue;
        }
        double t0 = (box.lo[d] - a) / delta;
        double t1 = (box.hi[d] - a) / delta;
        if (t0 > t1) std::swap(t0, t1);
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
        if (t_lo >= t_hi) return 0.0;
    }
    return t_hi - t_lo;
}

double NuMeasure::mass_in_box(const Fragment& f, const Box& box) const {
    if (segment_density.size() + 1 != f.size())
        throw InvalidInputError("NuMeasure: density count != segment count");
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        double dens = segment_density[i];
        if (dens == 0.0) continue;
        double frac = segment_fraction_in_box(f.points[i], f.points[i + 1], box);
        if (frac > 0.0) mass += dens * (f.domain[i + 1] - f.domain[i]) * frac;
    }
    return mass;
}

double NuMeasure::total_mass(const Fragment& f) const {
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        mass += segment_density[i] * (f.domain[i + 1] - f.domain[i]);
    return mass;
}

CellPartition grid_cell_partition(int n) {
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd hi = Eigen::VectorXd::Ones(2);
    return box_partition(lo, hi, n);
}

double grid_cell_measure(const MetricGraph& g, const Box& box) {
    double mass = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& es = g.edge(e);
        Eigen::VectorXd mid = 0.5 * (g.coords_of(es.u) + g.coords_of(es.v));
        if (box.contains(mid)) mass += es.mu;
    }
    return mass;
}

AlbertiRepresentation fubini_representation(const MetricGraph& g, GridOrientation orientation) {
    if (g.generator().name != "grid")
        throw WrongGeneratorError("fubini_representation: graph was not produced by grid_square");
    const int n = static_cast<int>(g.generator().params.at("n"));
    const double h = 1.0 / n;
    CellPartition cells = grid_cell_partition(n);

    // cell masses under the midpoint rule, indexed cell = (i, j) -> i*n + j
    std::vector<double> cell_mass(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cell_mass[static_cast<std::size_t>(i * n + j)] =
                grid_cell_measure(g, cells.cells[static_cast<std::size_t>(j * n + i)]);
    // box_partition enumerates axis 0 fastest: cell (i,j) sits at index j*n+i

    const bool rows = orientation == GridOrientation::rows;
    AlbertiRepresentation rep;
    rep.weights.assign(static_cast<std::size_t>(n + 1), 1.0 / (n + 1));
    Eigen::VectorXd axis = Eigen::VectorXd::Zero(2);
    axis[rows ? 0 : 1] = 1.0;
    rep.direction = DirectionInfo{"identity", Cone(axis, std::sqrt(3.0) / 2.0)};

    for (int line = 0; line <= n; ++line) {
        Fragment f;
        f.metric = FragmentMetric::euclidean;
        f.domain.resize(static_cast<std::size_t>(n + 1));
        f.points.resize(static_cast<std::size_t>(n + 1));
        for (int i = 0; i <= n; ++i) {
            f.domain[static_cast<std::size_t>(i)] = i * h;
            Eigen::VectorXd pt(2);
            if (rows)
                pt << i * h, line * h;
            else
                pt << line * h, i * h;
            f.points[static_cast<std::size_t>(i)] = pt;
        }
        f.bi_lipschitz = 1.0;

        // Interior lines deliver their own strip; the two boundary lines of the
        // last strip split it evenly. "Strip" r is rows of cells (.,r) for rows
        // orientation, columns of cells (r,.) for cols.
        NuMeasure nu;
        nu.segment_density.resize(static_cast<std::size_t>(n));
        int strip = std::min(line, n - 1);
        double share = (line >= n - 1) ? 0.5 : 1.0;
        if (n == 1) share = 0.5;  // single strip, both lines feed it
        for (int i = 0; i < n; ++i) {
            double mass = rows ? cell_mass[static_cast<std::size_t>(i * n + strip)]
                               : cell_mass[static_cast<std::size_t>(strip * n + i)];
            nu.segment_density[static_cast<std::size_t>(i)] = (n + 1) * share * mass / h;
        }
        rep.fragments.push_back(std::move(f));
        rep.nu.push_back(std::move(nu));
    }
    return rep;
}

AlbertiRepresentation heisenberg_representation(HeisenbergCurveKind kind, int p_res, int t_res) {
    if (p_res < 1 || t_res < 2)
        throw InvalidInputError("heisenberg_representation: resolutions too small");
    std::vector<std::array<double, 2>> pgrid;
    for (int i = 0; i < p_res; ++i)
        for (int j = 0; j < p_res; ++j)
            pgrid.push_back({-0.5 + (i + 0.5) / p_res, -0.5 + (j + 0.5) / p_res});
    std::vector<double> tgrid;
    for (int i = 0; i <= t_res; ++i) tgrid.push_back(-0.5 + static_cast<double>(i) / t_res);

    AlbertiRepresentation rep;
    rep.fragments = heisenberg_curve_family(kind, pgrid, tgrid);
    rep.weights.assign(pgrid.size(), 1.0 / static_cast<double>(pgrid.size()));
    for (const auto& f : rep.fragments) {
        NuMeasure nu;
        nu.segment_density.assign(f.size() - 1, 1.0);
        rep.nu.push_back(std::move(nu));
    }
    Eigen::VectorXd axis = Eigen::VectorXd::Zero(2);
    axis[kind == HeisenbergCurveKind::alpha ? 0 : 1] = 1.0;
    rep.direction = DirectionInfo{"xy", Cone(axis, std::sqrt(3.0) / 2.0)};
    return rep;
}

AlbertiRepresentation curves_to_alberti(const std::vector<double>& weights, const MetricGraph& g,
                                        const CurveFamily& family, const PhiMap& phi,
                                        const std::string& phi_name, const Cone& cone,
                                        double violation_threshold) {
    if (weights.size() != family.curves.size())
        throw InvalidInputError("curves_to_alberti: weight count != curve count");

    double mean_length = 0.0;
    for (std::size_t ci = 0; ci < family.curves.size(); ++ci)
        mean_length += weights[ci] * family.curves[ci].length();
    if (!(mean_length > 0.0)) throw ZeroLengthError("curves_to_alberti: measure has no length");

    AlbertiRepresentation rep;
    rep.direction = DirectionInfo{phi_name, cone};
    std::size_t points_total = 0, violations_total = 0;
    for (std::size_t ci = 0; ci < family.curves.size(); ++ci) {
        if (weights[ci] <= 0.0) continue;
        auto frags = fragment_from_curve(g, family.curves[ci]);
        for (auto& f : frags) {
            double len = f.domain.back() - f.domain.front();
            if (f.size() >= 3 && g.has_coords()) {
                DirectionCheck dc = fragment_direction(f, phi, cone, 1.0);
                violations_total += static_cast<std::size_t>(
                    std::llround(dc.violation_fraction * static_cast<double>(f.size() - 2)));
                points_total += f.size() - 2;
            }
            NuMeasure nu;
            nu.segment_density.assign(f.size() - 1, mean_length / len);
            rep.weights.push_back(weights[ci] * len / mean_length);
            rep.fragments.push_back(std::move(f));
            rep.nu.push_back(std::move(nu));
        }
    }
    double fraction =
        points_total ? static_cast<double>(violations_total) / static_cast<double>(points_total)
                     : 0.0;
    if (fraction > violation_threshold)
        throw DirectionViolationError("curves_to_alberti: direction hypothesis violated on " +
                                      std::to_string(fraction) + " of interior points");
    return rep;
}

double eta_measure_in_box(const std::vector<double>& eta, const MetricGraph& g, const Box& box) {
    double mass = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        double m = eta[static_cast<std::size_t>(e)];
        if (m == 0.0) continue;
        const auto& es = g.edge(e);
        double frac = segment_fraction_in_box(g.coords_of(es.u), g.coords_of(es.v), box);
        if (frac > 0.0) mass += m * frac;
    }
    return mass;
}

RepresentationReport validate_representation(const AlbertiRepresentation& rep,
                                             const std::function<double(const Box&)>& mu_of_cell,
                                             const CellPartition& partition, double tol) {
    RepresentationReport report;
    if (partition.cells.empty()) {
        report.vacuous = true;
        report.pass = true;
        return report;
    }
    for (const auto& cell : partition.cells) {
        double mu = mu_of_cell(cell);
        double represented = 0.0;
        for (std::size_t i = 0; i < rep.fragments.size(); ++i)
            represented += rep.weights[i] * rep.nu[i].mass_in_box(rep.fragments[i], cell);
        double diff = std::abs(mu - represented);
        report.cell_residuals.push_back(diff);
        report.max_absolute_residual = std::max(report.max_absolute_residual, diff);
        if (mu > 0.0)
            report.max_relative_residual = std::max(report.max_relative_residual, diff / mu);
    }
    if (rep.direction) {
        double worst = 0.0;
        const PhiMap phi = rep.direction->phi_name == "xy" ? phi_xy() : phi_identity();
        for (const auto& f : rep.fragments) {
            if (f.size() < 3) continue;
            DirectionCheck dc = fragment_direction(f, phi, rep.direction->cone, 1.0);
            worst = std::max(worst, dc.violation_fraction);
        }
        report.direction_violation_fraction = worst;
    }
    report.pass = report.max_relative_residual <= tol;
    return report;
}

}  // namespace modspace
