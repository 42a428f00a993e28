#include "modspace/heisenberg.hpp"

#include <algorithm>
#include <cmath>

namespace modspace {

HeisenbergPoint h_mul(const HeisenbergPoint& p, const HeisenbergPoint& q) {
    return {p.x + q.x, p.y + q.y, p.z + q.z + 0.5 * (p.x * q.y - p.y * q.x)};
}

HeisenbergPoint h_inv(const HeisenbergPoint& p) { return {-p.x, -p.y, -p.z}; }

double koranyi_norm(const HeisenbergPoint& p) {
    double r2 = p.x * p.x + p.y * p.y;
    return std::pow(r2 * r2 + 16.0 * p.z * p.z, 0.25);
}

double h_dist(const HeisenbergPoint& p, const HeisenbergPoint& q) {
    return koranyi_norm(h_mul(h_inv(p), q));
}

HeisenbergPoint h_dilate(double t, const HeisenbergPoint& p) {
    if (!(t > 0.0)) throw InvalidInputError("h_dilate: t must be positive");
    return {t * p.x, t * p.y, t * t * p.z};
}

double HeisenbergLattice::total_measure() const {
    double total = 0.0;
    for (double w : weights) total += w;
    return total;
}

double HeisenbergLattice::ball_measure(const HeisenbergPoint& center, double r) const {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (h_dist(center, points[i]) < r) total += weights[i];
    return total;
}

HeisenbergLattice heisenberg_lattice(int n, double s) {
    if (n < 2) throw InvalidInputError("heisenberg_lattice: n must be >= 2");
    if (!(s > 0.0)) throw InvalidInputError("heisenberg_lattice: s must be positive");
    HeisenbergLattice lat;
    lat.n = n;
    lat.s = s;
    const double step = 2.0 * s / n;
    auto axis_weight = [&](int i) { return (i == 0 || i == n) ? step / 2.0 : step; };
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            for (int l = 0; l <= n; ++l) {
                lat.points.push_back({-s + i * step, -s + j * step, -s + l * step});
                lat.weights.push_back(axis_weight(i) * axis_weight(j) * axis_weight(l));
            }
        }
    }
    return lat;
}

Eigen::Vector3d heisenberg_curve_point(HeisenbergCurveKind kind, double a, double b, double t) {
    if (kind == HeisenbergCurveKind::alpha) return {t, a, b - 0.5 * a * t};
    return {a, t, b + 0.5 * a * t};
}

std::vector<Fragment> heisenberg_curve_family(HeisenbergCurveKind kind,
                                              const std::vector<std::array<double, 2>>& p_grid,
                                              const std::vector<double>& t_grid) {
    if (p_grid.empty() || t_grid.size() < 2)
        throw InvalidInputError("heisenberg_curve_family: grids too small");
    std::vector<double> ts = t_grid;
    std::sort(ts.begin(), ts.end());

    std::vector<Fragment> out;
    out.reserve(p_grid.size());
    for (const auto& [a, b] : p_grid) {
        Fragment f;
        f.metric = FragmentMetric::koranyi;
        f.domain = ts;
        f.points.reserve(ts.size());
        for (double t : ts) f.points.push_back(heisenberg_curve_point(kind, a, b, t));
        f.bi_lipschitz = f.tight_bi_lipschitz();
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace modspace
