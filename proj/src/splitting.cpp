#include "modspace/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "modspace/parallel.hpp"

namespace modspace {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double median_nn_spacing(const std::vector<Eigen::VectorXd>& pts) {
    if (pts.size() < 2) return 1.0;
    std::size_t sample = std::min<std::size_t>(pts.size(), 256);
    std::size_t stride = std::max<std::size_t>(1, pts.size() / sample);
    std::vector<double> nn;
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        double best = kInf;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            best = std::min(best, (pts[i] - pts[j]).norm());
        }
        if (best < kInf) nn.push_back(best);
    }
    std::sort(nn.begin(), nn.end());
    return nn.empty() ? 1.0 : nn[nn.size() / 2];
}

}  // namespace

PointCloud rescale(const PointCloud& A, const Eigen::VectorXd& base, double lambda) {
    if (!(lambda > 0.0)) throw InvalidInputError("rescale: lambda must be positive");
    if (base.size() != A.basepoint.size())
        throw DimensionMismatchError("rescale: base dimension mismatch");
    PointCloud out;
    out.points.reserve(A.points.size());
    for (const auto& p : A.points) out.points.push_back((p - base) / lambda);
    out.basepoint = (A.basepoint - base) / lambda;
    return out;
}

LineTestResult lines_through_points(const PointCloud& Y, const Eigen::VectorXd& v, double R,
                                    double eps, const std::vector<double>& t_grid) {
    double vn = v.norm();
    if (!(vn > 0.0)) throw InvalidInputError("lines_through_points: zero direction");
    Eigen::VectorXd u = v / vn;

    NeighborGrid grid(Y.points);
    std::size_t tested = 0, passed = 0;
    for (const auto& y : Y.points) {
        if (y.norm() >= R) continue;
        for (double t : t_grid) {
            Eigen::VectorXd q = y + t * u;
            if (q.norm() >= R) continue;
            ++tested;
            if (grid.distance_to(q) <= eps) ++passed;
        }
    }
    LineTestResult res;
    res.fraction = tested ? static_cast<double>(passed) / static_cast<double>(tested) : 1.0;
    res.pass = tested == 0 || passed == tested;
    return res;
}

SplittingReport factor_product(const PointCloud& Y, const std::vector<Eigen::VectorXd>& dirs,
                               double R, double eps, double grid_step) {
    if (dirs.empty()) throw InvalidInputError("factor_product: no directions");
    const int n = Y.ambient_dim();

    SplittingReport report;
    report.directions = dirs;

    // Gram-Schmidt; directions must be independent.
    for (const auto& d : dirs) {
        if (static_cast<int>(d.size()) != n)
            throw DimensionMismatchError("factor_product: direction dimension mismatch");
        Eigen::VectorXd w = d;
        for (const auto& b : report.v_basis) w -= w.dot(b) * b;
        double wn = w.norm();
        if (wn <= 1e-10 * d.norm())
            throw DependentDirectionsError("factor_product: directions are linearly dependent");
        report.v_basis.push_back(w / wn);
    }

    if (grid_step <= 0.0) grid_step = median_nn_spacing(Y.points);
    report.grid_step = grid_step;

    // Z = proj_{V-perp}(Y), deduplicated at half the grid step.
    auto project = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd z = p;
        for (const auto& b : report.v_basis) z -= z.dot(b) * b;
        return z;
    };
    std::vector<Eigen::VectorXd> zs;
    for (const auto& p : Y.points) {
        if (p.norm() >= 1.5 * R) continue;
        Eigen::VectorXd z = project(p);
        bool dup = false;
        for (const auto& q : zs) {
            if ((q - z).norm() <= 0.5 * grid_step) {
                dup = true;
                break;
            }
        }
        if (!dup) zs.push_back(std::move(z));
    }
    report.z_cloud.points = zs;
    report.z_cloud.basepoint = project(Y.basepoint);

    // Resample Z x V inside the window.
    std::vector<Eigen::VectorXd> product;
    const int k = static_cast<int>(report.v_basis.size());
    std::vector<double> offsets;
    for (double t = -1.5 * R; t <= 1.5 * R + 1e-12; t += grid_step) offsets.push_back(t);
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    for (const auto& z : zs) {
        std::fill(idx.begin(), idx.end(), 0);
        for (;;) {
            Eigen::VectorXd p = z;
            for (int d = 0; d < k; ++d)
                p += offsets[idx[static_cast<std::size_t>(d)]] * report.v_basis[static_cast<std::size_t>(d)];
            if (p.norm() < 1.5 * R) product.push_back(p);
            int d = 0;
            while (d < k && ++idx[static_cast<std::size_t>(d)] == offsets.size()) {
                idx[static_cast<std::size_t>(d)] = 0;
                ++d;
            }
            if (d == k) break;
        }
    }

    PointCloud pc;
    pc.points = std::move(product);
    pc.basepoint = Eigen::VectorXd::Zero(n);
    PointCloud yw;
    yw.points = Y.points;
    yw.basepoint = Eigen::VectorXd::Zero(n);
    report.product_error = pointed_hausdorff_distance(yw, pc, R);

    report.line_test_fraction = 1.0;
    bool lines_pass = true;
    for (const auto& d : dirs) {
        LineTestResult lt = lines_through_points(Y, d, R, eps, offsets);
        report.line_test_fraction = std::min(report.line_test_fraction, lt.fraction);
        lines_pass = lines_pass && lt.pass;
    }
    report.pass = report.product_error <= eps && lines_pass;
    return report;
}

TangentSequence tangent_sequence(const PointCloud& A, const Eigen::VectorXd& base,
                                 const std::vector<double>& lambdas, double R,
                                 double cauchy_eps) {
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        if (!(lambdas[i] > lambdas[i + 1]))
            throw InvalidInputError("tangent_sequence: scales must be strictly decreasing");

    TangentSequence seq;
    for (double lam : lambdas) {
        PointCloud scaled = rescale(A, base, lam);
        PointCloud clipped;
        clipped.basepoint = scaled.basepoint;
        for (auto& p : scaled.points)
            if (p.norm() <= 1.5 * R) clipped.points.push_back(std::move(p));
        seq.clouds.push_back(std::move(clipped));
    }

    const auto m = static_cast<Eigen::Index>(seq.clouds.size());
    seq.d_matrix = Eigen::MatrixXd::Zero(m, m);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
    parallel_for(pairs.size(), [&](std::size_t k) {
        auto [i, j] = pairs[k];
        double d = pointed_hausdorff_distance(seq.clouds[static_cast<std::size_t>(i)],
                                              seq.clouds[static_cast<std::size_t>(j)], R);
        seq.d_matrix(i, j) = d;
        seq.d_matrix(j, i) = d;
    });

    if (m >= 3) {
        seq.cauchy_tail = true;
        for (Eigen::Index i = m - 3; i < m; ++i)
            for (Eigen::Index j = i + 1; j < m; ++j)
                if (seq.d_matrix(i, j) > cauchy_eps) seq.cauchy_tail = false;
    }
    return seq;
}

}  // namespace modspace
