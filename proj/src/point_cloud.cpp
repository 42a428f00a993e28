#include "modspace/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "modspace/parallel.hpp"

namespace modspace {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PointCloud PointCloud::from_points(std::vector<Eigen::VectorXd> pts, Eigen::VectorXd base) {
    PointCloud c;
    c.points = std::move(pts);
    c.basepoint = std::move(base);
    for (const auto& p : c.points)
        if (p.size() != c.basepoint.size())
            throw DimensionMismatchError("PointCloud: point dimension != basepoint dimension");
    return c;
}

NeighborGrid::NeighborGrid(const std::vector<Eigen::VectorXd>& points) : points_(points) {
    if (points_.empty()) return;
    dim_ = static_cast<int>(points_.front().size());
    use_grid_ = (dim_ >= 1 && dim_ <= 3 && points_.size() >= 64);
    if (!use_grid_) return;

    lo_ = points_.front();
    Eigen::VectorXd hi = points_.front();
    for (const auto& p : points_) {
        lo_ = lo_.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    double extent = (hi - lo_).maxCoeff();
    if (!(extent > 0.0)) {
        use_grid_ = false;
        return;
    }
    // Aim for O(1) points per bucket.
    double target = std::pow(static_cast<double>(points_.size()), 1.0 / dim_);
    cell_ = extent / std::max(1.0, target);
    grid_dims_.resize(static_cast<std::size_t>(dim_));
    int total = 1;
    for (int d = 0; d < dim_; ++d) {
        int n = static_cast<int>(std::floor((hi[d] - lo_[d]) / cell_)) + 1;
        grid_dims_[static_cast<std::size_t>(d)] = n;
        total *= n;
        if (total > 4'000'000) {
            use_grid_ = false;
            return;
        }
    }
    buckets_.assign(static_cast<std::size_t>(total), {});
    std::vector<int> cc(static_cast<std::size_t>(dim_));
    for (std::size_t i = 0; i < points_.size(); ++i) {
        for (int d = 0; d < dim_; ++d)
            cc[static_cast<std::size_t>(d)] =
                static_cast<int>(std::floor((points_[i][d] - lo_[d]) / cell_));
        buckets_[static_cast<std::size_t>(bucket_of(cc))].push_back(static_cast<int>(i));
    }
}

int NeighborGrid::bucket_of(const std::vector<int>& cc) const {
    int idx = 0;
    for (int d = 0; d < dim_; ++d) idx = idx * grid_dims_[static_cast<std::size_t>(d)] + cc[static_cast<std::size_t>(d)];
    return idx;
}

double NeighborGrid::distance_to(const Eigen::VectorXd& q) const {
    if (points_.empty()) return kInf;
    if (!use_grid_) {
        double best = kInf;
        for (const auto& p : points_) best = std::min(best, (p - q).norm());
        return best;
    }
    std::vector<int> center(static_cast<std::size_t>(dim_));
    for (int d = 0; d < dim_; ++d)
        center[static_cast<std::size_t>(d)] =
            static_cast<int>(std::floor((q[d] - lo_[d]) / cell_));

    double best = kInf;
    std::vector<int> cc(static_cast<std::size_t>(dim_));
    // Expanding shells of buckets; once a candidate is found, one more ring
    // suffices because points in farther shells are at least ring*cell_ away.
    int max_ring = 0;
    for (int d = 0; d < dim_; ++d)
        max_ring = std::max(max_ring,
                            std::max(center[static_cast<std::size_t>(d)] + 1,
                                     grid_dims_[static_cast<std::size_t>(d)] -
                                         center[static_cast<std::size_t>(d)]));
    for (int ring = 0; ring <= max_ring; ++ring) {
        if (best < kInf && (ring - 1) * cell_ > best) break;
        // Enumerate cells with Chebyshev distance == ring from center.
        std::function<void(int)> rec = [&](int d) {
            if (d == dim_) {
                bool on_ring = false;
                for (int dd = 0; dd < dim_; ++dd) {
                    int c = cc[static_cast<std::size_t>(dd)];
                    if (c < 0 || c >= grid_dims_[static_cast<std::size_t>(dd)]) return;
                    if (std::abs(c - center[static_cast<std::size_t>(dd)]) == ring) on_ring = true;
                }
                if (!on_ring && ring > 0) return;
                for (int i : buckets_[static_cast<std::size_t>(bucket_of(cc))])
                    best = std::min(best, (points_[static_cast<std::size_t>(i)] - q).norm());
                return;
            }
            for (int c = center[static_cast<std::size_t>(d)] - ring;
                 c <= center[static_cast<std::size_t>(d)] + ring; ++c) {
                cc[static_cast<std::size_t>(d)] = c;
                rec(d + 1);
            }
        };
        rec(0);
    }
    return best;
}

double pointed_hausdorff_distance(const PointCloud& A, const PointCloud& B, double R) {
    if (A.ambient_dim() != B.ambient_dim())
        throw DimensionMismatchError("pointed_hausdorff_distance: ambient dimensions differ");
    if (!(R > 0.0)) throw InvalidInputError("pointed_hausdorff_distance: R must be positive");

    auto one_sided = [R](const PointCloud& from, const PointCloud& to) {
        NeighborGrid grid(to.points);
        std::vector<double> dists(from.points.size(), 0.0);
        parallel_for(from.points.size(), [&](std::size_t i) {
            const auto& p = from.points[i];
            if (p.norm() < R) dists[i] = grid.distance_to(p);
        });
        double sup = 0.0;
        for (double d : dists) sup = std::max(sup, d);
        return sup;  // 0 when nothing falls in the window
    };
    double ab = one_sided(A, B);
    double ba = one_sided(B, A);
    double d = std::max(ab, ba);
    return std::isfinite(d) ? d : kInf;
}

namespace {

// Value of f at q, extended by nearest point when q is not a sample of A.
Eigen::VectorXd nearest_value(const PointCloud& A, const SampledFunction& f,
                              const Eigen::VectorXd& q) {
    double best = kInf;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < A.points.size(); ++i) {
        double d = (A.points[i] - q).norm();
        if (d < best) {
            best = d;
            arg = i;
        }
    }
    return f.values[arg];
}

}  // namespace

double dee_distance(const PointCloud& A, const SampledFunction& f, const PointCloud& B,
                    const SampledFunction& g, double eps_min) {
    if (A.ambient_dim() != B.ambient_dim())
        throw DimensionMismatchError("dee_distance: ambient dimensions differ");
    if (f.values.size() != A.points.size() || g.values.size() != B.points.size())
        throw InvalidInputError("dee_distance: sampled function size mismatch");

    auto qualifies = [&](double eps) {
        double R = 1.0 / eps;
        if (pointed_hausdorff_distance(A, B, R) >= eps) return false;
        for (std::size_t i = 0; i < A.points.size(); ++i) {
            if (A.points[i].norm() >= R) continue;
            if ((f.values[i] - nearest_value(B, g, A.points[i])).norm() >= eps) return false;
        }
        for (std::size_t i = 0; i < B.points.size(); ++i) {
            if (B.points[i].norm() >= R) continue;
            if ((g.values[i] - nearest_value(A, f, B.points[i])).norm() >= eps) return false;
        }
        return true;
    };

    double hi = 0.5;
    if (!qualifies(hi)) return 0.5;
    double lo = eps_min;
    if (qualifies(lo)) return lo;
    while (hi - lo > eps_min) {
        double mid = 0.5 * (lo + hi);
        if (qualifies(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace modspace
