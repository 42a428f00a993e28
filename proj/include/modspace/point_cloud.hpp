#pragma once

#include <Eigen/Dense>
#include <vector>

#include "modspace/errors.hpp"

namespace modspace {

/// Finite subset of R^n with a basepoint. Distance computations that window on
/// B(0,R) assume the cloud has already been translated so the basepoint is 0.
struct PointCloud {
    std::vector<Eigen::VectorXd> points;
    Eigen::VectorXd basepoint;

    int ambient_dim() const { return static_cast<int>(basepoint.size()); }
    static PointCloud from_points(std::vector<Eigen::VectorXd> pts, Eigen::VectorXd base);
};

/// Uniform bucket index over a point set for nearest-distance queries.
/// Falls back to a linear scan in dimensions above 3.
class NeighborGrid {
public:
    explicit NeighborGrid(const std::vector<Eigen::VectorXd>& points);
    /// Euclidean distance from q to the nearest indexed point (inf if empty).
    double distance_to(const Eigen::VectorXd& q) const;

private:
    const std::vector<Eigen::VectorXd>& points_;
    int dim_ = 0;
    double cell_ = 1.0;
    Eigen::VectorXd lo_;
    std::vector<int> grid_dims_;
    std::vector<std::vector<int>> buckets_;
    bool use_grid_ = false;

    int bucket_of(const std::vector<int>& cell_coords) const;
};

/// Pointed Hausdorff distance at window radius R about the origin:
///   d_R(A,B) = max( sup_{a in A, |a|<R} dist(a,B), sup_{b in B, |b|<R} dist(b,A) ).
/// Points at distance exactly R are excluded (open window). Returns 0 when
/// neither cloud meets the window.
double pointed_hausdorff_distance(const PointCloud& A, const PointCloud& B, double R);

/// Function samples attached to a cloud, one value vector per point.
struct SampledFunction {
    std::vector<Eigen::VectorXd> values;
};

/// The appendix distance between pairs (A,f), (B,g):
///   D = min(1/2, inf{ eps : d_{1/eps}(A,B) < eps and |f-g| < eps on (A u B) n B(0,1/eps) })
/// computed by bisection on eps (the defining condition is monotone in eps).
/// f is extended to B's points by the value at the nearest point of A, and
/// symmetrically for g. Accuracy eps_min (default 1e-9).
double dee_distance(const PointCloud& A, const SampledFunction& f, const PointCloud& B,
                    const SampledFunction& g, double eps_min = 1e-9);

}  // namespace modspace
