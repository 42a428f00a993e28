#pragma once

#include <Eigen/Dense>
#include <vector>

#include "modspace/point_cloud.hpp"

namespace modspace {

/// A_{a,lambda} = lambda^-1 (A - a); the basepoint moves to the origin.
PointCloud rescale(const PointCloud& A, const Eigen::VectorXd& base, double lambda);

struct LineTestResult {
    bool pass = false;
    double fraction = 0.0;  // passing fraction of tested (point, offset) pairs
};

/// For every y in Y within B(0,R) and offset t in t_grid with y + t v still in
/// B(0,R), checks dist(y + t v, Y) <= eps. v is normalized internally.
LineTestResult lines_through_points(const PointCloud& Y, const Eigen::VectorXd& v, double R,
                                    double eps, const std::vector<double>& t_grid);

struct SplittingReport {
    std::vector<Eigen::VectorXd> directions;
    std::vector<Eigen::VectorXd> v_basis;  // orthonormal basis of span(directions)
    PointCloud z_cloud;                    // projection of Y to the orthogonal complement
    double product_error = 0.0;            // d_R(Y, resampled Z x V)
    double line_test_fraction = 0.0;       // min over directions
    double grid_step = 0.0;                // resampling step actually used
    bool pass = false;
};

/// Tests the product factorization Y = Z x V of the splitting lemma: builds an
/// orthonormal basis V of the given directions, projects Y to V-perp to get Z,
/// resamples Z x V on a grid of the given step (median nearest-neighbor
/// spacing when 0) inside the window, and reports d_R(Y, Z x V) together with
/// the per-direction line test. Throws DependentDirectionsError when the
/// directions are numerically dependent.
SplittingReport factor_product(const PointCloud& Y, const std::vector<Eigen::VectorXd>& dirs,
                               double R, double eps, double grid_step = 0.0);

struct TangentSequence {
    std::vector<PointCloud> clouds;  // rescalings clipped to B(0, 1.5 R)
    Eigen::MatrixXd d_matrix;        // pairwise d_R
    bool cauchy_tail = false;        // last three rescalings within cauchy_eps
};

/// Blowup sequence lambda^-1 (A - a) along a decreasing scale list, with the
/// pairwise d_R matrix as an empirical convergence monitor.
TangentSequence tangent_sequence(const PointCloud& A, const Eigen::VectorXd& base,
                                 const std::vector<double>& lambdas, double R,
                                 double cauchy_eps);

}  // namespace modspace
