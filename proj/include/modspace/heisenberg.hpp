#pragma once

#include <array>
#include <vector>

#include "modspace/curves.hpp"

namespace modspace {

/// Point of the first Heisenberg group: R^3 with the non-abelian product
/// (x1,y1,z1)*(x2,y2,z2) = (x1+x2, y1+y2, z1+z2 + (x1 y2 - y1 x2)/2).
struct HeisenbergPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

HeisenbergPoint h_mul(const HeisenbergPoint& p, const HeisenbergPoint& q);
HeisenbergPoint h_inv(const HeisenbergPoint& p);

/// Koranyi norm ((x^2+y^2)^2 + 16 z^2)^(1/4).
double koranyi_norm(const HeisenbergPoint& p);

/// Left-invariant Koranyi distance d(p,q) = |p^-1 q|.
double h_dist(const HeisenbergPoint& p, const HeisenbergPoint& q);

/// Anisotropic dilation (tx, ty, t^2 z); a group homomorphism with
/// d(delta_t p, delta_t q) = t d(p, q).
HeisenbergPoint h_dilate(double t, const HeisenbergPoint& p);

/// Regular (n+1)^3 lattice on [-s,s]^3 carrying Lebesgue measure: trapezoidal
/// point weights (interior cell 2s/n per axis, halved on box faces) so the
/// total is exactly (2s)^3.
struct HeisenbergLattice {
    std::vector<HeisenbergPoint> points;
    std::vector<double> weights;
    int n = 0;
    double s = 0.0;

    double total_measure() const;
    /// Weight of the open Koranyi ball B(center, r).
    double ball_measure(const HeisenbergPoint& center, double r) const;
};

HeisenbergLattice heisenberg_lattice(int n, double s);

enum class HeisenbergCurveKind { alpha, beta };

/// The left translates of the coordinate axes through p = (a,b):
///   alpha_p(t) = (t, a, b - a t / 2),  beta_p(t) = (a, t, b + a t / 2),
/// unit-speed geodesics for the Koranyi metric. One fragment per parameter p,
/// sampled on t_grid, carrying the Koranyi metric.
std::vector<Fragment> heisenberg_curve_family(HeisenbergCurveKind kind,
                                              const std::vector<std::array<double, 2>>& p_grid,
                                              const std::vector<double>& t_grid);

/// Point on the alpha (or beta) curve through p at parameter t.
Eigen::Vector3d heisenberg_curve_point(HeisenbergCurveKind kind, double a, double b, double t);

}  // namespace modspace
