#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "modspace/curves.hpp"
#include "modspace/heisenberg.hpp"
#include "modspace/metric_graph.hpp"

namespace modspace {

/// Cone(w,t) = { v != 0 : v.w >= t|v| } for a unit vector w. For t <= -1 this
/// is all of R^n minus the origin.
struct Cone {
    Eigen::VectorXd w;
    double t = 0.0;

    Cone() = default;
    Cone(Eigen::VectorXd w_, double t_);
};

/// Membership test with a small relative slack for boundary directions.
bool cone_contains(const Cone& c, const Eigen::VectorXd& v, double tol = 1e-12);

struct IndependenceResult {
    bool independent = false;
    std::vector<Eigen::VectorXd> witness;  // a dependent selection when refuted
};

/// Randomized refutation test for cone independence: samples selections from
/// cone interiors and boundaries (plus pairwise shared-direction probes) and
/// reports a dependent witness when one is found. A "true" answer is a
/// necessary-condition pass, not a proof.
IndependenceResult cones_independent(const std::vector<Cone>& cones, int sample_count,
                                     std::uint64_t seed = 7);

using PhiMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

PhiMap phi_identity();
/// (x,y,z) -> (x,y), the canonical Lipschitz chart used for Heisenberg checks.
PhiMap phi_xy();

struct DirectionCheck {
    bool pass = false;
    double violation_fraction = 0.0;
};

/// Finite-difference direction test: at every interior domain point, the
/// average one-sided quotient of phi over the fragment must lie in the cone.
/// Returns the fraction of interior points violating that.
DirectionCheck fragment_direction(const Fragment& f, const PhiMap& phi, const Cone& cone,
                                  double report_threshold = 0.0);

/// Axis-aligned cell, half-open by default; closed_hi marks axes whose upper
/// face is included (used on the boundary of a partitioned domain).
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    std::vector<bool> closed_hi;

    bool contains(const Eigen::VectorXd& p) const;
};

struct CellPartition {
    std::vector<Box> cells;
};

/// Regular divisions^dim partition of [lo, hi] with closed upper faces on the
/// boundary cells, so the cells tile the closed box exactly.
CellPartition box_partition(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int divisions);

/// Fraction of the segment p0->p1 (affine in its parameter) lying inside the box.
double segment_fraction_in_box(const Eigen::VectorXd& p0, const Eigen::VectorXd& p1,
                               const Box& box);

/// Measure on a fragment, absolutely continuous with respect to arc length:
/// piecewise-constant density per domain segment.
struct NuMeasure {
    std::vector<double> segment_density;  // size = fragment.size() - 1

    /// nu(box): density-weighted parameter length of the fragment polyline
    /// inside the box (exact for affine segments).
    double mass_in_box(const Fragment& f, const Box& box) const;
    double total_mass(const Fragment& f) const;
};

struct DirectionInfo {
    std::string phi_name;  // "identity" or "xy"
    Cone cone;
};

/// Alberti representation as finite data: probability weights over fragments
/// and one arc-length-absolutely-continuous measure per fragment.
struct AlbertiRepresentation {
    std::vector<Fragment> fragments;
    std::vector<double> weights;  // sums to 1
    std::vector<NuMeasure> nu;
    std::optional<DirectionInfo> direction;
};

enum class GridOrientation { rows, cols };

/// The finite Fubini representation of a grid_square space: uniform weight on
/// the n+1 full-width lines, with per-segment densities chosen so each cell of
/// the canonical partition receives exactly its measure (cells are assigned
/// edge mass by the midpoint rule; interior lines feed their own row, the two
/// boundary lines split the outermost row). Throws WrongGeneratorError unless
/// the graph was produced by grid_square.
AlbertiRepresentation fubini_representation(const MetricGraph& g, GridOrientation orientation);

/// The canonical n x n cell partition used by fubini_representation.
CellPartition grid_cell_partition(int n);

/// Edge mass of a cell under the midpoint rule (each edge belongs to the cell
/// containing its midpoint).
double grid_cell_measure(const MetricGraph& g, const Box& box);

/// Representation of Lebesgue measure on the Heisenberg group by the alpha or
/// beta geodesic family: uniform weights over a p_res x p_res midpoint grid of
/// parameters in [-1/2,1/2]^2, unit density along each curve (Koranyi arc
/// length equals the curve parameter), sampled at t_res+1 points of [-1/2,1/2].
AlbertiRepresentation heisenberg_representation(HeisenbergCurveKind kind, int p_res, int t_res);

/// Pushes a probability measure on curves through fragment_from_curve to an
/// Alberti representation of the induced measure eta_P. Fragment weights are
/// length-biased and densities compensate, so the representation reproduces
/// eta_P exactly. Verifies the direction hypothesis ((phi o gamma)' in C or
/// zero speed) and throws DirectionViolationError past violation_threshold.
AlbertiRepresentation curves_to_alberti(const std::vector<double>& weights, const MetricGraph& g,
                                        const CurveFamily& family, const PhiMap& phi,
                                        const std::string& phi_name, const Cone& cone,
                                        double violation_threshold = 0.0);

/// eta mass inside a box: per-edge eta spread uniformly along the edge segment.
double eta_measure_in_box(const std::vector<double>& eta, const MetricGraph& g, const Box& box);

struct RepresentationReport {
    std::vector<double> cell_residuals;   // |mu(A) - sum_f w_f nu_f(A)|
    double max_relative_residual = 0.0;   // over cells with mu(A) > 0
    double max_absolute_residual = 0.0;
    bool vacuous = false;                 // empty partition
    double direction_violation_fraction = 0.0;
    bool pass = false;
};

RepresentationReport validate_representation(const AlbertiRepresentation& rep,
                                             const std::function<double(const Box&)>& mu_of_cell,
                                             const CellPartition& partition, double tol);

}  // namespace modspace
