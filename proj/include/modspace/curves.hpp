#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "modspace/metric_graph.hpp"

namespace modspace {

/// A discrete curve: a vertex sequence where each consecutive pair is either
/// adjacent (an edge traversal) or equal (a zero-speed pause step). Curves must
/// move at least once; edges may repeat and traversals count with multiplicity.
class DiscreteCurve {
public:
    static DiscreteCurve create(const MetricGraph& g, std::vector<int> vertex_ids);

    const std::vector<int>& vertex_ids() const { return ids_; }
    /// Edge index per step; -1 marks a pause step.
    const std::vector<int>& step_edges() const { return step_edges_; }
    double length() const { return length_; }
    std::size_t step_count() const { return step_edges_.size(); }

private:
    std::vector<int> ids_;
    std::vector<int> step_edges_;
    double length_ = 0.0;
};

struct CurveFamily {
    std::vector<DiscreteCurve> curves;
    std::string tag;
};

double curve_length(const DiscreteCurve& curve);

/// How a fragment measures distances between its sample points.
enum class FragmentMetric { euclidean, koranyi, pairwise };

/// A sampled bi-Lipschitz fragment: finite increasing domain t_0 < ... < t_N
/// mapped to points, with L^-1 |t-t'| <= d(pt, pt') <= L |t-t'| on all pairs.
struct Fragment {
    std::vector<double> domain;
    std::vector<Eigen::VectorXd> points;
    FragmentMetric metric = FragmentMetric::euclidean;
    Eigen::MatrixXd pair_dist;  // used when metric == pairwise
    double bi_lipschitz = 1.0;

    std::size_t size() const { return domain.size(); }
    double distance(std::size_t i, std::size_t j) const;
    /// Tightest bi-Lipschitz constant over all domain pairs (exhaustive).
    double tight_bi_lipschitz() const;
};

/// Metric derivative at domain point i: average of the available one-sided
/// difference quotients d(p_i, p_j)/|t_i - t_j| over neighbors j = i-1, i+1.
double metric_derivative(const Fragment& f, std::size_t i);

enum class CrossingStrategy { all_simple, shortest_k, monotone };

/// Builds a family of source->sink curves.
///  - all_simple: DFS enumeration of simple paths, up to max_curves.
///  - shortest_k: the max_curves shortest simple paths (Yen's algorithm over a
///    virtual super-source/super-sink).
///  - monotone: one path per source vertex, shortest among paths whose steps
///    never decrease the crossing coordinate (the axis separating source from
///    sink); requires vertex coordinates.
CurveFamily crossing_family(const MetricGraph& g, const std::vector<int>& source,
                            const std::vector<int>& sink, int max_curves,
                            CrossingStrategy strategy);

/// Splits a curve into bi-Lipschitz fragments: pauses are dropped and each
/// maximal injective run of the remaining path becomes one fragment,
/// parametrized by arc length, with the graph metric on its samples.
std::vector<Fragment> fragment_from_curve(const MetricGraph& g, const DiscreteCurve& curve);

}  // namespace modspace
