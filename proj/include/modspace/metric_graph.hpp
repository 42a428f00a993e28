#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modspace/errors.hpp"

namespace modspace {

struct VertexSpec {
    int id = 0;
    Eigen::VectorXd coords;  // may be empty for coordinate-free graphs
};

struct EdgeSpec {
    int u = 0;
    int v = 0;
    double length = 0.0;
    double mu = 0.0;
};

/// Provenance of a generated space, carried through serialization.
struct GeneratorInfo {
    std::string name;  // "grid", "carpet", "slit", "heis", or "" for ad hoc graphs
    std::map<std::string, double> params;
};

struct ShortestPathResult {
    double distance = 0.0;
    std::vector<int> path;  // vertex ids, endpoints included
};

/// A finite metric measure space: weighted undirected graph with positive edge
/// lengths, a nonnegative measure on edges, and the shortest-path metric.
/// Immutable after construction; all queries are const and safe to run
/// concurrently. The all-pairs distance cache is built once on first use
/// (single writer, shared readers afterwards).
class MetricGraph {
public:
    MetricGraph(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges,
                GeneratorInfo generator = {});

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    bool has_vertex(int id) const { return id_to_index_.count(id) > 0; }
    int index_of(int id) const;
    int id_of(int index) const { return vertices_[static_cast<std::size_t>(index)].id; }
    const Eigen::VectorXd& coords_of(int id) const;
    bool has_coords() const { return coord_dim_ > 0; }
    int coord_dim() const { return coord_dim_; }

    const EdgeSpec& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
    double edge_length(int e) const { return edges_[static_cast<std::size_t>(e)].length; }
    double edge_measure(int e) const { return edges_[static_cast<std::size_t>(e)].mu; }
    double total_measure() const { return total_measure_; }

    /// Edge index between two vertex ids, or -1 when not adjacent.
    int edge_between(int u_id, int v_id) const;

    /// Neighbors of a vertex id as (neighbor id, edge index) pairs.
    std::vector<std::pair<int, int>> neighbors(int id) const;

    /// Endpoint indices (not ids) of an edge.
    std::pair<int, int> edge_endpoint_indices(int e) const {
        return edge_idx_[static_cast<std::size_t>(e)];
    }

    const std::vector<VertexSpec>& vertices() const { return vertices_; }
    const std::vector<EdgeSpec>& edges() const { return edges_; }
    const GeneratorInfo& generator() const { return generator_; }

    /// Shortest-path distance and a realizing path. Throws DisconnectedError
    /// when the endpoints lie in different components.
    ShortestPathResult shortest_path(int u_id, int v_id) const;

    /// Distances from one source to every vertex (inf when unreachable),
    /// indexed by vertex index.
    std::vector<double> distances_from(int source_id) const;

    /// Open metric ball {v : d(center, v) < r}, returned as vertex ids.
    std::vector<int> ball(int center_id, double r) const;

    /// Measure of a vertex set: sum of mu over edges with both endpoints in it.
    double measure_of_ball(const std::vector<int>& vertex_ids) const;

    /// Largest shortest-path distance over all pairs (single component assumed).
    double diameter() const;

    /// Eccentricity of one vertex: max distance to any reachable vertex.
    double eccentricity(int id) const;

    /// Lazily built all-pairs distance matrix, indexed by vertex index.
    const Eigen::MatrixXd& all_pairs_distances() const;

private:
    std::vector<VertexSpec> vertices_;
    std::vector<EdgeSpec> edges_;
    std::map<int, int> id_to_index_;
    std::vector<std::pair<int, int>> edge_idx_;                // endpoint indices per edge
    std::vector<std::vector<std::pair<int, int>>> adjacency_;  // (nbr index, edge index)
    double total_measure_ = 0.0;
    int coord_dim_ = 0;
    GeneratorInfo generator_;

    // Lazy all-pairs cache; shared_ptr keeps the graph movable and lets copies
    // share the immutable matrix once built.
    struct DistanceCache {
        std::once_flag once;
        std::unique_ptr<Eigen::MatrixXd> matrix;
    };
    std::shared_ptr<DistanceCache> cache_ = std::make_shared<DistanceCache>();

    std::vector<double> dijkstra(int source_index, std::vector<int>* parent) const;
};

/// Max over sampled (center, r) of mu(B(x,2r)) / mu(B(x,r)), skipping balls of
/// zero measure. Throws EmptyBallError when every sampled ball has measure 0.
double doubling_constant(const MetricGraph& g, const std::vector<double>& radii,
                         const std::vector<int>& center_ids);

}  // namespace modspace
