#include "modspace/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace modspace {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MetricGraph::MetricGraph(std::vector<VertexSpec> vertices, std::vector<EdgeSpec> edges,
                         GeneratorInfo generator)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), generator_(std::move(generator)) {
    if (vertices_.empty()) throw InvalidInputError("MetricGraph: no vertices");

    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const auto& v = vertices_[i];
        if (!id_to_index_.emplace(v.id, static_cast<int>(i)).second)
            throw InvalidInputError("MetricGraph: duplicate vertex id " + std::to_string(v.id));
        if (v.coords.size() > 0) {
            if (coord_dim_ == 0)
                coord_dim_ = static_cast<int>(v.coords.size());
            else if (coord_dim_ != static_cast<int>(v.coords.size()))
                throw DimensionMismatchError("MetricGraph: inconsistent coordinate dimensions");
        }
    }
    if (coord_dim_ > 0) {
        for (const auto& v : vertices_)
            if (v.coords.size() == 0)
                throw DimensionMismatchError("MetricGraph: some vertices lack coordinates");
    }

    adjacency_.assign(vertices_.size(), {});
    std::set<std::pair<int, int>> seen;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        auto& es = edges_[e];
        if (es.u == es.v)
            throw InvalidInputError("MetricGraph: self-loop at vertex " + std::to_string(es.u));
        if (!(es.length > 0.0))
            throw InvalidInputError("MetricGraph: nonpositive edge length");
        if (es.mu < 0.0) throw InvalidInputError("MetricGraph: negative edge measure");
        int ui = index_of(es.u);
        int vi = index_of(es.v);
        auto key = std::minmax(ui, vi);
        if (!seen.insert(key).second)
            throw InvalidInputError("MetricGraph: parallel edge between " + std::to_string(es.u) +
                                    " and " + std::to_string(es.v));
        edge_idx_.emplace_back(ui, vi);
        adjacency_[static_cast<std::size_t>(ui)].emplace_back(vi, static_cast<int>(e));
        adjacency_[static_cast<std::size_t>(vi)].emplace_back(ui, static_cast<int>(e));
        total_measure_ += es.mu;
    }
    if (!edges_.empty() && !(total_measure_ > 0.0))
        throw InvalidInputError("MetricGraph: total measure must be positive");
}

int MetricGraph::index_of(int id) const {
    auto it = id_to_index_.find(id);
    if (it == id_to_index_.end())
        throw InvalidInputError("MetricGraph: unknown vertex id " + std::to_string(id));
    return it->second;
}

const Eigen::VectorXd& MetricGraph::coords_of(int id) const {
    return vertices_[static_cast<std::size_t>(index_of(id))].coords;
}

int MetricGraph::edge_between(int u_id, int v_id) const {
    int ui = index_of(u_id);
    int vi = index_of(v_id);
    for (const auto& [nbr, e] : adjacency_[static_cast<std::size_t>(ui)])
        if (nbr == vi) return e;
    return -1;
}

std::vector<std::pair<int, int>> MetricGraph::neighbors(int id) const {
    const auto& adj = adjacency_[static_cast<std::size_t>(index_of(id))];
    std::vector<std::pair<int, int>> out;
    out.reserve(adj.size());
    for (const auto& [nbr, e] : adj) out.emplace_back(id_of(nbr), e);
    return out;
}

std::vector<double> MetricGraph::dijkstra(int source_index, std::vector<int>* parent) const {
    std::vector<double> dist(vertices_.size(), kInf);
    if (parent) parent->assign(vertices_.size(), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(source_index)] = 0.0;
    heap.emplace(0.0, source_index);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& [v, e] : adjacency_[static_cast<std::size_t>(u)]) {
            double nd = d + edges_[static_cast<std::size_t>(e)].length;
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                if (parent) (*parent)[static_cast<std::size_t>(v)] = u;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

ShortestPathResult MetricGraph::shortest_path(int u_id, int v_id) const {
    int ui = index_of(u_id);
    int vi = index_of(v_id);
    if (ui == vi) return {0.0, {u_id}};
    std::vector<int> parent;
    auto dist = dijkstra(ui, &parent);
    if (!(dist[static_cast<std::size_t>(vi)] < kInf))
        throw DisconnectedError("shortest_path: no path between " + std::to_string(u_id) +
                                " and " + std::to_string(v_id));
    std::vector<int> path;
    for (int cur = vi; cur != -1; cur = parent[static_cast<std::size_t>(cur)])
        path.push_back(id_of(cur));
    std::reverse(path.begin(), path.end());
    return {dist[static_cast<std::size_t>(vi)], std::move(path)};
}

std::vector<double> MetricGraph::distances_from(int source_id) const {
    return dijkstra(index_of(source_id), nullptr);
}

std::vector<int> MetricGraph::ball(int center_id, double r) const {
    if (r < 0.0) throw InvalidInputError("ball: negative radius");
    auto dist = distances_from(center_id);
    std::vector<int> out;
    for (std::size_t i = 0; i < dist.size(); ++i)
        if (dist[i] < r) out.push_back(id_of(static_cast<int>(i)));
    return out;
}

double MetricGraph::measure_of_ball(const std::vector<int>& vertex_ids) const {
    std::vector<char> in(vertices_.size(), 0);
    for (int id : vertex_ids) in[static_cast<std::size_t>(index_of(id))] = 1;
    double total = 0.0;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& [ui, vi] = edge_idx_[e];
        if (in[static_cast<std::size_t>(ui)] && in[static_cast<std::size_t>(vi)])
            total += edges_[e].mu;
    }
    return total;
}

double MetricGraph::eccentricity(int id) const {
    auto dist = distances_from(id);
    double ecc = 0.0;
    for (double d : dist)
        if (d < kInf) ecc = std::max(ecc, d);
    return ecc;
}

double MetricGraph::diameter() const {
    double diam = 0.0;
    for (const auto& v : vertices_) diam = std::max(diam, eccentricity(v.id));
    return diam;
}

const Eigen::MatrixXd& MetricGraph::all_pairs_distances() const {
    std::call_once(cache_->once, [this] {
        auto mat = std::make_unique<Eigen::MatrixXd>(vertices_.size(), vertices_.size());
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            auto dist = dijkstra(static_cast<int>(i), nullptr);
            for (std::size_t j = 0; j < vertices_.size(); ++j) (*mat)(i, j) = dist[j];
        }
        cache_->matrix = std::move(mat);
    });
    return *cache_->matrix;
}

double doubling_constant(const MetricGraph& g, const std::vector<double>& radii,
                         const std::vector<int>& center_ids) {
    double worst = 0.0;
    bool any = false;
    for (int c : center_ids) {
        auto dist = g.distances_from(c);
        for (double r : radii) {
            if (!(r > 0.0)) throw InvalidInputError("doubling_constant: radii must be positive");
            std::vector<int> small, big;
            for (std::size_t i = 0; i < dist.size(); ++i) {
                if (dist[i] < r) small.push_back(g.id_of(static_cast<int>(i)));
                if (dist[i] < 2.0 * r) big.push_back(g.id_of(static_cast<int>(i)));
            }
            double ms = g.measure_of_ball(small);
            if (!(ms > 0.0)) continue;  // skip empty balls
            double mb = g.measure_of_ball(big);
            worst = std::max(worst, mb / ms);
            any = true;
        }
    }
    if (!any) throw EmptyBallError("doubling_constant: all sampled balls carry zero measure");
    return worst;
}

}  // namespace modspace
