#include "modspace/curves.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "modspace/heisenberg.hpp"

namespace modspace {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DiscreteCurve DiscreteCurve::create(const MetricGraph& g, std::vector<int> vertex_ids) {
    if (vertex_ids.size() < 2)
        throw InvalidInputError("DiscreteCurve: need at least two vertices");
    DiscreteCurve c;
    c.ids_ = std::move(vertex_ids);
    c.step_edges_.reserve(c.ids_.size() - 1);
    for (std::size_t i = 0; i + 1 < c.ids_.size(); ++i) {
        int u = c.ids_[i], v = c.ids_[i + 1];
        if (u == v) {
            c.step_edges_.push_back(-1);  // pause step
            continue;
        }
        int e = g.edge_between(u, v);
        if (e < 0)
            throw InvalidInputError("DiscreteCurve: vertices " + std::to_string(u) + "," +
                                    std::to_string(v) + " are not adjacent");
        c.step_edges_.push_back(e);
        c.length_ += g.edge_length(e);
    }
    if (!(c.length_ > 0.0))
        throw InvalidInputError("DiscreteCurve: constant curves are not allowed");
    return c;
}

double curve_length(const DiscreteCurve& curve) { return curve.length(); }

double Fragment::distance(std::size_t i, std::size_t j) const {
    switch (metric) {
        case FragmentMetric::euclidean:
            return (points[i] - points[j]).norm();
        case FragmentMetric::koranyi: {
            HeisenbergPoint p{points[i][0], points[i][1], points[i][2]};
            HeisenbergPoint q{points[j][0], points[j][1], points[j][2]};
            return h_dist(p, q);
        }
        case FragmentMetric::pairwise:
            return pair_dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return 0.0;
}

double Fragment::tight_bi_lipschitz() const {
    double L = 1.0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) {
            double dt = std::abs(domain[j] - domain[i]);
            double dx = distance(i, j);
            if (!(dx > 0.0) || !(dt > 0.0)) return kInf;
            L = std::max(L, std::max(dt / dx, dx / dt));
        }
    }
    return L;
}

double metric_derivative(const Fragment& f, std::size_t i) {
    if (f.size() < 2 || i >= f.size())
        throw IsolatedPointError("metric_derivative: domain point has no neighbor");
    double sum = 0.0;
    int count = 0;
    if (i > 0) {
        sum += f.distance(i - 1, i) / (f.domain[i] - f.domain[i - 1]);
        ++count;
    }
    if (i + 1 < f.size()) {
        sum += f.distance(i, i + 1) / (f.domain[i + 1] - f.domain[i]);
        ++count;
    }
    return sum / count;
}

namespace {

// Internal graph view with virtual super source (-1) / super sink (-2) nodes
// joined by zero-length arcs, used by the shortest_k strategy.
struct AugmentedGraph {
    const MetricGraph& g;
    std::set<int> sources, sinks;

    std::vector<std::pair<int, double>> neighbors(int id) const {
        std::vector<std::pair<int, double>> out;
        if (id == -1) {
            for (int s : sources) out.emplace_back(s, 0.0);
            return out;
        }
        if (id == -2) return out;
        for (const auto& [nbr, e] : g.neighbors(id)) out.emplace_back(nbr, g.edge_length(e));
        if (sinks.count(id)) out.emplace_back(-2, 0.0);
        return out;
    }
};

struct AugPath {
    double cost = kInf;
    std::vector<int> nodes;  // includes -1 ... -2
    bool operator<(const AugPath& other) const {
        if (cost != other.cost) return cost < other.cost;
        return nodes < other.nodes;
    }
};

AugPath aug_dijkstra(const AugmentedGraph& ag, int start, const std::set<int>& banned_nodes,
                     const std::set<std::pair<int, int>>& banned_arcs) {
    std::map<int, double> dist;
    std::map<int, int> parent;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[start] = 0.0;
    heap.emplace(0.0, start);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        if (u == -2) break;
        for (const auto& [v, len] : ag.neighbors(u)) {
            if (banned_nodes.count(v)) continue;
            if (banned_arcs.count({u, v})) continue;
            double nd = d + len;
            auto it = dist.find(v);
            if (it == dist.end() || nd < it->second) {
                dist[v] = nd;
                parent[v] = u;
                heap.emplace(nd, v);
            }
        }
    }
    AugPath p;
    auto it = dist.find(-2);
    if (it == dist.end()) return p;
    p.cost = it->second;
    for (int cur = -2; cur != start; cur = parent.at(cur)) p.nodes.push_back(cur);
    p.nodes.push_back(start);
    std::reverse(p.nodes.begin(), p.nodes.end());
    return p;
}

// Yen's k-shortest loopless paths on the augmented graph.
std::vector<std::vector<int>> k_shortest_paths(const AugmentedGraph& ag, int k) {
    std::vector<AugPath> found;
    std::set<AugPath> candidates;

    AugPath first = aug_dijkstra(ag, -1, {}, {});
    if (first.nodes.empty()) return {};
    found.push_back(first);

    while (static_cast<int>(found.size()) < k) {
        const AugPath& prev = found.back();
        for (std::size_t spur = 0; spur + 1 < prev.nodes.size(); ++spur) {
            std::vector<int> root(prev.nodes.begin(),
                                  prev.nodes.begin() + static_cast<long>(spur) + 1);
            std::set<std::pair<int, int>> banned_arcs;
            for (const auto& p : found) {
                if (p.nodes.size() > spur + 1 &&
                    std::equal(root.begin(), root.end(), p.nodes.begin()))
                    banned_arcs.insert({p.nodes[spur], p.nodes[spur + 1]});
            }
            std::set<int> banned_nodes(root.begin(), root.end() - 1);
            AugPath tail = aug_dijkstra(ag, root.back(), banned_nodes, banned_arcs);
            if (tail.nodes.empty()) continue;
            AugPath cand;
            cand.nodes = root;
            cand.nodes.insert(cand.nodes.end(), tail.nodes.begin() + 1, tail.nodes.end());
            cand.cost = 0.0;
            for (std::size_t i = 0; i + 1 < cand.nodes.size(); ++i) {
                int u = cand.nodes[i], v = cand.nodes[i + 1];
                if (u == -1 || v == -2) continue;
                cand.cost += ag.g.edge_length(ag.g.edge_between(u, v));
            }
            bool dup = false;
            for (const auto& p : found)
                if (p.nodes == cand.nodes) dup = true;
            if (!dup) candidates.insert(cand);
        }
        if (candidates.empty()) break;
        found.push_back(*candidates.begin());
        candidates.erase(candidates.begin());
    }

    std::vector<std::vector<int>> out;
    for (const auto& p : found) {
        std::vector<int> ids(p.nodes.begin() + 1, p.nodes.end() - 1);
        out.push_back(std::move(ids));
    }
    return out;
}

std::vector<std::vector<int>> all_simple_paths(const MetricGraph& g, const std::set<int>& sources,
                                               const std::set<int>& sinks, int max_curves) {
    std::vector<std::vector<int>> out;
    std::vector<int> stack;
    std::set<int> on_path;
    std::function<void(int)> dfs = [&](int u) {
        if (static_cast<int>(out.size()) >= max_curves) return;
        stack.push_back(u);
        on_path.insert(u);
        if (sinks.count(u) && stack.size() >= 2) {
            out.push_back(stack);
        } else {
            auto nbrs = g.neighbors(u);
            std::sort(nbrs.begin(), nbrs.end());
            for (const auto& [v, e] : nbrs) {
                if (on_path.count(v)) continue;
                if (sources.count(v)) continue;  // simple crossings leave the source once
                dfs(v);
            }
        }
        stack.pop_back();
        on_path.erase(u);
    };
    for (int s : sources) {
        if (static_cast<int>(out.size()) >= max_curves) break;
        dfs(s);
    }
    return out;
}

std::vector<std::vector<int>> monotone_paths(const MetricGraph& g, const std::vector<int>& source,
                                             const std::set<int>& sinks, int max_curves) {
    if (!g.has_coords())
        throw InvalidInputError("crossing_family: monotone strategy needs vertex coordinates");

    // Crossing axis: the coordinate with the largest centroid separation.
    Eigen::VectorXd src_c = Eigen::VectorXd::Zero(g.coord_dim());
    Eigen::VectorXd snk_c = Eigen::VectorXd::Zero(g.coord_dim());
    for (int s : source) src_c += g.coords_of(s);
    for (int t : sinks) snk_c += g.coords_of(t);
    src_c /= static_cast<double>(source.size());
    snk_c /= static_cast<double>(sinks.size());
    Eigen::VectorXd delta = snk_c - src_c;
    int axis = 0;
    delta.cwiseAbs().maxCoeff(&axis);
    double dir = delta[axis] >= 0 ? 1.0 : -1.0;

    std::vector<std::vector<int>> out;
    for (int s : source) {
        if (static_cast<int>(out.size()) >= max_curves) break;
        // Dijkstra over steps that never decrease the crossing coordinate.
        std::map<int, double> dist;
        std::map<int, int> parent;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[s] = 0.0;
        heap.emplace(0.0, s);
        int reached = -1;
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            if (sinks.count(u)) {
                reached = u;
                break;
            }
            for (const auto& [v, e] : g.neighbors(u)) {
                double step = dir * (g.coords_of(v)[axis] - g.coords_of(u)[axis]);
                if (step < -1e-15) continue;
                double nd = d + g.edge_length(e);
                auto it = dist.find(v);
                if (it == dist.end() || nd < it->second) {
                    dist[v] = nd;
                    parent[v] = u;
                    heap.emplace(nd, v);
                }
            }
        }
        if (reached < 0) continue;
        std::vector<int> path;
        for (int cur = reached; cur != s; cur = parent.at(cur)) path.push_back(cur);
        path.push_back(s);
        std::reverse(path.begin(), path.end());
        if (std::find(out.begin(), out.end(), path) == out.end()) out.push_back(std::move(path));
    }
    return out;
}

}  // namespace

CurveFamily crossing_family(const MetricGraph& g, const std::vector<int>& source,
                            const std::vector<int>& sink, int max_curves,
                            CrossingStrategy strategy) {
    if (source.empty() || sink.empty())
        throw InvalidInputError("crossing_family: source and sink must be nonempty");
    std::set<int> src(source.begin(), source.end());
    std::set<int> snk(sink.begin(), sink.end());
    for (int s : src)
        if (snk.count(s)) throw InvalidInputError("crossing_family: source and sink overlap");
    if (max_curves < 1) throw InvalidInputError("crossing_family: max_curves must be >= 1");

    std::vector<std::vector<int>> paths;
    switch (strategy) {
        case CrossingStrategy::all_simple:
            paths = all_simple_paths(g, src, snk, max_curves);
            break;
        case CrossingStrategy::shortest_k:
            paths = k_shortest_paths(AugmentedGraph{g, src, snk}, max_curves);
            break;
        case CrossingStrategy::monotone: {
            std::vector<int> ordered(src.begin(), src.end());
            paths = monotone_paths(g, ordered, snk, max_curves);
            break;
        }
    }
    if (paths.empty()) throw NoPathError("crossing_family: no source-sink path found");

    CurveFamily family;
    family.tag = "crossing";
    for (auto& p : paths) family.curves.push_back(DiscreteCurve::create(g, std::move(p)));
    return family;
}

std::vector<Fragment> fragment_from_curve(const MetricGraph& g, const DiscreteCurve& curve) {
    // Cut at zero-speed (pause) steps first, then cut each moving piece into
    // maximal injective runs. Runs inside a piece share their boundary vertex
    // so the union of traversed edges is preserved.
    std::vector<std::vector<int>> pieces;
    std::vector<int> piece{curve.vertex_ids().front()};
    for (std::size_t i = 0; i + 1 < curve.vertex_ids().size(); ++i) {
        if (curve.step_edges()[i] < 0) {
            if (piece.size() >= 2) pieces.push_back(piece);
            piece = {curve.vertex_ids()[i + 1]};
            continue;
        }
        piece.push_back(curve.vertex_ids()[i + 1]);
    }
    if (piece.size() >= 2) pieces.push_back(piece);
    if (pieces.empty()) throw ZeroLengthError("fragment_from_curve: curve never moves");

    std::vector<std::vector<int>> runs;
    for (const auto& moving : pieces) {
        std::vector<int> run{moving[0]};
        std::set<int> seen{moving[0]};
        for (std::size_t i = 1; i < moving.size(); ++i) {
            int v = moving[i];
            if (seen.count(v)) {
                runs.push_back(run);
                run = {run.back()};
                seen = {run.back()};
            }
            run.push_back(v);
            seen.insert(v);
        }
        runs.push_back(run);
    }

    std::vector<Fragment> out;
    for (const auto& r : runs) {
        Fragment f;
        f.metric = FragmentMetric::pairwise;
        f.domain.resize(r.size());
        f.points.reserve(r.size());
        f.domain[0] = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i > 0) {
                int e = g.edge_between(r[i - 1], r[i]);
                f.domain[i] = f.domain[i - 1] + g.edge_length(e);
            }
            f.points.push_back(g.has_coords() ? g.coords_of(r[i]) : Eigen::VectorXd());
        }
        f.pair_dist.resize(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.size()));
        for (std::size_t i = 0; i < r.size(); ++i) {
            auto dist = g.distances_from(r[i]);
            for (std::size_t j = 0; j < r.size(); ++j)
                f.pair_dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    dist[static_cast<std::size_t>(g.index_of(r[j]))];
        }
        f.bi_lipschitz = f.tight_bi_lipschitz();
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace modspace
