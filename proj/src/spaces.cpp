#include "modspace/spaces.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

namespace modspace {

namespace {

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

long long round_to_index(double x, double h, const char* what) {
    double q = x / h;
    long long i = std::llround(q);
    if (std::abs(q - static_cast<double>(i)) > 1e-9)
        throw MeshTooCoarseError(std::string(what) + " is not a grid point at this mesh");
    return i;
}

}  // namespace

MetricGraph grid_square(int n) {
    if (n < 1) throw InvalidInputError("grid_square: n must be >= 1");
    const double h = 1.0 / n;
    const double mu = 1.0 / (2.0 * n * n);
    auto id_of = [n](int i, int j) { return i * (n + 1) + j; };

    std::vector<VertexSpec> vertices;
    vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            vertices.push_back({id_of(i, j), vec2(i * h, j * h)});

    std::vector<EdgeSpec> edges;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (i < n) edges.push_back({id_of(i, j), id_of(i + 1, j), h, mu});
            if (j < n) edges.push_back({id_of(i, j), id_of(i, j + 1), h, mu});
        }
    }
    GeneratorInfo info{"grid", {{"n", static_cast<double>(n)}}};
    return MetricGraph(std::move(vertices), std::move(edges), std::move(info));
}

MetricGraph sierpinski_carpet(int p, int k) {
    if (p < 3 || p % 2 == 0) throw InvalidInputError("sierpinski_carpet: p must be odd and >= 3");
    if (k < 0) throw InvalidInputError("sierpinski_carpet: k must be >= 0");

    int cells = 1;
    for (int l = 0; l < k; ++l) cells *= p;  // cells per side = p^k
    const int P = cells;
    const int mid = (p - 1) / 2;

    auto survives = [&](int ci, int cj) {
        int i = ci, j = cj;
        for (int l = 0; l < k; ++l) {
            if (i % p == mid && j % p == mid) return false;
            i /= p;
            j /= p;
        }
        return true;
    };

    const double h = 1.0 / P;
    const double cell_area = h * h;
    auto id_of = [P](int i, int j) { return i * (P + 1) + j; };

    std::set<int> used_vertices;
    // raw edge shares before normalization: each surviving cell spreads its
    // area equally over its four boundary edges
    std::map<std::pair<int, int>, double> share;  // key: (id_u, id_v) with u < v
    auto add_share = [&](int u, int v, double s) {
        auto key = std::minmax(u, v);
        share[key] += s;
    };
    for (int ci = 0; ci < P; ++ci) {
        for (int cj = 0; cj < P; ++cj) {
            if (!survives(ci, cj)) continue;
            int a = id_of(ci, cj), b = id_of(ci + 1, cj);
            int c = id_of(ci, cj + 1), d = id_of(ci + 1, cj + 1);
            used_vertices.insert({a, b, c, d});
            add_share(a, b, cell_area / 4.0);  // bottom
            add_share(c, d, cell_area / 4.0);  // top
            add_share(a, c, cell_area / 4.0);  // left
            add_share(b, d, cell_area / 4.0);  // right
        }
    }

    double total = 0.0;
    for (const auto& [key, s] : share) total += s;

    std::vector<VertexSpec> vertices;
    for (int id : used_vertices) {
        int i = id / (P + 1), j = id % (P + 1);
        vertices.push_back({id, vec2(i * h, j * h)});
    }
    std::vector<EdgeSpec> edges;
    for (const auto& [key, s] : share)
        edges.push_back({key.first, key.second, h, s / total});

    GeneratorInfo info{"carpet", {{"p", static_cast<double>(p)}, {"k", static_cast<double>(k)}}};
    return MetricGraph(std::move(vertices), std::move(edges), std::move(info));
}

SlitSpec slit_spec(int k) {
    if (k < 0) throw InvalidInputError("slit_spec: k must be >= 0");
    SlitSpec spec;
    spec.level = k;
    for (int g = 0; g <= k; ++g) {
        const int count = 1 << g;
        for (int a = 0; a < count; ++a) {
            for (int b = 0; b < count; ++b) {
                Slit s;
                s.x = (2 * a + 1) * std::ldexp(1.0, -(g + 1));
                s.y_lo = (4 * b + 1) * std::ldexp(1.0, -(g + 2));
                s.y_hi = (4 * b + 3) * std::ldexp(1.0, -(g + 2));
                s.generation = g;
                spec.slits.push_back(s);
            }
        }
    }
    return spec;
}

SlitCarpet slit_carpet_level(int k, int m) {
    if (k < 0) throw InvalidInputError("slit_carpet_level: k must be >= 0");
    if (m < 1) throw InvalidInputError("slit_carpet_level: m must be >= 1");
    SlitSpec spec = slit_spec(k);

    const int N = m * (1 << (k + 2));  // grid cells per side, mesh h = 1/N
    const double h = 1.0 / N;
    const double mu = h * h / 2.0;
    const int base_count = (N + 1) * (N + 1);
    auto base_id = [N](long long i, long long j) { return static_cast<int>(i * (N + 1) + j); };

    // Which grid vertices are strictly inside a slit. Distinct slits occupy
    // distinct columns or are >= 2 grid steps apart in one column, so a vertex
    // belongs to at most one slit.
    std::map<int, int> split_to_right_id;  // base id -> id of the right copy
    std::vector<char> is_split(static_cast<std::size_t>(base_count), 0);
    int next_id = base_count;
    for (const auto& s : spec.slits) {
        long long I = round_to_index(s.x, h, "slit x");
        long long Jlo = round_to_index(s.y_lo, h, "slit endpoint");
        long long Jhi = round_to_index(s.y_hi, h, "slit endpoint");
        for (long long j = Jlo + 1; j < Jhi; ++j) {
            int id = base_id(I, j);
            is_split[static_cast<std::size_t>(id)] = 1;
            split_to_right_id[id] = next_id++;
        }
    }

    std::vector<VertexSpec> vertices;
    vertices.reserve(static_cast<std::size_t>(next_id));
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j)
            vertices.push_back({base_id(i, j), vec2(i * h, j * h)});
    for (const auto& [id, rid] : split_to_right_id) {
        int i = id / (N + 1), j = id % (N + 1);
        vertices.push_back({rid, vec2(i * h, j * h)});
    }

    auto right_of = [&](int id) { return split_to_right_id.at(id); };

    std::vector<EdgeSpec> edges;
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            int id = base_id(i, j);
            bool split = is_split[static_cast<std::size_t>(id)];
            if (i < N) {
                // Horizontal edge to the right leaves from the right copy of a
                // split vertex; edges arriving from the left attach to the base
                // (left) id. Slit columns are >= 2 grid steps apart, so the far
                // endpoint is never itself split.
                int from = split ? right_of(id) : id;
                edges.push_back({from, base_id(i + 1, j), h, mu});
            }
            if (j < N) {
                int up = base_id(i, j + 1);
                bool split_up = is_split[static_cast<std::size_t>(up)];
                if (!split && !split_up) {
                    edges.push_back({id, up, h, mu});
                } else if (split && split_up) {
                    edges.push_back({id, up, h, mu});                    // left copies
                    edges.push_back({right_of(id), right_of(up), h, mu});  // right copies
                } else if (split && !split_up) {
                    // upper endpoint is the slit's top tip: both sides meet there
                    edges.push_back({id, up, h, mu});
                    edges.push_back({right_of(id), up, h, mu});
                } else {
                    // lower endpoint is the bottom tip
                    edges.push_back({id, up, h, mu});
                    edges.push_back({id, right_of(up), h, mu});
                }
            }
        }
    }

    GeneratorInfo info{"slit", {{"k", static_cast<double>(k)}, {"m", static_cast<double>(m)}}};
    SlitCarpet out{MetricGraph(std::move(vertices), std::move(edges), std::move(info)),
                   std::move(spec), h};
    return out;
}

PointCloud slit_carpet_cloud(int k, int m, double opening_ratio) {
    if (!(opening_ratio > 0.0 && opening_ratio < 1.0))
        throw InvalidInputError("slit_carpet_cloud: opening_ratio must be in (0,1)");
    SlitSpec spec = slit_spec(k);
    const int N = m * (1 << (k + 2));
    const double h = 1.0 / N;

    // Additive horizontal displacement that opens each slit into a lens of
    // half-width opening_ratio * zone, tapering to zero at the tips.
    auto opening_at = [&](const Slit& s, double y) {
        if (y < s.y_lo || y > s.y_hi) return 0.0;
        double taper = (s.y_hi - s.y_lo) / 4.0;
        double t = std::min(y - s.y_lo, s.y_hi - y) / taper;
        double zone = std::ldexp(1.0, -s.generation) / 4.0;
        return opening_ratio * zone * std::min(1.0, t);
    };
    auto displacement = [&](double x, double y, const Slit* owned, double sign_hint) {
        double dx = 0.0;
        for (const auto& s : spec.slits) {
            double zone = std::ldexp(1.0, -s.generation) / 4.0;
            double w = opening_at(s, y);
            if (w == 0.0) continue;
            double u = x - s.x;
            if (std::abs(u) > zone) continue;
            if (&s == owned)
                dx += sign_hint * w;
            else if (u != 0.0)
                dx += (u > 0 ? 1.0 : -1.0) * w * (1.0 - std::abs(u) / zone);
        }
        return dx;
    };

    std::vector<Eigen::VectorXd> points;
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            double x = i * h, y = j * h;
            const Slit* owned = nullptr;
            for (const auto& s : spec.slits) {
                if (x == s.x && y >= s.y_lo && y <= s.y_hi) {
                    owned = &s;
                    break;
                }
            }
            if (owned && opening_at(*owned, y) > 0.0) {
                points.push_back(vec2(x + displacement(x, y, owned, -1.0), y));
                points.push_back(vec2(x + displacement(x, y, owned, +1.0), y));
            } else {
                points.push_back(vec2(x + displacement(x, y, nullptr, 0.0), y));
            }
        }
    }

    Eigen::VectorXd center = vec2(0.5, 0.5);
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        double d = (points[i] - center).norm();
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    Eigen::VectorXd base = points[nearest];
    return PointCloud::from_points(std::move(points), std::move(base));
}

}  // namespace modspace
