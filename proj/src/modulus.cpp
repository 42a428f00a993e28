#include "modspace/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "modspace/parallel.hpp"

namespace modspace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dual_exponent(double p) { return p > 1.0 ? p / (p - 1.0) : kInf; }

/// The modulus program restricted to measured edges, with the rho_cap
/// contribution of zero-measure edges folded into the right-hand sides.
struct Reduced {
    std::vector<int> col_edge;  // column -> graph edge
    std::vector<int> edge_col;  // graph edge -> column or -1
    Eigen::VectorXd mu;         // per column, strictly positive

    std::vector<int> row_curve;                            // row -> family index
    std::vector<std::vector<std::pair<int, double>>> rows; // sparse (col, len*mult)
    Eigen::VectorXd b;                                     // reduced rhs, > 0

    std::vector<int> capped_edges;
    std::vector<double> cap_contrib;  // per family curve

    int cols() const { return static_cast<int>(col_edge.size()); }
    int n_rows() const { return static_cast<int>(rows.size()); }

    Eigen::VectorXd row_values(const Eigen::VectorXd& rho) const {
        Eigen::VectorXd out(n_rows());
        parallel_for(static_cast<std::size_t>(n_rows()), [&](std::size_t r) {
            double acc = 0.0;
            for (const auto& [j, c] : rows[r]) acc += c * rho[j];
            out[static_cast<Eigen::Index>(r)] = acc;
        });
        return out;
    }
};

Reduced build_reduced(const MetricGraph& g, const CurveFamily& family, double rho_cap) {
    Reduced R;
    R.edge_col.assign(static_cast<std::size_t>(g.edge_count()), -1);
    for (int e = 0; e < g.edge_count(); ++e) {
        if (g.edge_measure(e) > 0.0) {
            R.edge_col[static_cast<std::size_t>(e)] = R.cols();
            R.col_edge.push_back(e);
        } else {
            R.capped_edges.push_back(e);
        }
    }
    R.mu.resize(R.cols());
    for (int j = 0; j < R.cols(); ++j) R.mu[j] = g.edge_measure(R.col_edge[static_cast<std::size_t>(j)]);

    R.cap_contrib.assign(family.curves.size(), 0.0);
    std::vector<double> bs;
    for (std::size_t ci = 0; ci < family.curves.size(); ++ci) {
        const auto& curve = family.curves[ci];
        std::map<int, int> mult;
        for (int e : curve.step_edges())
            if (e >= 0) ++mult[e];
        std::vector<std::pair<int, double>> row;
        double cap = 0.0;
        for (const auto& [e, m] : mult) {
            double c = g.edge_length(e) * m;
            int j = R.edge_col[static_cast<std::size_t>(e)];
            if (j >= 0)
                row.emplace_back(j, c);
            else
                cap += rho_cap * c;
        }
        R.cap_contrib[ci] = cap;
        double b = 1.0 - cap;
        // Rows satisfied by the cap alone, or supported entirely on unmeasured
        // edges (where density is free), impose no constraint.
        if (b <= 1e-15 || row.empty()) continue;
        R.row_curve.push_back(static_cast<int>(ci));
        R.rows.push_back(std::move(row));
        bs.push_back(b);
    }
    R.b = Eigen::Map<Eigen::VectorXd>(bs.data(), static_cast<Eigen::Index>(bs.size()));
    return R;
}

Eigen::VectorXd cols_transpose_apply(const Reduced& R, const std::vector<int>& active,
                                     const Eigen::VectorXd& lam) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(R.cols());
    for (std::size_t a = 0; a < active.size(); ++a) {
        double l = lam[static_cast<Eigen::Index>(a)];
        if (l == 0.0) continue;
        for (const auto& [j, c] : R.rows[static_cast<std::size_t>(active[a])]) s[j] += l * c;
    }
    return s;
}

Eigen::VectorXd active_row_values(const Reduced& R, const std::vector<int>& active,
                                  const Eigen::VectorXd& rho) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
        double acc = 0.0;
        for (const auto& [j, c] : R.rows[static_cast<std::size_t>(active[a])]) acc += c * rho[j];
        out[static_cast<Eigen::Index>(a)] = acc;
    }
    return out;
}

double energy(const Reduced& R, const Eigen::VectorXd& rho, double p) {
    double acc = 0.0;
    for (int j = 0; j < R.cols(); ++j) acc += R.mu[j] * std::pow(rho[j], p);
    return acc;
}

/// rho(lambda) from stationarity p rho^(p-1) mu = s, for p > 1.
Eigen::VectorXd rho_from_s(const Reduced& R, const Eigen::VectorXd& s, double p) {
    Eigen::VectorXd rho(R.cols());
    const double inv = 1.0 / (p - 1.0);
    for (int j = 0; j < R.cols(); ++j)
        rho[j] = s[j] > 0.0 ? std::pow(s[j] / (p * R.mu[j]), inv) : 0.0;
    return rho;
}

double dual_value(const Reduced& R, const std::vector<int>& active, const Eigen::VectorXd& lam,
                  double p, Eigen::VectorXd* rho_out) {
    Eigen::VectorXd s = cols_transpose_apply(R, active, lam);
    Eigen::VectorXd rho = rho_from_s(R, s, p);
    double val = -(p - 1.0) * energy(R, rho, p);
    for (std::size_t a = 0; a < active.size(); ++a)
        val += lam[static_cast<Eigen::Index>(a)] * R.b[active[a]];
    if (rho_out) *rho_out = std::move(rho);
    return val;
}

struct RestrictedSolution {
    Eigen::VectorXd rho;     // measured columns
    Eigen::VectorXd lambda;  // per active row
    int iterations = 0;
};

/// Projected gradient ascent with backtracking on the smooth dual, then a
/// Newton polish of the active KKT system. p > 1.
RestrictedSolution restricted_solve_dual(const Reduced& R, const std::vector<int>& active,
                                         double p, int max_iters) {
    const auto m = static_cast<Eigen::Index>(active.size());
    RestrictedSolution sol;

    // Feasible uniform start fixes the dual scale: sum lambda b ~ p * Mod.
    double min_rowsum = kInf;
    for (int r : active) {
        double rs = 0.0;
        for (const auto& [j, c] : R.rows[static_cast<std::size_t>(r)]) rs += c;
        min_rowsum = std::min(min_rowsum, rs / R.b[r]);
    }
    Eigen::VectorXd rho0 = Eigen::VectorXd::Constant(R.cols(), 1.0 / min_rowsum);
    double f0 = energy(R, rho0, p);
    double bbar = 0.0;
    for (int r : active) bbar += R.b[r];
    Eigen::VectorXd lam = Eigen::VectorXd::Constant(m, p * f0 / std::max(bbar, 1e-300));

    Eigen::VectorXd rho;
    double gval = dual_value(R, active, lam, p, &rho);
    Eigen::VectorXd grad(m), prev_lam, prev_grad;
    double step = 1.0;
    int it = 0;
    const int ascent_cap = std::min(max_iters, 20000);
    for (; it < ascent_cap; ++it) {
        Eigen::VectorXd vals = active_row_values(R, active, rho);
        for (Eigen::Index a = 0; a < m; ++a) grad[a] = R.b[active[static_cast<std::size_t>(a)]] - vals[a];

        // Barzilai-Borwein step seed
        if (it > 0) {
            Eigen::VectorXd dl = lam - prev_lam;
            Eigen::VectorXd dg = grad - prev_grad;
            double denom = -dl.dot(dg);
            if (denom > 1e-300) step = dl.squaredNorm() / denom;
            step = std::clamp(step, 1e-14, 1e14);
        }

        Eigen::VectorXd pg = (lam + grad).cwiseMax(0.0) - lam;
        double scale = std::max(1.0, lam.lpNorm<Eigen::Infinity>());
        if (pg.lpNorm<Eigen::Infinity>() <= 1e-11 * scale) break;

        prev_lam = lam;
        prev_grad = grad;
        double t = step;
        Eigen::VectorXd cand;
        double gnew = -kInf;
        for (int bt = 0; bt < 60; ++bt) {
            cand = (lam + t * grad).cwiseMax(0.0);
            gnew = dual_value(R, active, cand, p, &rho);
            if (gnew >= gval + 1e-4 * grad.dot(cand - lam) - 1e-300) break;
            t *= 0.5;
        }
        if (!(gnew > gval) && (cand - lam).lpNorm<Eigen::Infinity>() <= 1e-15 * scale) break;
        lam = cand;
        gval = gnew;
    }
    sol.iterations = it;

    // Newton polish on the active support: drive b - C rho(lambda) to zero.
    std::vector<char> pinned(static_cast<std::size_t>(m), 0);
    for (int polish = 0; polish < 200; ++polish) {
        Eigen::VectorXd s = cols_transpose_apply(R, active, lam);
        rho = rho_from_s(R, s, p);
        Eigen::VectorXd vals = active_row_values(R, active, rho);
        Eigen::VectorXd resid(m);
        for (Eigen::Index a = 0; a < m; ++a) resid[a] = R.b[active[static_cast<std::size_t>(a)]] - vals[a];

        // Complementarity: rows at lambda = 0 with slack are inactive.
        double rmax = 0.0;
        for (Eigen::Index a = 0; a < m; ++a) {
            if (lam[a] <= 0.0 && resid[a] < 0.0) {
                pinned[static_cast<std::size_t>(a)] = 1;
                continue;
            }
            pinned[static_cast<std::size_t>(a)] = 0;
            rmax = std::max(rmax, std::abs(resid[a]));
        }
        if (rmax <= 1e-13) break;

        std::vector<Eigen::Index> free;
        for (Eigen::Index a = 0; a < m; ++a)
            if (!pinned[static_cast<std::size_t>(a)]) free.push_back(a);
        if (free.empty()) break;

        // rho'(s) on the measured columns
        Eigen::VectorXd drho = Eigen::VectorXd::Zero(R.cols());
        for (int j = 0; j < R.cols(); ++j) {
            if (s[j] > 0.0)
                drho[j] = std::pow(s[j] / (p * R.mu[j]), (2.0 - p) / (p - 1.0)) /
                          ((p - 1.0) * p * R.mu[j]);
        }
        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd J(nf, nf);
        for (Eigen::Index ai = 0; ai < nf; ++ai) {
            for (Eigen::Index bi = ai; bi < nf; ++bi) {
                double acc = 0.0;
                const auto& ra = R.rows[static_cast<std::size_t>(active[static_cast<std::size_t>(free[static_cast<std::size_t>(ai)])])];
                const auto& rb = R.rows[static_cast<std::size_t>(active[static_cast<std::size_t>(free[static_cast<std::size_t>(bi)])])];
                // sparse dot over shared columns
                std::size_t x = 0, y = 0;
                while (x < ra.size() && y < rb.size()) {
                    if (ra[x].first == rb[y].first) {
                        acc += ra[x].second * rb[y].second * drho[ra[x].first];
                        ++x;
                        ++y;
                    } else if (ra[x].first < rb[y].first) {
                        ++x;
                    } else {
                        ++y;
                    }
                }
                J(ai, bi) = acc;
                J(bi, ai) = acc;
            }
        }
        Eigen::VectorXd rf(nf);
        for (Eigen::Index a = 0; a < nf; ++a) rf[a] = resid[free[static_cast<std::size_t>(a)]];
        double damp = std::max(1e-300, 1e-14 * J.trace() / static_cast<double>(nf));
        Eigen::MatrixXd Jd = J + damp * Eigen::MatrixXd::Identity(nf, nf);
        Eigen::VectorXd delta = Jd.ldlt().solve(rf);
        if (!delta.allFinite()) {
            delta = J.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rf);
            if (!delta.allFinite()) break;
        }

        double alpha = 1.0;
        double base = rf.norm();
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            Eigen::VectorXd cand = lam;
            for (Eigen::Index a = 0; a < nf; ++a)
                cand[free[static_cast<std::size_t>(a)]] =
                    std::max(0.0, lam[free[static_cast<std::size_t>(a)]] + alpha * delta[a]);
            Eigen::VectorXd s2 = cols_transpose_apply(R, active, cand);
            Eigen::VectorXd rho2 = rho_from_s(R, s2, p);
            Eigen::VectorXd v2 = active_row_values(R, active, rho2);
            double rn = 0.0;
            for (Eigen::Index a = 0; a < nf; ++a) {
                Eigen::Index row = free[static_cast<std::size_t>(a)];
                if (cand[row] <= 0.0 &&
                    R.b[active[static_cast<std::size_t>(row)]] - v2[row] < 0.0)
                    continue;  // pinned with slack
                double rr = R.b[active[static_cast<std::size_t>(row)]] - v2[row];
                rn += rr * rr;
            }
            rn = std::sqrt(rn);
            if (rn < base * (1.0 - 1e-4 * alpha) || rn <= 1e-13) {
                lam = cand;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }

    Eigen::VectorXd s = cols_transpose_apply(R, active, lam);
    sol.rho = rho_from_s(R, s, p);
    sol.lambda = lam;
    return sol;
}

/// Augmented-Lagrangian primal solve for p = 1: projected gradient descent
/// with backtracking on rho >= 0, multipliers maintained by the standard
/// first-order update.
RestrictedSolution restricted_solve_p1(const Reduced& R, const std::vector<int>& active,
                                       double tol, int max_iters) {
    const auto m = static_cast<Eigen::Index>(active.size());
    RestrictedSolution sol;

    double min_rowsum = kInf;
    for (int r : active) {
        double rs = 0.0;
        for (const auto& [j, c] : R.rows[static_cast<std::size_t>(r)]) rs += c;
        min_rowsum = std::min(min_rowsum, rs / R.b[r]);
    }
    Eigen::VectorXd rho = Eigen::VectorXd::Constant(R.cols(), 1.0 / min_rowsum);
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
    double K = 1.0;
    const double bscale = R.b.lpNorm<Eigen::Infinity>();
    double best_viol = kInf;
    int total_it = 0;

    auto phi_and_grad = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        Eigen::VectorXd vals = active_row_values(R, active, x);
        double val = R.mu.dot(x);
        Eigen::VectorXd psi(m);
        for (Eigen::Index a = 0; a < m; ++a) {
            double v = R.b[active[static_cast<std::size_t>(a)]] - vals[a];
            double l = lam[a];
            if (v >= -l / K)
                val += l * v + 0.5 * K * v * v;
            else
                val += -0.5 * l * l / K;
            psi[a] = std::max(0.0, l + K * v);
        }
        if (grad) {
            *grad = R.mu;
            for (Eigen::Index a = 0; a < m; ++a) {
                if (psi[a] == 0.0) continue;
                for (const auto& [j, c] : R.rows[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])])
                    (*grad)[j] -= psi[a] * c;
            }
        }
        return val;
    };

    for (int outer = 0; outer < 100; ++outer) {
        // inner projected gradient descent with backtracking + BB steps
        Eigen::VectorXd grad;
        double fval = phi_and_grad(rho, &grad);
        double step = 1.0 / std::max(1.0, K);
        Eigen::VectorXd prev_x, prev_g;
        for (int it = 0; it < 4000; ++it, ++total_it) {
            if (it > 0) {
                Eigen::VectorXd dx = rho - prev_x;
                Eigen::VectorXd dg = grad - prev_g;
                double denom = dx.dot(dg);
                if (denom > 1e-300) step = dx.squaredNorm() / denom;
                step = std::clamp(step, 1e-16, 1e12);
            }
            Eigen::VectorXd pg = rho - (rho - grad).cwiseMax(0.0);
            if (pg.lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, rho.lpNorm<Eigen::Infinity>()))
                break;
            prev_x = rho;
            prev_g = grad;
            double t = step;
            for (int bt = 0; bt < 60; ++bt) {
                Eigen::VectorXd cand = (rho - t * grad).cwiseMax(0.0);
                Eigen::VectorXd cg;
                double fc = phi_and_grad(cand, &cg);
                if (fc <= fval + 1e-4 * grad.dot(cand - rho) + 1e-300) {
                    rho = cand;
                    fval = fc;
                    grad = std::move(cg);
                    break;
                }
                t *= 0.5;
            }
            if (total_it > max_iters) break;
        }

        Eigen::VectorXd vals = active_row_values(R, active, rho);
        double viol = 0.0;
        for (Eigen::Index a = 0; a < m; ++a) {
            double v = R.b[active[static_cast<std::size_t>(a)]] - vals[a];
            lam[a] = std::max(0.0, lam[a] + K * v);
            viol = std::max(viol, v);
        }
        if (viol <= 1e-4 * tol * std::max(1.0, bscale)) break;
        if (viol > 0.5 * best_viol) K = std::min(K * 4.0, 1e13);
        best_viol = std::min(best_viol, viol);
        if (total_it > max_iters) break;
    }
    sol.iterations = total_it;

    // Basis polish: equality on tight rows restricted to the support of rho.
    {
        Eigen::VectorXd vals = active_row_values(R, active, rho);
        double rho_max = rho.lpNorm<Eigen::Infinity>();
        std::vector<int> support;
        for (int j = 0; j < R.cols(); ++j)
            if (rho[j] > 1e-9 * std::max(1.0, rho_max)) support.push_back(j);
        std::vector<Eigen::Index> tight;
        for (Eigen::Index a = 0; a < m; ++a)
            if (vals[a] <= R.b[active[static_cast<std::size_t>(a)]] * (1.0 + 1e-6)) tight.push_back(a);
        if (!support.empty() && !tight.empty()) {
            std::map<int, int> col_pos;
            for (std::size_t i = 0; i < support.size(); ++i) col_pos[support[i]] = static_cast<int>(i);
            Eigen::MatrixXd A(static_cast<Eigen::Index>(tight.size()),
                              static_cast<Eigen::Index>(support.size()));
            A.setZero();
            Eigen::VectorXd rhs(static_cast<Eigen::Index>(tight.size()));
            for (std::size_t ti = 0; ti < tight.size(); ++ti) {
                int r = active[static_cast<std::size_t>(tight[ti])];
                rhs[static_cast<Eigen::Index>(ti)] = R.b[r];
                for (const auto& [j, c] : R.rows[static_cast<std::size_t>(r)]) {
                    auto it = col_pos.find(j);
                    if (it != col_pos.end()) A(static_cast<Eigen::Index>(ti), it->second) = c;
                }
            }
            Eigen::VectorXd xs = A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
            if (xs.allFinite() && xs.minCoeff() >= 0.0 && (A * xs - rhs).lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, bscale)) {
                Eigen::VectorXd polished = Eigen::VectorXd::Zero(R.cols());
                for (std::size_t i = 0; i < support.size(); ++i)
                    polished[support[i]] = xs[static_cast<Eigen::Index>(i)];
                // accept only if it is admissible for the active rows and no worse
                Eigen::VectorXd pv = active_row_values(R, active, polished);
                bool ok = true;
                for (Eigen::Index a = 0; a < m; ++a)
                    if (pv[a] < R.b[active[static_cast<std::size_t>(a)]] * (1.0 - 1e-12)) ok = false;
                if (ok && R.mu.dot(polished) <= R.mu.dot(rho) * (1.0 + 1e-12)) rho = polished;
            }
        }
    }

    sol.rho = rho;
    sol.lambda = lam;
    return sol;
}

/// Minimum-norm nonnegative least squares for the stationarity system
/// C^T lambda = target, solved in the row-space Gram form (Lawson-Hanson
/// active set, then a min-norm refinement on the final support).
Eigen::VectorXd min_norm_nnls(const Reduced& R, const std::vector<int>& active,
                              const Eigen::VectorXd& target) {
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd G(m, m);
    Eigen::VectorXd h(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const auto& ra = R.rows[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];
        double acc = 0.0;
        for (const auto& [j, c] : ra) acc += c * target[j];
        h[a] = acc;
        for (Eigen::Index bidx = a; bidx < m; ++bidx) {
            const auto& rb = R.rows[static_cast<std::size_t>(active[static_cast<std::size_t>(bidx)])];
            double dot = 0.0;
            std::size_t x = 0, y = 0;
            while (x < ra.size() && y < rb.size()) {
                if (ra[x].first == rb[y].first) {
                    dot += ra[x].second * rb[y].second;
                    ++x;
                    ++y;
                } else if (ra[x].first < rb[y].first) {
                    ++x;
                } else {
                    ++y;
                }
            }
            G(a, bidx) = dot;
            G(bidx, a) = dot;
        }
    }

    auto solve_on = [&](const std::vector<Eigen::Index>& S) {
        Eigen::MatrixXd GS(static_cast<Eigen::Index>(S.size()), static_cast<Eigen::Index>(S.size()));
        Eigen::VectorXd hS(static_cast<Eigen::Index>(S.size()));
        for (std::size_t i = 0; i < S.size(); ++i) {
            hS[static_cast<Eigen::Index>(i)] = h[S[i]];
            for (std::size_t j = 0; j < S.size(); ++j)
                GS(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = G(S[i], S[j]);
        }
        // min-norm solution of the (consistent) normal equations
        Eigen::BDCSVD<Eigen::MatrixXd> svd(GS, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-12);
        return Eigen::VectorXd(svd.solve(hS));
    };

    Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
    std::vector<char> passive(static_cast<std::size_t>(m), 0);
    for (int guard = 0; guard < 4 * static_cast<int>(m) + 8; ++guard) {
        Eigen::VectorXd w = h - G * lam;  // gradient of -0.5||C^T lam - target||^2
        Eigen::Index best = -1;
        double bw = 1e-12 * std::max(1.0, h.lpNorm<Eigen::Infinity>());
        for (Eigen::Index a = 0; a < m; ++a)
            if (!passive[static_cast<std::size_t>(a)] && w[a] > bw) {
                bw = w[a];
                best = a;
            }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = 1;

        for (int inner = 0; inner < 4 * static_cast<int>(m) + 8; ++inner) {
            std::vector<Eigen::Index> S;
            for (Eigen::Index a = 0; a < m; ++a)
                if (passive[static_cast<std::size_t>(a)]) S.push_back(a);
            Eigen::VectorXd z = solve_on(S);
            bool all_pos = true;
            for (Eigen::Index i = 0; i < z.size(); ++i)
                if (z[i] <= 0.0) all_pos = false;
            if (all_pos) {
                lam.setZero();
                for (std::size_t i = 0; i < S.size(); ++i) lam[S[i]] = z[static_cast<Eigen::Index>(i)];
                break;
            }
            // step toward z until the first variable hits zero
            double alpha = 1.0;
            for (std::size_t i = 0; i < S.size(); ++i) {
                double zi = z[static_cast<Eigen::Index>(i)];
                double li = lam[S[i]];
                if (zi < li) alpha = std::min(alpha, li / std::max(li - zi, 1e-300));
            }
            for (std::size_t i = 0; i < S.size(); ++i) {
                double zi = z[static_cast<Eigen::Index>(i)];
                lam[S[i]] += alpha * (zi - lam[S[i]]);
                if (lam[S[i]] <= 1e-15 * std::max(1.0, lam.lpNorm<Eigen::Infinity>())) {
                    lam[S[i]] = 0.0;
                    passive[static_cast<std::size_t>(S[i])] = 0;
                }
            }
        }
    }

    // Min-norm refinement on the final support.
    std::vector<Eigen::Index> S;
    for (Eigen::Index a = 0; a < m; ++a)
        if (lam[a] > 0.0) S.push_back(a);
    if (!S.empty()) {
        Eigen::VectorXd z = solve_on(S);
        bool ok = z.allFinite();
        for (Eigen::Index i = 0; i < z.size() && ok; ++i)
            if (z[i] < -1e-12 * std::max(1.0, z.lpNorm<Eigen::Infinity>())) ok = false;
        if (ok) {
            lam.setZero();
            for (std::size_t i = 0; i < S.size(); ++i)
                lam[S[i]] = std::max(0.0, z[static_cast<Eigen::Index>(i)]);
        }
    }
    return lam;
}

}  // namespace

double line_integral(const Density& rho, const MetricGraph& g, const DiscreteCurve& curve) {
    if (static_cast<int>(rho.values.size()) != g.edge_count())
        throw MissingEdgeDensityError("line_integral: density not defined on all edges");
    double acc = 0.0;
    for (int e : curve.step_edges()) {
        if (e < 0) continue;
        double r = rho.values[static_cast<std::size_t>(e)];
        if (r < 0.0) throw InvalidInputError("line_integral: negative density");
        acc += r * g.edge_length(e);
    }
    return acc;
}

AdmissibilityResult is_admissible(const Density& rho, const MetricGraph& g,
                                  const CurveFamily& family, double tol) {
    if (family.curves.empty()) throw EmptyFamilyError("is_admissible: empty curve family");
    AdmissibilityResult res;
    res.worst_value = kInf;
    for (std::size_t i = 0; i < family.curves.size(); ++i) {
        double v = line_integral(rho, g, family.curves[i]);
        if (v < res.worst_value) {
            res.worst_value = v;
            res.worst_curve = static_cast<int>(i);
        }
    }
    res.admissible = res.worst_value >= 1.0 - tol;
    return res;
}

std::vector<double> eta_measure(const std::vector<double>& weights, const MetricGraph& g,
                                const CurveFamily& family) {
    if (weights.size() != family.curves.size())
        throw InvalidInputError("eta_measure: weight count != curve count");
    std::vector<double> eta(static_cast<std::size_t>(g.edge_count()), 0.0);
    for (std::size_t ci = 0; ci < family.curves.size(); ++ci) {
        double w = weights[ci];
        if (w < 0.0) throw InvalidInputError("eta_measure: negative weight");
        if (w == 0.0) continue;
        for (int e : family.curves[ci].step_edges())
            if (e >= 0) eta[static_cast<std::size_t>(e)] += w * g.edge_length(e);
    }
    return eta;
}

ModulusCertificate solve_modulus(const MetricGraph& g, const CurveFamily& family, double p,
                                 SolveOptions opts) {
    if (family.curves.empty()) throw EmptyFamilyError("solve_modulus: empty curve family");
    if (!(p >= 1.0)) throw InvalidInputError("solve_modulus: p must be >= 1");

    Reduced R = build_reduced(g, family, opts.rho_cap);

    ModulusCertificate cert;
    cert.p = p;
    cert.q = dual_exponent(p);
    cert.capped_edges = R.capped_edges;
    cert.rho_star.values.assign(static_cast<std::size_t>(g.edge_count()), 0.0);
    for (int e : R.capped_edges) cert.rho_star.values[static_cast<std::size_t>(e)] = opts.rho_cap;
    cert.dual_weights.assign(family.curves.size(), 0.0);

    if (R.n_rows() == 0) {
        // every constraint is satisfied by the cap: modulus 0
        cert.value = 0.0;
        cert.converged = true;
        cert.eta.assign(static_cast<std::size_t>(g.edge_count()), 0.0);
        cert.f.assign(static_cast<std::size_t>(g.edge_count()), 0.0);
        cert.curve_integrals.assign(family.curves.size(), 0.0);
        for (std::size_t ci = 0; ci < family.curves.size(); ++ci)
            cert.curve_integrals[ci] = line_integral(cert.rho_star, g, family.curves[ci]);
        return cert;
    }

    // Lazy constraint generation over the family.
    std::vector<int> active;
    std::set<int> in_active;
    if (R.n_rows() <= opts.lazy_threshold) {
        active.resize(static_cast<std::size_t>(R.n_rows()));
        std::iota(active.begin(), active.end(), 0);
        in_active.insert(active.begin(), active.end());
    } else {
        // seed with the most binding rows (smallest rho-free slack per unit rhs)
        std::vector<std::pair<double, int>> order;
        for (int r = 0; r < R.n_rows(); ++r) {
            double rs = 0.0;
            for (const auto& [j, c] : R.rows[static_cast<std::size_t>(r)]) rs += c;
            order.emplace_back(rs / R.b[r], r);
        }
        std::sort(order.begin(), order.end());
        for (int i = 0; i < 16; ++i) {
            active.push_back(order[static_cast<std::size_t>(i)].second);
            in_active.insert(order[static_cast<std::size_t>(i)].second);
        }
    }

    RestrictedSolution sol;
    int rounds = 0;
    for (;; ++rounds) {
        if (rounds > R.n_rows() + 8)
            throw NonconvergenceError("solve_modulus: constraint generation failed to settle");
        sol = p > 1.0 ? restricted_solve_dual(R, active, p, opts.max_iterations)
                      : restricted_solve_p1(R, active, opts.tol, opts.max_iterations);
        cert.iterations += sol.iterations;

        // scan the whole family for the most violated constraint
        Eigen::VectorXd vals = R.row_values(sol.rho);
        int worst = -1;
        double worst_gap = opts.tol;
        for (int r = 0; r < R.n_rows(); ++r) {
            double gap = (R.b[r] - vals[r]) / std::max(1.0, R.b[r]);
            if (gap > worst_gap && !in_active.count(r)) {
                worst_gap = gap;
                worst = r;
            }
        }
        if (worst < 0) break;
        active.push_back(worst);
        in_active.insert(worst);
    }

    // Exact feasibility scaling of the primal.
    Eigen::VectorXd vals = R.row_values(sol.rho);
    double tau = 1.0;
    for (int r = 0; r < R.n_rows(); ++r) {
        if (vals[r] <= 0.0) throw NonconvergenceError("solve_modulus: degenerate primal");
        tau = std::max(tau, R.b[r] / vals[r]);
    }
    Eigen::VectorXd rho_feas = sol.rho * tau;
    double value = energy(R, rho_feas, p);

    // Dual lower bound from the computed multipliers.
    double lower = 0.0;
    if (p > 1.0) {
        lower = dual_value(R, active, sol.lambda, p, nullptr);
    } else {
        Eigen::VectorXd s = cols_transpose_apply(R, active, sol.lambda);
        double scale = 1.0;
        for (int j = 0; j < R.cols(); ++j)
            if (s[j] > R.mu[j]) scale = std::max(scale, s[j] / R.mu[j]);
        for (std::size_t a = 0; a < active.size(); ++a)
            lower += sol.lambda[static_cast<Eigen::Index>(a)] / scale * R.b[active[a]];
    }
    cert.value = value;
    cert.primal_dual_gap = (value - lower) / std::max(1.0, std::abs(value));
    cert.converged = cert.primal_dual_gap <= opts.tol && cert.primal_dual_gap >= -1e-12;
    if (!cert.converged && opts.throw_on_nonconvergence) {
        std::ostringstream msg;
        msg << "solve_modulus: gap " << cert.primal_dual_gap << " above tol " << opts.tol
            << " (upper bound " << value << ", dual lower bound " << lower << ")";
        throw NonconvergenceError(msg.str());
    }

    for (int j = 0; j < R.cols(); ++j)
        cert.rho_star.values[static_cast<std::size_t>(R.col_edge[static_cast<std::size_t>(j)])] =
            rho_feas[j];

    // Emitted dual measure: minimum-norm nonnegative stationarity multipliers.
    Eigen::VectorXd target(R.cols());
    for (int j = 0; j < R.cols(); ++j)
        target[j] = p > 1.0 ? p * R.mu[j] * std::pow(rho_feas[j], p - 1.0)
                            : (rho_feas[j] > 1e-12 * rho_feas.lpNorm<Eigen::Infinity>() ? R.mu[j] : 0.0);
    Eigen::VectorXd lam;
    if (p > 1.0) {
        lam = min_norm_nnls(R, active, target);
    } else {
        // p = 1 stationarity only constrains the support of rho; solve there.
        Reduced Rs = R;
        for (auto& row : Rs.rows) {
            std::vector<std::pair<int, double>> kept;
            for (const auto& [j, c] : row)
                if (target[j] > 0.0) kept.emplace_back(j, c);
            row = std::move(kept);
        }
        lam = min_norm_nnls(Rs, active, target);
    }
    double lam_sum = lam.sum();
    if (lam_sum > 0.0) {
        for (std::size_t a = 0; a < active.size(); ++a)
            cert.dual_weights[static_cast<std::size_t>(
                R.row_curve[static_cast<std::size_t>(active[a])])] =
                lam[static_cast<Eigen::Index>(a)] / lam_sum;
    }

    cert.eta = eta_measure(cert.dual_weights, g, family);
    cert.f.assign(static_cast<std::size_t>(g.edge_count()), 0.0);
    for (int e = 0; e < g.edge_count(); ++e)
        if (g.edge_measure(e) > 0.0)
            cert.f[static_cast<std::size_t>(e)] =
                cert.eta[static_cast<std::size_t>(e)] / g.edge_measure(e);

    cert.curve_integrals.resize(family.curves.size());
    for (std::size_t ci = 0; ci < family.curves.size(); ++ci)
        cert.curve_integrals[ci] = line_integral(cert.rho_star, g, family.curves[ci]);
    return cert;
}

DualityReport verify_duality(const MetricGraph& g, const CurveFamily& family,
                             const ModulusCertificate& cert, double tol) {
    DualityReport rep;
    const double p = cert.p;
    const double value = cert.value;
    if (!(value > 0.0)) return rep;

    // (a) ||f||_q * value^(1/p) = 1
    double fnorm;
    if (p > 1.0) {
        double q = cert.q;
        double acc = 0.0;
        for (int e = 0; e < g.edge_count(); ++e)
            acc += g.edge_measure(e) * std::pow(cert.f[static_cast<std::size_t>(e)], q);
        fnorm = std::pow(acc, 1.0 / q);
    } else {
        fnorm = 0.0;
        for (int e = 0; e < g.edge_count(); ++e)
            if (g.edge_measure(e) > 0.0)
                fnorm = std::max(fnorm, cert.f[static_cast<std::size_t>(e)]);
    }
    rep.norm_identity_residual = std::abs(fnorm * std::pow(value, 1.0 / p) - 1.0);

    // (b) rho*^p = value^((p+q)/p) f^q on eta-positive edges (p > 1 only)
    if (p > 1.0) {
        rep.pointwise_checked = true;
        double q = cert.q;
        double factor = std::pow(value, (p + q) / p);
        for (int e = 0; e < g.edge_count(); ++e) {
            if (!(g.edge_measure(e) > 0.0)) continue;
            double lhs = std::pow(cert.rho_star.values[static_cast<std::size_t>(e)], p);
            double rhs = factor * std::pow(cert.f[static_cast<std::size_t>(e)], q);
            double denom = std::max({lhs, rhs, 1e-300});
            double resid = std::abs(lhs - rhs) / denom;
            if (cert.eta[static_cast<std::size_t>(e)] > 0.0)
                rep.pointwise_residual_max = std::max(rep.pointwise_residual_max, resid);
            else if (rhs > 0.0 || lhs > 0.0)
                rep.pointwise_off_support_max = std::max(rep.pointwise_off_support_max, resid);
        }
    }

    // (c) Beurling: rho*-length 1 on the support of P
    for (std::size_t ci = 0; ci < family.curves.size(); ++ci) {
        if (cert.dual_weights[ci] > 10.0 * tol)
            rep.beurling_residual_max =
                std::max(rep.beurling_residual_max, std::abs(cert.curve_integrals[ci] - 1.0));
    }

    rep.pass = rep.norm_identity_residual <= tol &&
               (!rep.pointwise_checked || rep.pointwise_residual_max <= tol) &&
               rep.beurling_residual_max <= tol;
    return rep;
}

double brute_force_modulus(const MetricGraph& g, const CurveFamily& family, double p,
                           int grid_resolution, double rho_cap) {
    if (family.curves.empty()) throw EmptyFamilyError("brute_force_modulus: empty curve family");
    if (grid_resolution < 100)
        throw InvalidInputError("brute_force_modulus: grid_resolution must be >= 100");
    Reduced R = build_reduced(g, family, rho_cap);
    const int d = R.cols();
    if (d > 6) throw TooLargeError("brute_force_modulus: more than 6 measured edges");
    if (R.n_rows() == 0) return 0.0;

    // per-edge upper bound for the optimizer: one edge alone can satisfy the
    // most demanding curve through it
    Eigen::VectorXd rho_max = Eigen::VectorXd::Zero(d);
    for (int r = 0; r < R.n_rows(); ++r)
        for (const auto& [j, c] : R.rows[static_cast<std::size_t>(r)])
            rho_max[j] = std::max(rho_max[j], R.b[r] / c);

    // scale-invariant objective: every evaluation yields an admissible density
    auto objective = [&](const Eigen::VectorXd& rho) {
        double mmin = kInf;
        for (int r = 0; r < R.n_rows(); ++r) {
            double acc = 0.0;
            for (const auto& [j, c] : R.rows[static_cast<std::size_t>(r)]) acc += c * rho[j];
            mmin = std::min(mmin, acc / R.b[r]);
        }
        if (!(mmin > 0.0)) return kInf;
        return energy(R, rho, p) / std::pow(mmin, p);
    };

    const int G = 7;  // points per axis per round
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd hi = rho_max;
    double best = kInf;
    Eigen::VectorXd best_rho = rho_max;

    int rounds = 1;
    double eff = G;
    while (eff < grid_resolution) {
        eff *= static_cast<double>(G) / 4.0;
        ++rounds;
    }
    rounds += 2;  // margin

    Eigen::VectorXd rho(d);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (int round = 0; round < rounds; ++round) {
        Eigen::VectorXd step = (hi - lo) / (G - 1);
        std::fill(idx.begin(), idx.end(), 0);
        for (;;) {
            for (int j = 0; j < d; ++j) rho[j] = lo[j] + idx[static_cast<std::size_t>(j)] * step[j];
            double v = objective(rho);
            if (v < best) {
                best = v;
                best_rho = rho;
            }
            int j = 0;
            while (j < d && ++idx[static_cast<std::size_t>(j)] == G) {
                idx[static_cast<std::size_t>(j)] = 0;
                ++j;
            }
            if (j == d) break;
        }
        // zoom on the incumbent: keep +-2 cells, clipped to the original box
        for (int j = 0; j < d; ++j) {
            double w = 2.0 * step[j];
            lo[j] = std::max(0.0, best_rho[j] - w);
            hi[j] = std::min(rho_max[j], best_rho[j] + w);
            if (hi[j] <= lo[j]) hi[j] = lo[j] + 1e-12 * std::max(1.0, rho_max[j]);
        }
    }
    return best;
}

}  // namespace modspace
