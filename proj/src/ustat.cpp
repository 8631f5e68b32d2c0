#include "polymerlab/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "polymerlab/walk.hpp"

namespace polymer::ustat {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(m);
    weights.resize(m);
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            pp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

double rect_average_1d(const KernelFn& g, long n, long i, long z, int q,
                       const std::vector<double>& gn, const std::vector<double>& gw) {
    const double t0 = static_cast<double>(i - 1) / n, t1 = static_cast<double>(i) / n;
    const double sq = std::sqrt(static_cast<double>(n));
    const double x0 = (z - 1.0) / sq, x1 = (z + 1.0) / sq;
    double acc = 0.0;
    std::vector<double> tv(1), xv(1);
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b) {
            tv[0] = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gn[a];
            xv[0] = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * gn[b];
            acc += gw[a] * gw[b] * g(tv, xv);
        }
    return acc / 4.0;  // weights integrate to 2 per dimension
}

}  // namespace

long KernelGrid::idx1(long i, long z) const {
    const long cap = row_cap(i);
    if (std::labs(z) > cap) return -1;
    return (i - 1) * sites_per_row_ + (z + cap) / 2;
}

long KernelGrid::idx2(long i1, long z1, long i2, long z2) const {
    const long a = idx1(i1, z1), b = idx1(i2, z2);
    if (a < 0 || b < 0) return -1;
    return a * (n_ * sites_per_row_) + b;
}

double KernelGrid::at1(long i, long z) const {
    const long ix = idx1(i, z);
    return ix < 0 ? 0.0 : v1_[ix];
}

double KernelGrid::at2(long i1, long z1, long i2, long z2) const {
    const long ix = idx2(i1, z1, i2, z2);
    return ix < 0 ? 0.0 : v2_[ix];
}

double KernelGrid::cell_value(const std::vector<long>& i, const std::vector<long>& z) const {
    if (k_ == 1) return at1(i[0], z[0]);
    return at2(i[0], z[0], i[1], z[1]);
}

double KernelGrid::cell_volume() const {
    return std::ldexp(1.0, k_) * std::pow(static_cast<double>(n_), -1.5 * k_);
}

double KernelGrid::l2_norm_sq() const {
    double acc = 0.0;
    if (k_ == 1) {
        for (long i = 1; i <= n_; ++i) {
            const long cap = row_cap(i);
            for (long z = -cap; z <= cap; z += 2) acc += at1(i, z) * at1(i, z);
        }
    } else {
        for (long i1 = 1; i1 <= n_; ++i1)
            for (long i2 = 1; i2 <= n_; ++i2) {
                if (i1 == i2) continue;
                const long c1 = row_cap(i1), c2 = row_cap(i2);
                for (long z1 = -c1; z1 <= c1; z1 += 2)
                    for (long z2 = -c2; z2 <= c2; z2 += 2) {
                        const double v = at2(i1, z1, i2, z2);
                        acc += v * v;
                    }
            }
    }
    return acc * cell_volume();
}

KernelGrid KernelGrid::average(const KernelFn& g, int k, long n, double support_radius,
                               int quad_order) {
    if (k < 1 || k > 2) throw std::invalid_argument("KernelGrid: k in {1,2}");
    if (quad_order < 1) throw std::invalid_argument("KernelGrid: quad_order >= 1");
    KernelGrid grid;
    grid.k_ = k;
    grid.n_ = n;
    grid.zmax_ = std::max<long>(1, static_cast<long>(std::ceil(support_radius * std::sqrt(double(n)))));
    grid.sites_per_row_ = grid.zmax_ + 1;
    if (k > n) return grid;  // D_k^n empty

    std::vector<double> gn, gw;
    gauss_legendre(quad_order, gn, gw);
    const int q = quad_order;

    if (k == 1) {
        grid.v1_.assign(n * grid.sites_per_row_, 0.0);
        for (long i = 1; i <= n; ++i) {
            const long cap = grid.row_cap(i);
            for (long z = -cap; z <= cap; z += 2)
                grid.v1_[grid.idx1(i, z)] = rect_average_1d(g, n, i, z, q, gn, gw);
        }
        return grid;
    }

    const double sq = std::sqrt(static_cast<double>(n));
    grid.v2_.assign(n * grid.sites_per_row_ * n * grid.sites_per_row_, 0.0);
    std::vector<double> tv(2), xv(2);
    for (long i1 = 1; i1 <= n; ++i1)
        for (long i2 = 1; i2 <= n; ++i2) {
            if (i1 == i2) continue;
            const long c1 = grid.row_cap(i1), c2 = grid.row_cap(i2);
            for (long z1 = -c1; z1 <= c1; z1 += 2)
                for (long z2 = -c2; z2 <= c2; z2 += 2) {
                    double acc = 0.0;
                    for (int a = 0; a < q; ++a)
                        for (int b = 0; b < q; ++b)
                            for (int c = 0; c < q; ++c)
                                for (int d = 0; d < q; ++d) {
                                    tv[0] = (i1 - 0.5 + 0.5 * gn[a]) / n;
                                    tv[1] = (i2 - 0.5 + 0.5 * gn[b]) / n;
                                    xv[0] = (z1 + gn[c]) / sq;
                                    xv[1] = (z2 + gn[d]) / sq;
                                    acc += gw[a] * gw[b] * gw[c] * gw[d] * g(tv, xv);
                                }
                    grid.v2_[grid.idx2(i1, z1, i2, z2)] = acc / 16.0;
                }
        }
    return grid;
}

KernelGrid KernelGrid::from_cells(
    int k, long n, long site_max,
    const std::function<double(const std::vector<long>&, const std::vector<long>&)>& cell) {
    if (k < 1 || k > 2) throw std::invalid_argument("KernelGrid: k in {1,2}");
    KernelGrid grid;
    grid.k_ = k;
    grid.n_ = n;
    grid.zmax_ = site_max;
    grid.sites_per_row_ = site_max + 1;
    if (k > n) return grid;
    std::vector<long> iv(k), zv(k);
    if (k == 1) {
        grid.v1_.assign(n * grid.sites_per_row_, 0.0);
        for (long i = 1; i <= n; ++i) {
            const long cap = grid.row_cap(i);
            for (long z = -cap; z <= cap; z += 2) {
                iv[0] = i;
                zv[0] = z;
                grid.v1_[grid.idx1(i, z)] = cell(iv, zv);
            }
        }
    } else {
        grid.v2_.assign(n * grid.sites_per_row_ * n * grid.sites_per_row_, 0.0);
        for (long i1 = 1; i1 <= n; ++i1)
            for (long i2 = 1; i2 <= n; ++i2) {
                if (i1 == i2) continue;
                const long c1 = grid.row_cap(i1), c2 = grid.row_cap(i2);
                for (long z1 = -c1; z1 <= c1; z1 += 2)
                    for (long z2 = -c2; z2 <= c2; z2 += 2) {
                        iv = {i1, i2};
                        zv = {z1, z2};
                        grid.v2_[grid.idx2(i1, z1, i2, z2)] = cell(iv, zv);
                    }
            }
    }
    return grid;
}

double u_stat(const KernelGrid& grid, const EnvField& env, bool ordered) {
    if (grid.empty()) return 0.0;
    const long n = grid.n();
    if (n > env.n()) throw std::invalid_argument("u_stat: grid horizon exceeds environment");
    if (grid.site_max() > env.halfwidth())
        throw std::invalid_argument("u_stat: grid support exceeds environment halfwidth");
    const double scale = std::pow(2.0, 0.5 * grid.k());
    if (grid.k() == 1) {
        double acc = 0.0;
        for (long i = 1; i <= n; ++i) {
            const long cap = grid.site_max() - ((grid.site_max() ^ i) & 1);
            for (long z = -cap; z <= cap; z += 2) {
                const double gv = grid.at1(i, z);
                if (gv != 0.0) acc += gv * env.value(static_cast<int>(i), z);
            }
        }
        return scale * acc;
    }
    const double cells = static_cast<double>(n) * (grid.site_max() + 1.0);
    if (cells * cells > 2.5e8) {
        std::ostringstream msg;
        msg << "u_stat: k=2 cost guard exceeded (~" << cells * cells << " cell pairs)";
        throw std::invalid_argument(msg.str());
    }
    double acc = 0.0;
    for (long i1 = 1; i1 <= n; ++i1) {
        const long c1 = grid.site_max() - ((grid.site_max() ^ i1) & 1);
        for (long i2 = ordered ? i1 + 1 : 1; i2 <= n; ++i2) {
            if (i2 == i1) continue;
            const long c2 = grid.site_max() - ((grid.site_max() ^ i2) & 1);
            for (long z1 = -c1; z1 <= c1; z1 += 2) {
                const double w1 = env.value(static_cast<int>(i1), z1);
                for (long z2 = -c2; z2 <= c2; z2 += 2) {
                    const double gv = grid.at2(i1, z1, i2, z2);
                    if (gv != 0.0) acc += gv * w1 * env.value(static_cast<int>(i2), z2);
                }
            }
        }
    }
    return scale * acc;
}

double u_stat_product(const std::vector<KernelGrid>& factors, const EnvField& env) {
    // disjoint time supports make the cross terms vanish exactly
    std::vector<std::pair<long, long>> spans;
    for (const auto& g : factors) {
        if (g.k() != 1) throw std::invalid_argument("u_stat_product: factors must have k = 1");
        long lo = g.n() + 1, hi = 0;
        for (long i = 1; i <= g.n(); ++i) {
            const long cap = g.site_max() - ((g.site_max() ^ i) & 1);
            for (long z = -cap; z <= cap; z += 2)
                if (g.at1(i, z) != 0.0) {
                    lo = std::min(lo, i);
                    hi = std::max(hi, i);
                    break;
                }
        }
        spans.emplace_back(lo, hi);
    }
    for (std::size_t a = 0; a < spans.size(); ++a)
        for (std::size_t b = a + 1; b < spans.size(); ++b)
            if (!(spans[a].second < spans[b].first || spans[b].second < spans[a].first))
                throw std::invalid_argument("u_stat_product: factor time supports overlap");
    double prod = 1.0;
    for (const auto& g : factors) prod *= u_stat(g, env, false);
    return prod;
}

ChaosLayers chaos_layers(const EnvField& env, ChaosTarget target, int max_order) {
    const int h = target.horizon > 0 ? target.horizon : env.n() - target.origin.m;
    if (max_order > h) throw std::invalid_argument("chaos_layers: max order exceeds horizon");
    if (target.origin.m + h > env.n()) throw std::invalid_argument("chaos_layers: horizon exceeds environment");
    if (std::labs(target.origin.y) + h > env.halfwidth())
        throw std::invalid_argument("chaos_layers: walk support exits environment");
    const int K = max_order;
    const long y0 = target.origin.y;

    // U[k] over the current row, sites y0-j .. y0+j
    std::vector<std::vector<double>> cur(K + 1), nxt(K + 1);
    cur[0].assign(1, 1.0);
    for (int k = 1; k <= K; ++k) cur[k].assign(1, 0.0);
    for (int j = 1; j <= h; ++j) {
        const int i = target.origin.m + j;
        for (int k = 0; k <= K; ++k) nxt[k].assign(j + 1, 0.0);
        for (int idx = 0; idx <= j; ++idx) {
            const long x = y0 - j + 2 * idx;
            const double w = env.value(i, x);
            for (int k = K; k >= 0; --k) {
                const double al = (idx >= 1) ? cur[k][idx - 1] : 0.0;
                const double ar = (idx <= j - 1) ? cur[k][idx] : 0.0;
                double v = 0.5 * (al + ar);
                if (k >= 1) {
                    const double bl = (idx >= 1) ? cur[k - 1][idx - 1] : 0.0;
                    const double br = (idx <= j - 1) ? cur[k - 1][idx] : 0.0;
                    v += w * 0.5 * (bl + br);
                }
                nxt[k][idx] = v;
            }
        }
        cur.swap(nxt);
    }

    ChaosLayers out;
    out.n = h;
    out.target = target;
    out.orders.resize(K + 1);
    for (int k = 0; k <= K; ++k) {
        if (target.type == ChaosTarget::Type::point_to_line) {
            double acc = 0.0;
            for (double v : cur[k]) acc += v;
            out.orders[k] = acc;
        } else {
            const long lo = y0 - h;
            const long idx = (target.x - lo) / 2;
            out.orders[k] = (std::labs(target.x - y0) <= h && ((target.x ^ (target.origin.m + h)) & 1) == 0)
                                ? cur[k][idx]
                                : 0.0;
        }
    }
    return out;
}

double ChaosLayers::sum_at(double applied_beta) const {
    // Horner in the applied inverse temperature
    double acc = 0.0;
    for (auto it = orders.rbegin(); it != orders.rend(); ++it) acc = acc * applied_beta + *it;
    return acc;
}

double walk_kernel_u_stat(const EnvField& env, int k) {
    auto layers = chaos_layers(env, ChaosTarget{}, k);
    return std::pow(2.0, -0.5 * k) * layers.orders[k];
}

double chaos_tail_mass(int max_order, double beta) {
    if (beta == 0.0) return 0.0;
    const double lb = std::log(beta * beta);
    double acc = 0.0;
    for (int k = max_order + 1; k < max_order + 4000; ++k) {
        const double term = std::exp(k * lb - std::lgamma(0.5 * k + 1.0));
        acc += term;
        if (term < 1e-300 || (acc > 0.0 && term < 1e-17 * acc)) break;
    }
    return acc;
}

EnumerationReport enumerate_oracle(long n, long width, const KernelGrid& g1,
                                   const KernelGrid& g2) {
    EnumerationReport rep;
    rep.n = n;
    rep.width = width;

    struct Cell {
        long i, z;
    };
    std::vector<Cell> cells;
    for (long i = 1; i <= n; ++i) {
        const long cap = width - ((width ^ i) & 1);
        for (long z = -cap; z <= cap; z += 2) cells.push_back({i, z});
    }
    const int C = static_cast<int>(cells.size());
    if (C > 22) throw std::invalid_argument("enumerate_oracle: too many cells to enumerate");
    rep.cell_count = C;
    rep.env_count = 1L << C;

    // integer monomial sums over all sign patterns
    std::vector<long long> m1(C, 0);
    std::vector<long long> m2(C * C, 0);
    std::vector<long long> m3(C * C * C, 0);
    std::vector<int> sign(C);
    for (long long b = 0; b < rep.env_count; ++b) {
        for (int c = 0; c < C; ++c) sign[c] = (b >> c) & 1 ? 1 : -1;
        for (int c = 0; c < C; ++c) {
            m1[c] += sign[c];
            for (int d = 0; d < C; ++d) {
                m2[c * C + d] += sign[c] * sign[d];
                for (int e = 0; e < C; ++e) m3[(c * C + d) * C + e] += sign[c] * sign[d] * sign[e];
            }
        }
    }

    const double inv_envs = 1.0 / static_cast<double>(rep.env_count);
    const double s1_scale = std::sqrt(2.0);
    const double s2_scale = 2.0;

    auto w1 = [&](int c) { return s1_scale * g1.at1(cells[c].i, cells[c].z); };
    auto w2 = [&](int c, int d) {
        if (cells[c].i == cells[d].i) return 0.0;  // E_2^n excludes equal times
        return s2_scale * g2.at2(cells[c].i, cells[c].z, cells[d].i, cells[d].z);
    };

    for (int c = 0; c < C; ++c) rep.e_s1 += w1(c) * static_cast<double>(m1[c]) * inv_envs;
    for (int c = 0; c < C; ++c)
        for (int d = 0; d < C; ++d) {
            rep.e_s2 += w2(c, d) * static_cast<double>(m2[c * C + d]) * inv_envs;
            rep.e_s1_sq += w1(c) * w1(d) * static_cast<double>(m2[c * C + d]) * inv_envs;
            for (int e = 0; e < C; ++e)
                rep.e_s1s2 +=
                    w1(c) * w2(d, e) * static_cast<double>(m3[(c * C + d) * C + e]) * inv_envs;
        }
    // E[S2^2]: cell quadruple sums reduce to matched pairs
    for (int c = 0; c < C; ++c)
        for (int d = 0; d < C; ++d) {
            const double v = w2(c, d);
            if (v != 0.0) rep.e_s2_sq += v * (v + w2(d, c));
        }

    rep.bound_s1 = std::pow(static_cast<double>(n), 1.5) * g1.l2_norm_sq();
    rep.bound_s2 = std::pow(static_cast<double>(n), 3.0) * g2.l2_norm_sq();
    return rep;
}

std::string EnumerationReport::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["width"] = width;
    j["cells"] = cell_count;
    j["environments"] = env_count;
    j["moments"] = nlohmann::ordered_json::array();
    auto add = [&](const std::string& name, double exact, double bound) {
        nlohmann::ordered_json m;
        m["moment"] = name;
        m["exact_value"] = exact;
        if (bound == bound) m["bound"] = bound;
        j["moments"].push_back(m);
    };
    const double nan = std::nan("");
    add("E[S1]", e_s1, nan);
    add("E[S2]", e_s2, nan);
    add("E[S1*S2]", e_s1s2, nan);
    add("E[S1^2]", e_s1_sq, bound_s1);
    add("E[S2^2]", e_s2_sq, bound_s2);
    return j.dump();
}

}  // namespace polymer::ustat
