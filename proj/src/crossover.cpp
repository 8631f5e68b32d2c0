#include "polymerlab/crossover.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "polymerlab/rng.hpp"

namespace polymer::crossover {

namespace detail {

namespace {

const double kSqrtPi = std::sqrt(M_PI);
// Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
const double kAi0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
const double kAip0 = -std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);

// u_k of the Airy asymptotic expansions; v_k = u_k (6k+1)/(1-6k)
constexpr int kMaxU = 40;
struct UTab {
    double u[kMaxU];
    double v[kMaxU];
    UTab() {
        u[0] = v[0] = 1.0;
        for (int k = 1; k < kMaxU; ++k) {
            u[k] = u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
                   (216.0 * k * (2.0 * k - 1.0));
            v[k] = u[k] * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
        }
    }
};
const UTab kU;

AiryValue airy_asymptotic_pos(double x) {
    const double xi = (2.0 / 3.0) * x * std::sqrt(x);
    double sa = 0.0, sp = 0.0, term = 1.0, prev = 1e300;
    for (int k = 0; k < kMaxU; ++k) {
        const double ta = kU.u[k] * term;
        if (std::fabs(ta) > prev) break;  // optimal truncation reached
        sa += (k % 2 ? -ta : ta);
        sp += (k % 2 ? -kU.v[k] * term : kU.v[k] * term);
        prev = std::fabs(ta);
        term /= xi;
        if (prev < 1e-18 * std::fabs(sa)) break;
    }
    const double x14 = std::pow(x, 0.25);
    const double e = std::exp(-xi);
    return {e / (2.0 * kSqrtPi * x14) * sa, -x14 * e / (2.0 * kSqrtPi) * sp};
}

// DLMF 9.7.9 / 9.7.10
AiryValue airy_asymptotic_neg(double x) {
    const double z = -x;
    const double zeta = (2.0 / 3.0) * z * std::sqrt(z);
    const double z2 = zeta * zeta;
    double pe = 0.0, po = 0.0, re = 0.0, ro = 0.0, t = 1.0;
    for (int k = 0; 2 * k + 1 < kMaxU; ++k) {
        const double sg = (k % 2) ? -1.0 : 1.0;
        pe += sg * kU.u[2 * k] * t;
        re += sg * kU.v[2 * k] * t;
        po += sg * kU.u[2 * k + 1] * t / zeta;
        ro += sg * kU.v[2 * k + 1] * t / zeta;
        t /= z2;
        if (kU.u[2 * k + 1] * t < 1e-18) break;
    }
    const double w = zeta - 0.25 * M_PI;
    const double cw = std::cos(w), sw = std::sin(w);
    const double z14 = std::pow(z, 0.25);
    return {(cw * pe + sw * po) / (kSqrtPi * z14), z14 / kSqrtPi * (sw * re - cw * ro)};
}

// Gauss-Legendre nodes/weights on [0,1], increasing.
void gauss_legendre_unit(int m, std::vector<double>& nodes, std::vector<double>& weights) {
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
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * pp * pp);
    }
}

struct Quadrature {
    std::vector<double> x, w;
};

// Nystrom nodes on (a, a+L): Gauss-Legendre after the exponential change of
// variables x = a + L (e^{cu}-1)/(e^c-1).
Quadrature domain_nodes(double a, double L, int m) {
    const double c = 2.0;
    std::vector<double> un, uw;
    gauss_legendre_unit(m, un, uw);
    Quadrature q;
    q.x.resize(m);
    q.w.resize(m);
    const double denom = std::expm1(c);
    for (int i = 0; i < m; ++i) {
        const double e = std::exp(c * un[i]);
        q.x[i] = a + L * (e - 1.0) / denom;
        q.w[i] = uw[i] * L * c * e / denom;
    }
    return q;
}

// Panel Gauss quadrature on [0, t_max]; panel width tracks the oscillation of
// the mirrored argument a - t.
Quadrature t_panels(double a, double t_max) {
    std::vector<double> gn, gw;
    gauss_legendre_unit(12, gn, gw);
    Quadrature q;
    double u = 0.0;
    while (u < t_max) {
        const double osc = std::max(4.0, u - a);
        const double w = std::min(2.0, 2.0 * M_PI / std::sqrt(osc));
        const double hi = std::min(u + w, t_max);
        for (std::size_t i = 0; i < gn.size(); ++i) {
            q.x.push_back(u + (hi - u) * gn[i]);
            q.w.push_back((hi - u) * gw[i]);
        }
        u = hi;
    }
    return q;
}

struct SigmaOperator {
    Eigen::MatrixXd id_minus_k;
    Eigen::VectorXd b;  // sqrt(W_i) Ai(x_i)
};

// K_sigma(x,y) = P.V. int sigma(t) Ai(x+t) Ai(y+t) dt, realized by the pole
// split: the 1/(kappa t) part cancels between the +t and -t node pairs of the
// shared panel grid, the remainder integrates as an ordinary quadrature.
SigmaOperator assemble_sigma(double a, double kappa, double L, double T, int m) {
    const Quadrature dom = domain_nodes(a, L, m);
    const double t_pos = std::max(T, 14.0 - a);
    const double t_neg = std::max(T, 20.7 / kappa);
    const Quadrature tq = t_panels(a, std::max(t_pos, t_neg));
    const int P = static_cast<int>(tq.x.size());

    Eigen::MatrixXd Apos = Eigen::MatrixXd::Zero(P, m), Aneg = Eigen::MatrixXd::Zero(P, m);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(P), gamma = Eigen::VectorXd::Zero(P);
    for (int qi = 0; qi < P; ++qi) {
        const double t = tq.x[qi];
        if (t <= t_pos) {
            alpha(qi) = tq.w[qi] * sigma(kappa, t);
            for (int i = 0; i < m; ++i) Apos(qi, i) = airy_core(dom.x[i] + t).ai;
        }
        if (t <= t_neg) {
            gamma(qi) = tq.w[qi] * sigma(kappa, -t);
            for (int i = 0; i < m; ++i) Aneg(qi, i) = airy_core(dom.x[i] - t).ai;
        }
    }
    Eigen::MatrixXd K = Apos.transpose() * alpha.asDiagonal() * Apos +
                        Aneg.transpose() * gamma.asDiagonal() * Aneg;

    SigmaOperator op;
    op.b.resize(m);
    Eigen::VectorXd sw(m);
    for (int i = 0; i < m; ++i) {
        sw(i) = std::sqrt(dom.w[i]);
        op.b(i) = sw(i) * airy_core(dom.x[i]).ai;
    }
    op.id_minus_k =
        Eigen::MatrixXd::Identity(m, m) - sw.asDiagonal() * K * sw.asDiagonal();
    return op;
}

}  // namespace

double airy_series(double x, double* aip) {
    double f = 1.0, g = x, fp = 0.0, gp = 1.0;
    double tf = 1.0, tg = x;
    const double x3 = x * x * x;
    for (int m = 1; m < 400; ++m) {
        tf *= x3 / ((3.0 * m - 1.0) * (3.0 * m));
        tg *= x3 / ((3.0 * m) * (3.0 * m + 1.0));
        f += tf;
        g += tg;
        if (x != 0.0) {
            fp += tf * (3.0 * m) / x;
            gp += tg * (3.0 * m + 1.0) / x;
        }
        if (std::fabs(tf) + std::fabs(tg) < 1e-18 * (std::fabs(f) + std::fabs(g) + 1.0)) break;
    }
    if (aip) *aip = kAi0 * fp + kAip0 * gp;
    return kAi0 * f + kAip0 * g;
}

AiryValue airy_core(double x) {
    if (x > 8.5) return airy_asymptotic_pos(x);
    if (x < -8.5) return airy_asymptotic_neg(x);
    AiryValue v;
    v.ai = airy_series(x, &v.aip);
    return v;
}

double sigma(double kappa, double t) { return 1.0 / (-std::expm1(-kappa * t)); }

double sigma_smooth(double kappa, double t) {
    const double z = kappa * t;
    if (std::fabs(z) < 1e-3) return 0.5 + z / 12.0 - z * z * z / 720.0;
    return sigma(kappa, t) - 1.0 / z;
}

double tw_kernel(double x, double y) {
    const AiryValue ax = airy_core(x);
    if (x == y) return ax.aip * ax.aip - x * ax.ai * ax.ai;
    const AiryValue ay = airy_core(y);
    return (ax.ai * ay.aip - ax.aip * ay.ai) / (x - y);
}

KernelEval sigma_kernel_eval(double a, const CrossoverParams& p, bool refine, bool dense_check) {
    const int m = refine ? 2 * p.quad_order : p.quad_order;
    const double L = refine ? 2.0 * p.domain_cap : p.domain_cap;
    const double T = refine ? 2.0 * p.t_trunc : p.t_trunc;
    const SigmaOperator op = assemble_sigma(a, p.kappa(), L, T, m);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(op.id_minus_k);
    KernelEval out;
    out.det = lu.determinant();
    out.trace_solve = op.b.dot(lu.solve(op.b));
    out.trace_dense = out.trace_solve;
    if (dense_check) {
        const Eigen::MatrixXd inv = op.id_minus_k.inverse();
        out.trace_dense = (inv * (op.b * op.b.transpose())).trace();
    }
    return out;
}

double sigma_kernel_det_minus_rank1(double a, const CrossoverParams& p) {
    const SigmaOperator op =
        assemble_sigma(a, p.kappa(), p.domain_cap, p.t_trunc, p.quad_order);
    const Eigen::MatrixXd M = op.id_minus_k - op.b * op.b.transpose();
    return Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
}

}  // namespace detail

AiryValue airy(double x) {
    if (x > 50.0) return {0.0, 0.0};  // far below double underflow of e^{-xi}
    if (x < -50.0) throw std::domain_error("airy: |x| <= 50 on the public surface");
    return detail::airy_core(x);
}

double CrossoverParams::kappa() const { return 2.0 * std::pow(beta, 4.0 / 3.0); }

void CrossoverParams::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("CrossoverParams: beta > 0");
    if (quad_order < 8) throw std::invalid_argument("CrossoverParams: quad_order >= 8");
    if (!(domain_cap > 4.0)) throw std::invalid_argument("CrossoverParams: domain_cap > 4");
    if (!(t_trunc > 4.0)) throw std::invalid_argument("CrossoverParams: t_trunc > 4");
}

FredholmResult tw_gue_cdf(double s, int quad_order) {
    if (!(s >= -8.0 && s <= 4.0)) throw std::domain_error("tw_gue_cdf: s in [-8, 4]");
    auto eval = [&](int m, double L) {
        const auto dom = detail::domain_nodes(s, L, m);
        Eigen::MatrixXd M(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= i; ++j) {
                const double v =
                    std::sqrt(dom.w[i] * dom.w[j]) * detail::tw_kernel(dom.x[i], dom.x[j]);
                M(i, j) = (i == j ? 1.0 : 0.0) - v;
                M(j, i) = M(i, j);
            }
        return Eigen::PartialPivLU<Eigen::MatrixXd>(M).determinant();
    };
    const double coarse = eval(quad_order, 12.0);
    const double fine = eval(2 * quad_order, 24.0);
    FredholmResult r;
    r.value = fine;
    r.self_convergence = std::fabs(fine - coarse);
    r.flagged = !std::isfinite(fine) || r.self_convergence > 1e-6;
    return r;
}

std::shared_ptr<const CrossoverTable> CrossoverTable::build(const CrossoverParams& params) {
    params.validate();
    auto table = std::make_shared<CrossoverTable>(CrossoverTable{});
    table->params_ = params;

    auto phi = [&](double a, bool refine) {
        const auto ev = detail::sigma_kernel_eval(a, params, refine);
        return ev.det * ev.trace_solve;
    };

    // support of the density of a = kappa^{-1} r (f can oscillate, scan |phi|)
    double lo = -4.0, hi = 4.0;
    while (lo > -60.0 && std::fabs(phi(lo, false)) > 1e-10) lo -= 2.0;
    while (hi < 60.0 && std::fabs(phi(hi, false)) > 1e-10) hi += 2.0;
    lo -= 2.0;
    hi += 1.0;

    const double step = 0.05;
    long count = static_cast<long>(std::ceil((hi - lo) / step));
    count += count % 2;  // even panel count for Simpson
    table->a_lo_ = lo;
    table->a_hi_ = lo + count * step;
    table->step_ = step;
    table->phi_base_.resize(count + 1);
    table->phi_fine_.resize(count + 1);
    for (long j = 0; j <= count; ++j) {
        const double a = lo + j * step;
        table->phi_base_[j] = phi(a, false);
        table->phi_fine_[j] = phi(a, true);
    }
    auto cumulate = [&](const std::vector<double>& f, std::vector<double>& c) {
        c.assign(f.size(), 0.0);
        for (std::size_t j = 2; j < f.size(); j += 2)
            c[j] = c[j - 2] + step / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
        // odd points: integral of the local quadratic over the first half-panel
        for (std::size_t j = 1; j < f.size(); j += 2) {
            const double fr = (j + 1 < f.size()) ? f[j + 1] : f[j];
            c[j] = c[j - 1] + step / 12.0 * (5.0 * f[j - 1] + 8.0 * f[j] - fr);
        }
        return c.back();
    };
    table->mass_base_ = cumulate(table->phi_base_, table->cdf_base_);
    table->mass_fine_ = cumulate(table->phi_fine_, table->cdf_fine_);
    if (!std::isfinite(table->mass_fine_) || std::fabs(table->mass_fine_ - 1.0) > 5e-2)
        table->flagged_ = true;
    return table;
}

double CrossoverTable::cdf_at(const std::vector<double>& c, double a) const {
    if (a <= a_lo_) return 0.0;
    if (a >= a_hi_) return c.back();
    const double pos = (a - a_lo_) / step_;
    const std::size_t j = std::min(static_cast<std::size_t>(pos), c.size() - 2);
    const double w = pos - static_cast<double>(j);
    return (1.0 - w) * c[j] + w * c[j + 1];
}

double CrossoverTable::integral_self_convergence() const {
    return std::fabs(mass_fine_ - mass_base_);
}

// G(s) = E_V[ F_a((V + s - c_beta)/kappa) ], V standard Gumbel. This is the
// integral form with the r-orientation fixed so G is a distribution function
// with the correct small- and large-beta limits.
double CrossoverTable::gumbel_mix(const std::vector<double>& c, double s) const {
    const double kappa = params_.kappa();
    const double cbeta = 0.5 * std::log(32.0 * M_PI * std::pow(params_.beta, 4.0));
    static const std::vector<double> gn = {0.033765242898424, 0.169395306766868,
                                           0.380690406958402, 0.619309593041598,
                                           0.830604693233132, 0.966234757101576};
    static const std::vector<double> gw = {0.085662246189585, 0.180380786524069,
                                           0.233956967286345, 0.233956967286345,
                                           0.180380786524069, 0.085662246189585};
    const double v_lo = -4.0, v_hi = 34.0;
    const double h = std::min(0.5, kappa / 4.0);
    const int panels = static_cast<int>(std::ceil((v_hi - v_lo) / h));
    const double hh = (v_hi - v_lo) / panels;
    double acc = 0.0;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double base = v_lo + pnl * hh;
        for (std::size_t q = 0; q < gn.size(); ++q) {
            const double v = base + hh * gn[q];
            const double pdf = std::exp(-v - std::exp(-v));
            acc += hh * gw[q] * pdf * cdf_at(c, (v + s - cbeta) / kappa);
        }
    }
    return acc / (std::exp(-std::exp(-v_hi)) - std::exp(-std::exp(-v_lo)));
}

FredholmResult CrossoverTable::cdf(double s) const {
    FredholmResult r;
    const double base = gumbel_mix(cdf_base_, s);
    const double fine = gumbel_mix(cdf_fine_, s);
    r.value = fine;
    r.self_convergence = std::fabs(fine - base);
    r.flagged = flagged_ || !std::isfinite(fine);
    return r;
}

FredholmResult CrossoverTable::pdf(double r) const { return crossover_pdf(r, params_); }

FredholmResult crossover_pdf(double r, const CrossoverParams& params) {
    params.validate();
    const double kappa = params.kappa();
    const double a = r / kappa;
    const auto base = detail::sigma_kernel_eval(a, params, false);
    const auto fine = detail::sigma_kernel_eval(a, params, true);
    FredholmResult out;
    out.value = fine.det * fine.trace_solve / kappa;
    out.self_convergence = std::fabs(out.value - base.det * base.trace_solve / kappa);
    out.flagged = !std::isfinite(out.value) || out.self_convergence > 1e-3;
    return out;
}

FredholmResult crossover_cdf(double s, const CrossoverParams& params) {
    return CrossoverTable::build(params)->cdf(s);
}

double gue_asymp_gap(double beta, const std::vector<double>& s_grid,
                     const CrossoverParams& base) {
    CrossoverParams p = base;
    p.beta = beta;
    auto table = CrossoverTable::build(p);
    const double scale_g = std::pow(2.0, 4.0 / 3.0) * std::pow(beta, 4.0 / 3.0);
    const double scale_f = std::pow(2.0, 1.0 / 3.0);
    double gap = 0.0;
    for (double s : s_grid) {
        const double g = table->cdf(scale_g * s).value;
        const double f = tw_gue_cdf(scale_f * s, p.quad_order).value;
        gap = std::max(gap, std::fabs(g - f));
    }
    return gap;
}

std::vector<double> small_beta_gaps(const std::vector<double>& beta_list,
                                    const std::vector<double>& s_grid, CrossoverParams base) {
    std::vector<double> gaps;
    for (double beta : beta_list) {
        CrossoverParams p = base;
        p.beta = beta;
        auto table = CrossoverTable::build(p);
        const double scale = std::sqrt(2.0) * std::pow(M_PI, 0.25) * beta;
        double gap = 0.0;
        for (double s : s_grid)
            gap = std::max(gap, std::fabs(table->cdf(scale * s).value - normal_cdf(s)));
        gaps.push_back(gap);
    }
    return gaps;
}

}  // namespace polymer::crossover
