#include "polymerlab/transfer.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polymerlab/walk.hpp"

namespace polymer::transfer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogHalf = std::log(0.5);

double log_sum_exp2(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

double log_sum_exp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

}  // namespace

double PartitionField::value(int k, long x) const {
    return log_space ? std::exp(log_value(k, x)) : row(k)[row_index(x, row_min_site(k))];
}

double PartitionField::log_value(int k, long x) const {
    const double v = row(k)[row_index(x, row_min_site(k))];
    if (!log_space) {
        if (v < 0.0) throw std::domain_error("log_value: negative signed value");
        return std::log(v);
    }
    return v;
}

const std::vector<double>& PartitionField::row(int k) const {
    if (stored()) return rows_.at(k);
    if (k != horizon) throw std::logic_error("PartitionField: only the final row is retained in streaming mode");
    return rows_.back();
}

std::vector<double>& PartitionField::mutable_row(int k) {
    return const_cast<std::vector<double>&>(static_cast<const PartitionField*>(this)->row(k));
}

double PartitionField::p2l() const {
    return log_space ? std::exp(log_p2l()) : [this] {
        double acc = 0.0;
        for (double v : row(horizon)) acc += v;
        return acc;
    }();
}

double PartitionField::log_p2l() const {
    if (log_space) return log_sum_exp(row(horizon));
    const double s = p2l();
    if (s <= 0.0) throw std::domain_error("log_p2l: nonpositive point-to-line value");
    return std::log(s);
}

std::vector<std::pair<long, double>> PartitionField::endpoint_density() const {
    const auto& last = row(horizon);
    std::vector<std::pair<long, double>> out;
    out.reserve(last.size());
    const long lo = row_min_site(horizon);
    if (log_space) {
        const double lz = log_sum_exp(last);
        for (std::size_t j = 0; j < last.size(); ++j)
            out.emplace_back(lo + 2 * static_cast<long>(j), std::exp(last[j] - lz));
        return out;
    }
    double z = 0.0;
    for (double v : last) {
        if (form != Form::exponential && v < 0.0)
            throw std::domain_error("endpoint_density: signed field has a negative final row");
        z += v;
    }
    for (std::size_t j = 0; j < last.size(); ++j)
        out.emplace_back(lo + 2 * static_cast<long>(j), last[j] / z);
    return out;
}

PartitionField evolve(const EnvField& env, double beta, Form form, Origin origin,
                      int horizon, Mode mode, std::optional<bool> log_space_opt) {
    if (horizon < 0 || origin.m + horizon > env.n())
        throw std::invalid_argument("evolve: horizon exceeds environment extent");
    if (!((origin.m == 0 && origin.y == 0) ||
          (origin.m >= 1 && EnvField::parity_valid(origin.m, origin.y))))
        throw std::invalid_argument("evolve: origin off-lattice");
    if (std::labs(origin.y) + horizon > env.halfwidth())
        throw std::invalid_argument("evolve: walk support exits the stored environment");

    // Exponential values reach e^{k lambda}; switch to logs before they
    // overflow. Product-form values are signed and stay in linear space.
    bool logs = log_space_opt.value_or(form == Form::exponential &&
                                       (std::fabs(beta) >= 0.5 || horizon >= 1024));
    if (logs && form == Form::product)
        throw std::invalid_argument("evolve: log space is only defined for the exponential form");

    PartitionField out;
    out.form = form;
    out.beta = beta;
    out.log_space = logs;
    out.origin = origin;
    out.horizon = horizon;

    const bool keep_all = (mode == Mode::stored);
    std::vector<double> cur(1, logs ? 0.0 : 1.0);  // delta at the origin
    if (keep_all) out.rows_.push_back(cur);

    std::vector<double> nxt;
    for (int j = 1; j <= horizon; ++j) {
        const int i = origin.m + j;
        nxt.assign(j + 1, 0.0);
        for (int idx = 0; idx <= j; ++idx) {
            const long x = origin.y - j + 2 * idx;
            // previous row spans idx' in [0, j-1]; x -/+ 1 map to idx-1 / idx
            if (logs) {
                const double left = (idx >= 1) ? cur[idx - 1] : kNegInf;
                const double right = (idx <= j - 1) ? cur[idx] : kNegInf;
                nxt[idx] = beta * env.value(i, x) + kLogHalf + log_sum_exp2(left, right);
            } else {
                const double left = (idx >= 1) ? cur[idx - 1] : 0.0;
                const double right = (idx <= j - 1) ? cur[idx] : 0.0;
                const double avg = 0.5 * (left + right);
                const double w = env.value(i, x);
                nxt[idx] = (form == Form::product) ? (1.0 + beta * w) * avg
                                                   : std::exp(beta * w) * avg;
            }
        }
        cur.swap(nxt);
        if (keep_all) out.rows_.push_back(cur);
    }
    if (!keep_all) out.rows_.push_back(std::move(cur));
    return out;
}

double p2l_value(const PartitionField& field) { return field.p2l(); }

double exact_pair_moment(long n, double w) {
    if (n < 0) throw std::invalid_argument("exact_pair_moment: n >= 0");
    // state: difference walk D/2 in [-n, n]; steps -1,0,+1 w.p. 1/4,1/2,1/4
    std::vector<double> v(2 * n + 1, 0.0), nv(2 * n + 1, 0.0);
    v[n] = 1.0;
    for (long i = 1; i <= n; ++i) {
        const long lo = n - i, hi = n + i;
        for (long m = lo; m <= hi; ++m) {
            double acc = 0.5 * v[m];
            if (m > 0) acc += 0.25 * v[m - 1];
            if (m < 2 * n) acc += 0.25 * v[m + 1];
            nv[m] = acc;
        }
        nv[n] *= (1.0 + w);
        for (long m = lo; m <= hi; ++m) v[m] = nv[m];
    }
    double total = 0.0;
    for (double x : v) total += x;
    return total;
}

double exact_second_moment(long n, double beta) { return exact_pair_moment(n, beta * beta); }

double four_param(const EnvField& env, double beta, Form form, int m, long y, int k, long x) {
    if (!(0 <= m && m < k && k <= env.n())) throw std::invalid_argument("four_param: need 0 <= m < k <= n");
    if (!EnvField::parity_valid(k, x) || std::labs(x - y) > k - m) return 0.0;
    auto f = evolve(env, beta, form, Origin{m, y}, k - m, Mode::streaming);
    return f.value(k - m, x);
}

long BackwardField::row_lo(int i) const {
    long h = env_->halfwidth() - (n_ - i);
    h -= (h ^ i) & 1;
    return -h;
}

BackwardField::BackwardField(const EnvField& env, double beta, int n, Form form)
    : env_(&env), beta_(beta), n_(n), form_(form) {
    if (n < 1 || n > env.n()) throw std::invalid_argument("BackwardField: bad horizon");
    log_rows_.resize(n + 1);
    for (int i = n; i >= 0; --i) {
        const long lo = row_lo(i);
        const long count = -lo + 1;
        auto& r = log_rows_[i];
        r.assign(static_cast<std::size_t>(count), 0.0);
        if (i == n) continue;  // B(n,.) = 1
        const long lo1 = row_lo(i + 1);
        const auto& up = log_rows_[i + 1];
        for (long j = 0; j < count; ++j) {
            const long x = lo + 2 * j;
            double lw[2];
            int c = 0;
            for (int step = -1; step <= 1; step += 2) {
                const long xs = x + step;
                const long uj = (xs - lo1) / 2;
                if (uj < 0 || uj >= static_cast<long>(up.size())) continue;
                const double w = env_->value(i + 1, xs);
                double logw;
                if (form_ == Form::exponential) {
                    logw = beta_ * w;
                } else {
                    if (1.0 + beta_ * w <= 0.0)
                        throw std::domain_error(
                            "BackwardField: nonpositive product-form weight, conditioning undefined");
                    logw = std::log1p(beta_ * w);
                }
                lw[c++] = logw + up[uj];
            }
            double acc = (c == 0) ? kNegInf : (c == 1 ? lw[0] : log_sum_exp2(lw[0], lw[1]));
            r[j] = kLogHalf + acc;
        }
    }
}

double BackwardField::log_value(int i, long x) const {
    const long lo = row_lo(i);
    const long j = (x - lo) / 2;
    if (i < 0 || i > n_ || j < 0 || j >= static_cast<long>(log_rows_[i].size()) ||
        !EnvField::parity_valid(i, x))
        throw std::invalid_argument("BackwardField: query off the stored lattice");
    return log_rows_[i][j];
}

double BackwardField::value(int i, long x) const { return std::exp(log_value(i, x)); }

double BackwardField::transition_prob(int i, long x, int step) const {
    if (step != 1 && step != -1) throw std::invalid_argument("transition_prob: step must be +/-1");
    if (i < 0 || i >= n_) throw std::invalid_argument("transition_prob: need 0 <= i < n");
    const double w = env_->value(i + 1, x + step);
    const double logw = (form_ == Form::exponential) ? beta_ * w : std::log1p(beta_ * w);
    return std::exp(kLogHalf + logw + log_value(i + 1, x + step) - log_value(i, x));
}

double BackwardField::multi_step_prob(int m, long y, int k, long x) const {
    const double z = four_param(*env_, beta_, form_, m, y, k, x);
    if (z == 0.0) return 0.0;
    return z * std::exp(log_value(k, x) - log_value(m, y));
}

RescaledField::RescaledField(const EnvField& env, double beta0, long n)
    : n_(n),
      sqrt_n_(std::sqrt(static_cast<double>(n))),
      field_(evolve(env, beta0 * std::pow(static_cast<double>(n), -0.25), Form::product,
                    Origin{0, 0}, static_cast<int>(n), Mode::stored)) {}

double RescaledField::lattice(int k, long z) const {
    if (std::labs(z) > k) return (k == 0 && z == 0) ? sqrt_n_ : 0.0;
    return sqrt_n_ * field_.value(k, z);
}

double RescaledField::level_interp(int k, double xs) const {
    // linear interpolation between the two parity sites bracketing xs
    const long p = k & 1;
    const long z0 = 2 * static_cast<long>(std::floor((xs - p) / 2.0)) + p;
    const double w = (xs - static_cast<double>(z0)) / 2.0;
    const double a = (std::labs(z0) <= k) ? field_.value(k, z0) : 0.0;
    const double b = (std::labs(z0 + 2) <= k) ? field_.value(k, z0 + 2) : 0.0;
    return (1.0 - w) * a + w * b;
}

double RescaledField::operator()(double t, double x) const {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("RescaledField: t in [0,1]");
    const double tn = t * static_cast<double>(n_);
    int k = static_cast<int>(std::floor(tn));
    if (k >= n_) k = static_cast<int>(n_) - 1;
    const double theta = tn - k;
    const double xs = x * sqrt_n_;
    double v0;
    if (k == 0) {
        // row 0: the origin delta smeared over its interpolation cell
        v0 = std::max(0.0, 1.0 - std::fabs(xs) / 2.0);
    } else {
        v0 = level_interp(k, xs);
    }
    const double v1 = level_interp(k + 1, xs);
    return sqrt_n_ * ((1.0 - theta) * v0 + theta * v1);
}

double duhamel_residual(const EnvField& env, double beta0, long n) {
    if (n > 512) throw std::invalid_argument("duhamel_residual: n <= 512 (verification cost)");
    const double beta = beta0 * std::pow(static_cast<double>(n), -0.25);
    auto field = evolve(env, beta, Form::product, Origin{0, 0}, static_cast<int>(n), Mode::stored);
    const double sqn = std::sqrt(static_cast<double>(n));

    // source term f_i(w) = beta * w(i,w) * zbar(i-1,w)
    auto zbar = [&](int i, long w) {
        const double l = (std::labs(w - 1) <= i) ? field.value(i, w - 1) : 0.0;
        const double r = (std::labs(w + 1) <= i) ? field.value(i, w + 1) : 0.0;
        return 0.5 * (l + r);
    };

    double residual = 0.0;
    if (n <= 64) {
        // independent direct summation at every lattice point
        for (int k = 0; k <= n; ++k) {
            for (long z = -k; z <= k; z += 2) {
                double conv = 0.0;
                for (int i = 1; i <= k; ++i)
                    for (long w = -i; w <= i; w += 2) {
                        const double pw = walk::rw_pmf(k - i, z - w);
                        if (pw == 0.0) continue;
                        conv += env.value(i, w) * zbar(i - 1, w) * pw;
                    }
                const double gap =
                    std::fabs(field.value(k, z) - walk::rw_pmf(k, z) - beta * conv);
                residual = std::max(residual, sqn * gap);
            }
        }
        return residual;
    }

    // heat-flow accumulation of the source, checked everywhere, plus a direct
    // final-row spot check (O(n^3))
    std::vector<double> R(1, 0.0), Rn;
    for (int i = 1; i <= n; ++i) {
        Rn.assign(i + 1, 0.0);
        for (int idx = 0; idx <= i; ++idx) {
            const long x = -i + 2 * idx;
            const double left = (idx >= 1) ? R[idx - 1] : 0.0;
            const double right = (idx <= i - 1) ? R[idx] : 0.0;
            Rn[idx] = 0.5 * (left + right) + beta * env.value(i, x) * zbar(i - 1, x);
        }
        R.swap(Rn);
        for (int idx = 0; idx <= i; ++idx) {
            const long x = -i + 2 * idx;
            const double gap = std::fabs(field.value(i, x) - walk::rw_pmf(i, x) - R[idx]);
            residual = std::max(residual, sqn * gap);
        }
    }
    for (long z = -n; z <= n; z += 2 * std::max<long>(1, n / 16)) {
        double conv = 0.0;
        for (int i = 1; i <= n; ++i)
            for (long w = -i; w <= i; w += 2) {
                const double pw = walk::rw_pmf(n - i, z - w);
                if (pw == 0.0) continue;
                conv += env.value(i, w) * zbar(i - 1, w) * pw;
            }
        const double gap =
            std::fabs(field.value(static_cast<int>(n), z) - walk::rw_pmf(n, z) - beta * conv);
        residual = std::max(residual, sqn * gap);
    }
    return residual;
}

}  // namespace polymer::transfer
