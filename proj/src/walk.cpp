#include "polymerlab/walk.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polymer::walk {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLog2 = std::log(2.0);

// C(i,k) exactly in a double; valid up to i = 50 (max value C(50,25) and all
// intermediates stay below 2^53).
double binom_exact(long i, long k) {
    if (k < 0 || k > i) return 0.0;
    if (k > i - k) k = i - k;
    double c = 1.0;
    for (long j = 1; j <= k; ++j) c = c * static_cast<double>(i - k + j) / static_cast<double>(j);
    return c;
}

}  // namespace

namespace {

// Stirling tail s(z) = 1/(12z) - 1/(360 z^3) + 1/(1260 z^5)
double stirling_tail(double z) {
    const double z2 = z * z;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / (1260.0 * z2)) / z2) / z;
}

// log( 2^{-i} C(i, floor(i/2)) ) without large-term cancellation
double log_central(long i) {
    const long m = i / 2;
    const double S = stirling_tail(2.0 * m) - 2.0 * stirling_tail(static_cast<double>(m));
    double v = -0.5 * std::log(M_PI * static_cast<double>(m)) + S;
    if (i & 1) v += std::log((2.0 * m + 1.0) / (2.0 * (m + 1.0)));
    return v;
}

}  // namespace

double rw_log_pmf(long i, long x) {
    if (i < 0) throw std::invalid_argument("rw_pmf: negative step count");
    if (((i ^ x) & 1) != 0 || std::labs(x) > i) return kNegInf;
    if (i == 0) return 0.0;
    long k = (i + x) / 2;
    if (2 * k > i) k = i - k;  // symmetry
    const long k0 = i / 2;
    double v = log_central(i);
    // march from the central column: C(i,k-1)/C(i,k) = k/(i-k+1)
    for (long kk = k0; kk > k; --kk)
        v += std::log(static_cast<double>(kk) / static_cast<double>(i - kk + 1));
    return v;
}

double rw_pmf(long i, long x) {
    if (i < 0) throw std::invalid_argument("rw_pmf: negative step count");
    if (((i ^ x) & 1) != 0 || std::labs(x) > i) return 0.0;
    if (i <= 50) return std::ldexp(binom_exact(i, (i + x) / 2), static_cast<int>(-i));
    return std::exp(rw_log_pmf(i, x));
}

long parity_round(double x, long i) {
    if (i < 1) throw std::invalid_argument("parity_round: need i >= 1");
    const long p = i & 1;
    const double y = (x - static_cast<double>(p)) / 2.0;
    return 2 * static_cast<long>(std::floor(y + 0.5)) + p;
}

double heat_kernel(double t, double x) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: need t > 0");
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
}

void SimplexPoint::validate() const {
    if (times.size() != positions.size())
        throw std::invalid_argument("SimplexPoint: times/positions length mismatch");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev)) throw std::invalid_argument("SimplexPoint: times must be strictly increasing from 0");
        prev = t;
    }
    if (!times.empty() && times.back() > 1.0)
        throw std::invalid_argument("SimplexPoint: times must lie in (0,1]");
}

double heat_kernel_k(const SimplexPoint& point) {
    point.validate();
    double v = 1.0, t0 = 0.0, x0 = 0.0;
    for (int j = 0; j < point.order(); ++j) {
        v *= heat_kernel(point.times[j] - t0, point.positions[j] - x0);
        t0 = point.times[j];
        x0 = point.positions[j];
    }
    return v;
}

double discrete_kernel_pkn(int k, long n, const SimplexPoint& point, bool rescaled) {
    point.validate();
    if (point.order() != k) throw std::invalid_argument("discrete_kernel_pkn: order mismatch");
    if (k > n) return 0.0;  // D_k^n is empty
    const double sqn = std::sqrt(static_cast<double>(n));
    long prev_i = 0, prev_x = 0;
    double v = 1.0;
    for (int j = 0; j < k; ++j) {
        const long ij = static_cast<long>(std::ceil(static_cast<double>(n) * point.times[j]));
        if (ij <= prev_i || ij > n) return 0.0;  // ceil(n t) not in D_k^n
        const long xj = parity_round(point.positions[j] * sqn, ij);
        v *= 0.5 * rw_pmf(ij - prev_i, xj - prev_x);
        prev_i = ij;
        prev_x = xj;
    }
    if (rescaled) v *= std::pow(static_cast<double>(n), 0.5 * k);
    return v;
}

double bridge_kernel(const std::vector<long>& times, const std::vector<long>& sites,
                     long n, long x) {
    if (times.size() != sites.size()) throw std::invalid_argument("bridge_kernel: length mismatch");
    const double pn = rw_pmf(n, x);
    if (pn <= 0.0) throw std::domain_error("bridge_kernel: conditioning on a null event, p(n,x) = 0");
    long prev_i = 0, prev_x = 0;
    double v = 1.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (times[j] <= prev_i || times[j] > n)
            throw std::invalid_argument("bridge_kernel: times must be strictly increasing in [1,n]");
        v *= rw_pmf(times[j] - prev_i, sites[j] - prev_x);
        prev_i = times[j];
        prev_x = sites[j];
    }
    return v * rw_pmf(n - prev_i, x - prev_x) / pn;
}

double fock_norm(int k) {
    if (k < 0) throw std::invalid_argument("fock_norm: k >= 0");
    return std::exp(-k * kLog2 - std::lgamma(0.5 * k + 1.0));
}

double fock_norm_bridge(int k, double y) {
    if (k < 0) throw std::invalid_argument("fock_norm_bridge: k >= 0");
    return std::exp(-y * y - (k + 0.5) * kLog2 - std::lgamma(0.5 * (k + 1.0)));
}

double llt_gap(long n) {
    if (n < 2 || (n & 1)) throw std::invalid_argument("llt_gap: need even n >= 2");
    const double sqn = std::sqrt(static_cast<double>(n));
    const long xmax = static_cast<long>(4.0 * sqn);
    double gap = 0.0;
    for (long x = -xmax + ((xmax ^ n) & 1 ? 1 : 0); x <= xmax; x += 2) {
        const double d = std::fabs(0.5 * sqn * rw_pmf(n, x) - heat_kernel(1.0, x / sqn));
        if (d > gap) gap = d;
    }
    return gap;
}

double meet_prob(long m) { return rw_pmf(2 * m, 0); }

double pkn_norm_sq(int k, long n) {
    if (k < 0) throw std::invalid_argument("pkn_norm_sq: k >= 0");
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    std::vector<double> c(n + 1, 0.0);
    for (long m = 1; m <= n; ++m) c[m] = meet_prob(m);
    // f[t] = sum over i_1<...<i_j=t of prod c(increments)
    std::vector<double> f(c.begin(), c.end());
    for (int j = 2; j <= k; ++j) {
        std::vector<double> g(n + 1, 0.0);
        for (long t = j; t <= n; ++t) {
            double acc = 0.0;
            for (long s = j - 1; s < t; ++s) acc += f[s] * c[t - s];
            g[t] = acc;
        }
        f.swap(g);
    }
    double total = 0.0;
    for (long t = k; t <= n; ++t) total += f[t];
    return std::ldexp(total, -k) * std::pow(static_cast<double>(n), -0.5 * k);
}

}  // namespace polymer::walk
