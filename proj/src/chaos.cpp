#include "polymerlab/chaos.hpp"

#include <cmath>
#include <stdexcept>

#include "polymerlab/stats.hpp"
#include "polymerlab/walk.hpp"

namespace polymer::chaos {

LimitSeries limit_variance_series(double beta, double tol) {
    if (beta < 0.0) throw std::invalid_argument("limit_variance: beta >= 0");
    LimitSeries out{0.0, 0.0, 0};
    if (beta == 0.0) return out;
    const double lb2 = std::log(beta * beta);
    double sum = 0.0;
    int k = 1;
    for (; k < 100000; ++k) {
        const double term = std::exp(k * lb2 - std::lgamma(0.5 * k + 1.0));
        sum += term;
        // ratio of successive terms decays like beta^2 / sqrt(k/2)
        const double ratio = beta * beta * std::exp(std::lgamma(0.5 * k + 1.0) -
                                                    std::lgamma(0.5 * (k + 1) + 1.0));
        if (ratio < 0.5) {
            const double tail = term * ratio / (1.0 - ratio);
            if (tail < tol * std::max(1.0, sum)) {
                out.tail_bound = tail;
                break;
            }
        }
    }
    out.value = sum;
    out.terms = k;
    return out;
}

double limit_variance(double beta) { return limit_variance_series(beta).value; }

double limit_variance_closed(double beta) {
    const double b2 = beta * beta;
    return std::expm1(b2 * b2) + std::exp(b2 * b2) * std::erf(b2);
}

std::vector<double> sample_p2l(const EnvSpec& spec, long n, double beta0, double alpha,
                               long replicas, std::uint64_t seed, transfer::Form form) {
    const double applied = beta0 * std::pow(static_cast<double>(n), -alpha);
    std::vector<double> out(replicas);
    const double nlam = (form == transfer::Form::exponential)
                            ? static_cast<double>(n) * spec.log_mgf(applied)
                            : 0.0;
    stats::parallel_for(replicas, [&](long r) {
        const auto env = EnvField::sample(spec, static_cast<int>(n), static_cast<int>(n),
                                          derive_seed(seed, static_cast<std::uint64_t>(r)));
        auto f = transfer::evolve(env, applied, form, {}, static_cast<int>(n));
        out[r] = (form == transfer::Form::exponential) ? std::exp(f.log_p2l() - nlam) : f.p2l();
    });
    return out;
}

SelfConvergence self_convergence(double beta0, const std::vector<long>& n_list, long replicas,
                                 std::uint64_t seed, const std::vector<EnvSpec>& kinds) {
    if (n_list.size() < 2) throw std::invalid_argument("self_convergence: need at least two n");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("self_convergence: n_list must increase");
    SelfConvergence out;
    out.n_list = n_list;
    std::vector<std::vector<double>> samples(n_list.size());
    for (std::size_t j = 0; j < n_list.size(); ++j)
        samples[j] = sample_p2l(kinds.at(0), n_list[j], beta0, 0.25, replicas,
                                derive_seed(seed, j));
    for (std::size_t j = 0; j + 1 < n_list.size(); ++j) {
        out.ks_consecutive.push_back(stats::ks_two_sample(samples[j], samples[j + 1]));
        out.ks_null_q99.push_back(
            stats::ks_null_quantile_two_sample(samples[j].size(), samples[j + 1].size()));
    }
    if (kinds.size() > 1) {
        auto other = sample_p2l(kinds.at(1), n_list.back(), beta0, 0.25, replicas,
                                derive_seed(seed, 1000 + n_list.size()));
        out.ks_cross_kind = stats::ks_two_sample(samples.back(), other);
        out.ks_cross_null_q99 =
            stats::ks_null_quantile_two_sample(samples.back().size(), other.size());
    }
    return out;
}

AProcessSample a_process_sample(const EnvField& env, double beta0, long n,
                                const std::vector<double>& x_grid) {
    for (double x : x_grid)
        if (std::fabs(x) > 3.0)
            throw std::invalid_argument("a_process_sample: grid points must satisfy |x| <= 3");
    const double applied = beta0 * std::pow(static_cast<double>(n), -0.25);
    auto f = transfer::evolve(env, applied, transfer::Form::product, {}, static_cast<int>(n));
    const auto& last = f.row(static_cast<int>(n));
    const double sqn = std::sqrt(static_cast<double>(n));

    AProcessSample out;
    out.x_grid = x_grid;
    out.n = n;
    out.beta0 = beta0;
    out.seed = env.seed();
    out.values.reserve(x_grid.size());
    const long p = n & 1;
    for (double x : x_grid) {
        const double xs = x * sqn;
        const long z0 = 2 * static_cast<long>(std::floor((xs - p) / 2.0)) + p;
        const double w = (xs - static_cast<double>(z0)) / 2.0;
        auto val = [&](long z) -> double {
            if (std::labs(z) > n) return 0.0;
            return last[(z + n) / 2];
        };
        const double zi = (1.0 - w) * val(z0) + w * val(z0 + 2);
        if (zi <= 0.0) {
            out.values.push_back(std::nan(""));
            continue;
        }
        out.values.push_back(std::log(0.5 * sqn * zi * std::sqrt(2.0 * M_PI)) + 0.5 * x * x);
    }
    return out;
}

std::vector<SupercriticalRow> supercritical_probe(const EnvSpec& spec, double beta, double delta,
                                                  const std::vector<long>& n_list, long replicas,
                                                  std::uint64_t seed) {
    if (delta < 0.0) throw std::invalid_argument("supercritical_probe: delta >= 0");
    std::vector<SupercriticalRow> rows;
    for (std::size_t j = 0; j < n_list.size(); ++j) {
        const long n = n_list[j];
        SupercriticalRow row;
        row.n = n;
        row.beta_n = beta * std::pow(static_cast<double>(n), -(0.25 + delta));
        if (beta == 0.0) {
            row.empirical_var = 0.0;
            row.exact_var = 0.0;
        } else {
            auto s = sample_p2l(spec, n, beta, 0.25 + delta, replicas, derive_seed(seed, j),
                                transfer::Form::exponential);
            row.empirical_var = stats::variance(s);
            const double w = row.beta_n * row.beta_n * tilted_variance(spec, row.beta_n);
            row.exact_var = transfer::exact_pair_moment(n, w) - 1.0;
        }
        rows.push_back(row);
    }
    return rows;
}

EndpointStats endpoint_stats(const EnvField& env, double applied_beta) {
    const int n = env.n();
    auto f = transfer::evolve(env, applied_beta, transfer::Form::exponential, {}, n,
                              transfer::Mode::streaming, true);
    const auto& last = f.row(n);
    double lmax = last[0];
    for (double v : last) lmax = std::max(lmax, v);
    double z = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < last.size(); ++j) {
        const double w = std::exp(last[j] - lmax);
        const double x = static_cast<double>(-n + 2 * static_cast<long>(j));
        z += w;
        m2 += w * x * x;
    }
    return EndpointStats{1.0 / z, m2 / z / static_cast<double>(n)};
}

HolderFit holder_fit(const EnvSpec& spec, double beta0, long n, long replicas, int moment_order,
                     std::uint64_t seed) {
    if (moment_order < 2 || moment_order % 2) throw std::invalid_argument("holder_fit: even M >= 2");
    // dyadic spatial lags at t in {0.5, 1}, base points x in {0, 0.5}
    const double base_lag = 2.0 / std::sqrt(static_cast<double>(n));
    const int n_lags = 5;
    std::vector<double> lags(n_lags);
    for (int j = 0; j < n_lags; ++j) lags[j] = base_lag * std::pow(2.0, j);
    const std::vector<double> t_pts = {0.5, 1.0};
    const std::vector<double> x_pts = {0.0, 0.5};

    std::vector<std::vector<double>> acc(replicas, std::vector<double>(n_lags, 0.0));
    stats::parallel_for(replicas, [&](long r) {
        const auto env = EnvField::sample(spec, static_cast<int>(n), static_cast<int>(n),
                                          derive_seed(seed, static_cast<std::uint64_t>(r)));
        transfer::RescaledField z(env, beta0, n);
        for (int j = 0; j < n_lags; ++j) {
            double m = 0.0;
            for (double t : t_pts)
                for (double x : x_pts)
                    m += std::pow(std::fabs(z(t, x + lags[j]) - z(t, x)),
                                  static_cast<double>(moment_order));
            acc[r][j] = m / (t_pts.size() * x_pts.size());
        }
    });

    HolderFit fit;
    fit.lags = lags;
    std::vector<double> logl(n_lags), logm(n_lags);
    for (int j = 0; j < n_lags; ++j) {
        std::vector<double> col(replicas);
        for (long r = 0; r < replicas; ++r) col[r] = acc[r][j];
        const double m = stats::mean(col);
        fit.moments.push_back(std::pow(m, 1.0 / moment_order));
        logl[j] = std::log(lags[j]);
        logm[j] = std::log(fit.moments.back());
    }
    fit.exponent = stats::fit_slope(logl, logm);
    return fit;
}

}  // namespace polymer::chaos
