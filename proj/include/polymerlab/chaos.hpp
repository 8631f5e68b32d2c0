#pragma once

#include <cstdint>
#include <vector>

#include "polymerlab/env.hpp"
#include "polymerlab/transfer.hpp"

namespace polymer::chaos {

// Var Z_{sqrt(2) beta} = sum_{k>=1} beta^{2k} / Gamma(k/2+1), summed with a
// certified geometric tail bound.
struct LimitSeries {
    double value;
    double tail_bound;
    int terms;
};
LimitSeries limit_variance_series(double beta, double tol = 1e-12);
double limit_variance(double beta);
// Same quantity in closed form: e^{beta^4} (1 + erf(beta^2)) - 1.
double limit_variance_closed(double beta);

// Monte Carlo samples of the point-to-line partition value at the
// intermediate-disorder coupling applied_beta = beta0 * n^{-alpha}.
// Product form samples z_n; exponential form samples e^{-n lambda} Z_n.
std::vector<double> sample_p2l(const EnvSpec& spec, long n, double beta0, double alpha,
                               long replicas, std::uint64_t seed,
                               transfer::Form form = transfer::Form::product);

// KS table of the Cauchy-in-distribution and universality experiments.
struct SelfConvergence {
    std::vector<long> n_list;
    std::vector<double> ks_consecutive;   // KS(law at n_j, law at n_{j+1})
    std::vector<double> ks_null_q99;      // matching null quantiles
    double ks_cross_kind = 0.0;           // kinds[0] vs kinds[1] at max n
    double ks_cross_null_q99 = 0.0;
};
SelfConvergence self_convergence(double beta0, const std::vector<long>& n_list, long replicas,
                                 std::uint64_t seed,
                                 const std::vector<EnvSpec>& kinds = {
                                     EnvSpec{EnvKind::gaussian},
                                     EnvSpec{EnvKind::rademacher}});

// Finite-n proxy for the stationary process A_{sqrt(2) beta}(x):
// log[(sqrt(n)/2) z_n(x sqrt(n)) sqrt(2 pi) e^{x^2/2}] from the product form,
// NaN where the signed field is nonpositive.
struct AProcessSample {
    std::vector<double> x_grid;
    std::vector<double> values;
    long n;
    double beta0;
    std::uint64_t seed;
};
AProcessSample a_process_sample(const EnvField& env, double beta0, long n,
                                const std::vector<double>& x_grid);

// Empirical and exact variance of e^{-n lambda(beta_n)} Z_n under
// beta_n = beta * n^{-(1/4+delta)}.
struct SupercriticalRow {
    long n;
    double beta_n;
    double empirical_var;
    double exact_var;  // pair DP on the tilted field
};
std::vector<SupercriticalRow> supercritical_probe(const EnvSpec& spec, double beta, double delta,
                                                  const std::vector<long>& n_list, long replicas,
                                                  std::uint64_t seed);

// max_x P^w(S_n = x) and the endpoint second moment E[(S_n/sqrt(n))^2] for
// one replica (exponential form, log space).
struct EndpointStats {
    double max_prob;
    double second_moment;
};
EndpointStats endpoint_stats(const EnvField& env, double applied_beta);

// Fitted spatial Holder exponent of z_n from M-th moment ratios across dyadic
// spatial lags.
struct HolderFit {
    double exponent;
    std::vector<double> lags;
    std::vector<double> moments;  // E[|dz|^M]^{1/M}
};
HolderFit holder_fit(const EnvSpec& spec, double beta0, long n, long replicas, int moment_order,
                     std::uint64_t seed);

}  // namespace polymer::chaos
