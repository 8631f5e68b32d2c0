#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace polymer::stats {

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased
double quantile(std::vector<double> v, double q);
double median(const std::vector<double>& v);
double iqr(const std::vector<double>& v);

// Two-sample Kolmogorov-Smirnov statistic sup|F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// One-sample statistic against a CDF.
double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

// Asymptotic null quantiles of the KS statistic.
double ks_null_quantile_two_sample(std::size_t m, std::size_t n, double alpha = 0.01);
double ks_null_quantile_one_sample(std::size_t n, double alpha = 0.01);

// Percentile bootstrap for a statistic of two samples (resampled jointly).
struct BootstrapCI {
    double lo, hi, point;
};
BootstrapCI bootstrap_ci(const std::vector<double>& a, const std::vector<double>& b,
                         const std::function<double(const std::vector<double>&,
                                                    const std::vector<double>&)>& statistic,
                         int resamples, double level, std::uint64_t seed);

// Deterministic fixed-shape pairwise summation (thread-count independent).
double pairwise_sum(const std::vector<double>& v);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Run `count` jobs indexed 0..count-1 across a small thread pool; results
// must be written to per-index slots by the job itself.
void parallel_for(long count, const std::function<void(long)>& job, int threads = 0);

}  // namespace polymer::stats
