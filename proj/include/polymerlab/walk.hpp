#pragma once

#include <vector>

namespace polymer::walk {

// p(i,x) = P(S_i = x) for the symmetric simple walk; 0 off the parity
// lattice. Exact binomial for i <= 50, log-gamma beyond.
double rw_pmf(long i, long x);
double rw_log_pmf(long i, long x);  // -inf where pmf is 0

// Closest integer to x with the parity of i; exact midpoints round toward
// +infinity.
long parity_round(double x, long i);

// Gaussian heat kernel rho(t,x) and k-fold product over simplex increments.
double heat_kernel(double t, double x);

struct SimplexPoint {
    std::vector<double> times;      // strictly increasing, in (0,1]
    std::vector<double> positions;  // same length
    int order() const { return static_cast<int>(times.size()); }
    void validate() const;
};

double heat_kernel_k(const SimplexPoint& point);

// p_k^n(t,x) = 2^{-k} p_k(ceil(nt), [x sqrt(n)]) restricted to the discrete
// simplex; `rescaled` multiplies by n^{k/2}.
double discrete_kernel_pkn(int k, long n, const SimplexPoint& point, bool rescaled = false);

// Conditional law of the walk at the given times given S_n = x.
double bridge_kernel(const std::vector<long>& times, const std::vector<long>& sites,
                     long n, long x);

// Squared L2 norms of the heat-kernel chaos elements over the time simplex:
// ||rho_k||^2 = 1/(2^k Gamma(k/2+1)); bridge variant
// e^{-y^2}/(2^{k+1/2} Gamma((k+1)/2)).
double fock_norm(int k);
double fock_norm_bridge(int k, double y);

// sup over parity-valid |x| <= 4 sqrt(n) of |(sqrt(n)/2) p(n,x) - rho(1, x/sqrt(n))|.
double llt_gap(long n);

// P(S_m = S'_m) = p(2m, 0) for two independent walks (meeting probability).
double meet_prob(long m);

// ||n^{k/2} p_k^n||^2_{L2} by exact lattice summation:
// 2^{-k} n^{-k/2} sum_{i in D_k^n} prod_j p(2 di_j, 0), via an O(k n^2) DP.
double pkn_norm_sq(int k, long n);

}  // namespace polymer::walk
