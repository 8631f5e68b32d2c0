#pragma once

#include <memory>
#include <utility>
#include <vector>

namespace polymer::crossover {

struct AiryValue {
    double ai;
    double aip;
};

// Airy function and derivative. Maclaurin series for |x| <= 8.5, asymptotic
// expansions beyond, switchover cross-validated in the tests. The public
// surface guards |x| <= 50 (underflow-guarded 0 above, domain error below);
// kernel assembly uses the unguarded core.
AiryValue airy(double x);

struct CrossoverParams {
    double beta = 1.0;
    int quad_order = 40;     // Nystrom nodes
    double domain_cap = 12.0;  // L: operator domain truncated to (a, a+L)
    double t_trunc = 25.0;     // T: base truncation of the principal-value t-integral
    double kappa() const;      // 2 beta^{4/3}
    void validate() const;
};

struct FredholmResult {
    double value = 0.0;
    double self_convergence = 0.0;  // |value at (m,T,L) - value at (2m,2T,2L)|
    bool flagged = false;
};

// Tracy-Widom GUE distribution det(I - K_Airy) on L^2(s, s+L).
FredholmResult tw_gue_cdf(double s, int quad_order = 40);

// Crossover density f(r) = kappa^{-1} det(I-K_sigma) tr((I-K_sigma)^{-1} P_Airy)
// on L^2(kappa^{-1} r, infty).
FredholmResult crossover_pdf(double r, const CrossoverParams& params);

// G_beta(s): Gumbel convolution of f. (The convolution's r-orientation is
// fixed so that G is a CDF with the stated beta -> 0 / beta -> infinity
// limits; see README notes on the integral form.)
FredholmResult crossover_cdf(double s, const CrossoverParams& params);

// Tabulated density/CDF of the rescaled variable a = kappa^{-1} r, built once
// per (beta, params) and reused across s evaluations.
class CrossoverTable {
public:
    static std::shared_ptr<const CrossoverTable> build(const CrossoverParams& params);

    FredholmResult cdf(double s) const;
    FredholmResult pdf(double r) const;
    double integral_f() const { return mass_fine_; }          // should be 1
    double integral_self_convergence() const;                  // |mass base - fine|
    std::pair<double, double> a_range() const { return {a_lo_, a_hi_}; }
    const CrossoverParams& params() const { return params_; }

private:
    CrossoverParams params_;
    double a_lo_ = 0.0, a_hi_ = 0.0, step_ = 0.0;
    std::vector<double> phi_base_, phi_fine_;  // density of a on the grid
    std::vector<double> cdf_base_, cdf_fine_;  // Simpson cumulative
    double mass_base_ = 0.0, mass_fine_ = 0.0;
    bool flagged_ = false;

    double cdf_at(const std::vector<double>& c, double a) const;
    double gumbel_mix(const std::vector<double>& c, double s) const;
};

// sup_s |G_beta(2^{4/3} beta^{4/3} s) - F_GUE(2^{1/3} s)| over the grid.
double gue_asymp_gap(double beta, const std::vector<double>& s_grid,
                     const CrossoverParams& base);

// sup_s |G_beta(2^{1/2} pi^{1/4} beta s) - Phi(s)| for each beta.
std::vector<double> small_beta_gaps(const std::vector<double>& beta_list,
                                    const std::vector<double>& s_grid, CrossoverParams base);

namespace detail {

AiryValue airy_core(double x);  // full range, no guard
double airy_series(double x, double* aip);
double sigma(double kappa, double t);         // 1/(1 - e^{-kappa t})
double sigma_smooth(double kappa, double t);  // sigma(t) - 1/(kappa t), smooth through 0
double tw_kernel(double x, double y);         // Airy kernel with diagonal limit

// Nystrom evaluation of det(I - K_sigma) and the resolvent trace
// <(I-K)^{-1} Ai, Ai> on L^2(a, infty); refine=true doubles (m, T, L).
struct KernelEval {
    double det;
    double trace_solve;
    double trace_dense;  // filled when dense_check
};
KernelEval sigma_kernel_eval(double a, const CrossoverParams& p, bool refine,
                             bool dense_check = false);
// det(I - K - P) for the rank-one identity check.
double sigma_kernel_det_minus_rank1(double a, const CrossoverParams& p);

}  // namespace detail

}  // namespace polymer::crossover
