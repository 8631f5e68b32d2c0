#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polymerlab/env.hpp"
#include "polymerlab/transfer.hpp"

namespace polymer::ustat {

// Weight function on [0,1]^k x R^k.
using KernelFn =
    std::function<double(const std::vector<double>& t, const std::vector<double>& x)>;

// gbar_n: per-cell averages of g over the rectangles
// prod_j ((i_j-1)/n, i_j/n] x ((x_j-1)/sqrt(n), (x_j+1)/sqrt(n)], stored
// densely for k in {1,2}. Cell volume is 2^k n^{-3k/2}.
class KernelGrid {
public:
    // Gauss-Legendre product quadrature of order `quad_order` per dimension
    // (1 = midpoint). Grid covers |x_j| <= support_radius * sqrt(n).
    static KernelGrid average(const KernelFn& g, int k, long n, double support_radius,
                              int quad_order = 4);
    // Grid whose cells are exactly the lattice values of a provided function
    // (for kernels already constant on rectangles).
    static KernelGrid from_cells(int k, long n, long site_max,
                                 const std::function<double(const std::vector<long>&,
                                                            const std::vector<long>&)>& cell);

    int k() const { return k_; }
    long n() const { return n_; }
    long site_max() const { return zmax_; }
    bool empty() const { return k_ > n_; }

    double at1(long i, long z) const;
    double at2(long i1, long z1, long i2, long z2) const;
    double cell_value(const std::vector<long>& i, const std::vector<long>& z) const;

    double cell_volume() const;   // 2^k n^{-3k/2}
    double l2_norm_sq() const;    // ||gbar_n||^2 = sum v^2 * |R|

private:
    int k_ = 1;
    long n_ = 0;
    long zmax_ = 0;  // sites |z| <= zmax (parity-trimmed per row)
    std::vector<double> v1_;  // [i-1][(z+zi)/2]
    std::vector<double> v2_;  // [(i1-1)*n + (i2-1)][...]
    long sites_per_row_ = 0;
    long row_cap(long i) const { return zmax_ - ((zmax_ ^ i) & 1); }
    long idx1(long i, long z) const;
    long idx2(long i1, long z1, long i2, long z2) const;
};

// S_k^n(g) = 2^{k/2} sum_{i in E_k^n} sum_x gbar_n(i/n, x/sqrt(n)) 1{i<->x} w(i,x).
// `ordered` restricts to i_1 < ... < i_k (the k! S_k^n variant for
// simplex-supported kernels). k <= 2; the walk-kernel family at any k goes
// through the layered DP below.
double u_stat(const KernelGrid& grid, const EnvField& env, bool ordered = false);

// Factorized route for products g(t,x) = prod_j g_j(t_j, x_j) whose time
// supports are pairwise disjoint: S_k^n(g) = prod_j S_1^n(g_j).
double u_stat_product(const std::vector<KernelGrid>& factors, const EnvField& env);

struct ChaosTarget {
    enum class Type { point_to_line, point_to_point };
    Type type = Type::point_to_line;
    long x = 0;                   // terminal site for point_to_point
    transfer::Origin origin{};    // four-parameter start
    int horizon = 0;              // 0 => env.n() - origin.m
};

// Orders T_0..T_K of the expansion z = sum_k beta^k T_k of the product-form
// recursion, by coefficient-extraction DP:
//   U_k(j+1,y) = avg U_k(j,.) + w(j+1,y) * avg U_{k-1}(j,.),  U_0 = walk pmf.
// O(K n width) time.
struct ChaosLayers {
    std::vector<double> orders;  // T_0..T_K
    long n = 0;
    ChaosTarget target;
    // sum_k b^k T_k; with b = beta * n^{-1/4} this reproduces the transfer
    // value exactly.
    double sum_at(double applied_beta) const;
};

ChaosLayers chaos_layers(const EnvField& env, ChaosTarget target, int max_order);

// S_k^n(p_k^n) = 2^{-k/2} T_k (point-to-line walk-kernel U-statistic).
double walk_kernel_u_stat(const EnvField& env, int k);

// Variance mass above order K of the limit chaos: sum_{k>K} 2^k beta^{2k} ||rho_k||^2.
double chaos_tail_mass(int max_order, double beta);

// Exhaustive Rademacher enumeration over every environment of a tiny window;
// exact first/second/cross moments of S_1 and S_2.
struct EnumerationReport {
    long n = 0, width = 0;
    long cell_count = 0, env_count = 0;
    double e_s1 = 0, e_s2 = 0, e_s1s2 = 0;
    double e_s1_sq = 0, e_s2_sq = 0;
    double bound_s1 = 0, bound_s2 = 0;  // n^{3k/2} ||gbar_n||^2
    std::string to_json() const;
};

EnumerationReport enumerate_oracle(long n, long width, const KernelGrid& g1,
                                   const KernelGrid& g2);

}  // namespace polymer::ustat
