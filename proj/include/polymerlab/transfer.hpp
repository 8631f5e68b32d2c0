#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "polymerlab/env.hpp"

namespace polymer::transfer {

enum class Form { product, exponential };
enum class Mode { streaming, stored };

struct Origin {
    int m = 0;
    long y = 0;
};

// Quenched partition values Z(k,x) over the parity lattice, evolved by
// conditioning on the last step:
//   product:      Z(k+1,x) = (1 + beta w(k+1,x)) * (Z(k,x-1)+Z(k,x+1))/2
//   exponential:  Z(k+1,x) = exp(beta w(k+1,x)) * (Z(k,x-1)+Z(k,x+1))/2
// Row j covers |x - y| <= j (walk support; no artificial boundary). In
// log_space rows hold logs and the average is a two-term log-sum-exp.
class PartitionField {
public:
    Form form = Form::product;
    double beta = 0.0;
    bool log_space = false;
    Origin origin;
    int horizon = 0;

    // Z(k,x); requires stored mode (or k == horizon).
    double value(int k, long x) const;
    double log_value(int k, long x) const;
    const std::vector<double>& row(int k) const;
    std::vector<double>& mutable_row(int k);
    bool stored() const { return static_cast<int>(rows_.size()) == horizon + 1; }

    // Point-to-line value: sum of the final row.
    double p2l() const;
    double log_p2l() const;

    // Normalized endpoint probabilities; defined for the exponential form or
    // a nonnegative final row (the signed product field has no law).
    std::vector<std::pair<long, double>> endpoint_density() const;

    long row_min_site(int k) const { return origin.y - k; }
    static long row_index(long x, long lo) { return (x - lo) / 2; }

    friend PartitionField evolve(const EnvField&, double, Form, Origin, int, Mode,
                                 std::optional<bool>);

private:
    std::vector<std::vector<double>> rows_;  // streaming: single entry (final row)
};

PartitionField evolve(const EnvField& env, double beta, Form form, Origin origin,
                      int horizon, Mode mode = Mode::streaming,
                      std::optional<bool> log_space = std::nullopt);

double p2l_value(const PartitionField& field);

// E[(1+w)^{#\{i <= n : S_i = S'_i\}}] for two independent walks, by dynamic
// programming over the difference walk. O(n^2).
double exact_pair_moment(long n, double w);

// Exact E_Q[ z_n(beta)^2 ] for a mean-zero variance-one environment
// (= exact_pair_moment with w = beta^2).
double exact_second_moment(long n, double beta);

// Four-parameter field Z(m,y;k,x;beta) by evolving from (m,y).
double four_param(const EnvField& env, double beta, Form form, int m, long y, int k, long x);

// Backward point-to-line field B(i,x) = Z(i,x;n,*;beta) and the polymer
// transition probabilities it determines. Exponential form in log space.
class BackwardField {
public:
    BackwardField(const EnvField& env, double beta, int n, Form form = Form::exponential);

    double log_value(int i, long x) const;  // log Z(i,x;n,*)
    double value(int i, long x) const;

    // P(S_{i+1} = x + step | S_i = x) = (1/2) W(i+1,x+step) B(i+1,x+step) / B(i,x)
    double transition_prob(int i, long x, int step) const;

    // P(S_k = x | S_m = y) = Z(m,y;k,x) Z(k,x;n,*) / Z(m,y;n,*)
    double multi_step_prob(int m, long y, int k, long x) const;

    int n() const { return n_; }

private:
    const EnvField* env_;
    double beta_;
    int n_;
    Form form_;
    std::vector<std::vector<double>> log_rows_;  // i = 0..n, |x| <= hw-(n-i)
    long row_lo(int i) const;
};

// z_n(t,x) = sqrt(n) * z(nt, x sqrt(n); beta0 n^{-1/4}), extended off the
// lattice by interpolating in x along each time level and then linearly in t
// (exact at lattice corners). Row 0 is the origin delta smeared over its
// interpolation cell.
class RescaledField {
public:
    RescaledField(const EnvField& env, double beta0, long n);
    double operator()(double t, double x) const;
    double lattice(int k, long z) const;  // sqrt(n) * z(k, z)
    long n() const { return n_; }
    double applied_beta() const { return field_.beta; }

private:
    long n_;
    double sqrt_n_;
    PartitionField field_;
    double level_interp(int k, double xs) const;
};

// Max over the lattice of the gap between the multiplicative recursion and
// its Duhamel (integral) form, reported on the sqrt(n)-rescaled field.
// Direct triple summation for n <= 64; heat-flow source accumulation plus a
// final-row direct check above (n <= 512).
double duhamel_residual(const EnvField& env, double beta0, long n);

}  // namespace polymer::transfer
