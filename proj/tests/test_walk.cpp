#include <doctest.h>

#include <cmath>
#include <functional>
#include <cstdint>
#include <vector>

#include "polymerlab/walk.hpp"

using namespace polymer;

TEST_CASE("rw_pmf basic values and parity") {
    CHECK(walk::rw_pmf(2, 0) == 0.5);
    CHECK(walk::rw_pmf(2, 1) == 0.0);
    CHECK(walk::rw_pmf(4, 0) == 0.375);
    CHECK(walk::rw_pmf(0, 0) == 1.0);
    CHECK(walk::rw_pmf(5, 7) == 0.0);
}

TEST_CASE("rw_pmf rows sum to one") {
    // exact integer check for i <= 20: sum of C(i,k) = 2^i
    for (long i = 1; i <= 20; ++i) {
        std::uint64_t acc = 0;
        for (long x = -i; x <= i; x += 2) {
            const double p = walk::rw_pmf(i, x);
            acc += static_cast<std::uint64_t>(std::ldexp(p, static_cast<int>(i)) + 0.5);
        }
        CHECK(acc == (1ULL << i));
    }
    for (long i : {100L, 1000L, 10000L}) {
        double acc = 0.0;
        for (long x = -i; x <= i; x += 2) acc += walk::rw_pmf(i, x);
        CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rw_pmf switchover between exact and log-gamma") {
    // relative error at the i=50 boundary below 1e-13
    for (long i : {49L, 50L, 51L, 52L}) {
        for (long x = -i; x <= i; x += 2 * std::max<long>(1, i / 7)) {
            const long k = (i + x) / 2;
            const double lg = std::exp(std::lgamma(i + 1.0) - std::lgamma(k + 1.0) -
                                       std::lgamma(i - k + 1.0) - i * std::log(2.0));
            CHECK(walk::rw_pmf(i, x) == doctest::Approx(lg).epsilon(1e-13));
        }
    }
}

TEST_CASE("Chapman-Kolmogorov") {
    for (long i : {3L, 17L, 50L})
        for (long j : {5L, 50L}) {
            for (long x = -(i + j); x <= i + j; x += std::max<long>(2, (i + j) / 5)) {
                const long xx = x - ((x ^ (i + j)) & 1);
                double acc = 0.0;
                for (long y = -i; y <= i; y += 2) acc += walk::rw_pmf(i, y) * walk::rw_pmf(j, xx - y);
                CHECK(acc == doctest::Approx(walk::rw_pmf(i + j, xx)).epsilon(1e-12));
            }
        }
}

TEST_CASE("parity_round") {
    CHECK(walk::parity_round(0.2, 2) == 0);
    CHECK(walk::parity_round(0.2, 3) == 1);
    CHECK(walk::parity_round(1.0, 2) == 2);   // midpoint rounds toward +inf
    CHECK(walk::parity_round(-1.0, 2) == 0);  // likewise at -1
    CHECK(walk::parity_round(2.9, 3) == 3);
    CHECK(walk::parity_round(-2.2, 4) == -2);
}

TEST_CASE("heat kernel values and normalization") {
    CHECK(walk::heat_kernel(1.0, 0.0) == doctest::Approx(0.39894).epsilon(1e-4));
    walk::SimplexPoint p2{{0.5, 1.0}, {0.0, 0.0}};
    CHECK(walk::heat_kernel_k(p2) ==
          doctest::Approx(walk::heat_kernel(0.5, 0.0) * walk::heat_kernel(0.5, 0.0))
              .epsilon(1e-12));
    CHECK(walk::heat_kernel_k(p2) == doctest::Approx(0.31831).epsilon(1e-4));
    // quadrature normalization of rho(1,.)
    double acc = 0.0;
    const int N = 4000;
    for (int j = 0; j < N; ++j) {
        const double x = -10.0 + (j + 0.5) * 20.0 / N;
        acc += walk::heat_kernel(1.0, x) * 20.0 / N;
    }
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-8));
    walk::SimplexPoint bad{{0.5, 0.5}, {0.0, 0.0}};
    CHECK_THROWS(walk::heat_kernel_k(bad));
}

TEST_CASE("discrete kernel p_k^n") {
    walk::SimplexPoint p{{0.5}, {0.0}};
    CHECK(walk::discrete_kernel_pkn(1, 4, p) == doctest::Approx(0.25).epsilon(1e-14));
    // k > n is identically zero
    walk::SimplexPoint q{{0.2, 0.4, 0.6}, {0.0, 0.0, 0.0}};
    CHECK(walk::discrete_kernel_pkn(3, 2, q) == 0.0);
    // collapsed ceil(nt) leaves D_k^n
    walk::SimplexPoint r{{0.1, 0.15}, {0.0, 0.0}};
    CHECK(walk::discrete_kernel_pkn(2, 4, r) == 0.0);
}

TEST_CASE("bridge kernel") {
    CHECK(walk::bridge_kernel({1}, {1}, 2, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(walk::bridge_kernel({2}, {2}, 4, 4) == doctest::Approx(1.0).epsilon(1e-14));
    // conditional law normalizes: n=6, x=0, k=2, times (2,4)
    double acc = 0.0;
    for (long x1 = -2; x1 <= 2; x1 += 2)
        for (long x2 = -4; x2 <= 4; x2 += 2) acc += walk::bridge_kernel({2, 4}, {x1, x2}, 6, 0);
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(walk::bridge_kernel({1}, {1}, 3, 0));  // p(3,0) = 0
}

TEST_CASE("fock norms") {
    CHECK(walk::fock_norm(1) == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(walk::fock_norm(2) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(walk::fock_norm_bridge(0, 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
}

// Independent quadrature of int_{Delta_k} int rho_k^2 via smooth substitutions.
namespace {
double gl32(double a, double b, const std::function<double(double)>& f) {
    static const double xs[16] = {0.0483076656877383, 0.1444719615827965, 0.2392873622521371,
                                  0.3318686022821277, 0.4213512761306353, 0.5068999089322294,
                                  0.5877157572407623, 0.6630442669302152, 0.7321821187402897,
                                  0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
                                  0.9349060759377397, 0.9647622555875064, 0.9856115115452684,
                                  0.9972638618494816};
    static const double ws[16] = {0.0965400885147278, 0.0956387200792749, 0.0938443990808046,
                                  0.0911738786957639, 0.0876520930044038, 0.0833119242269467,
                                  0.0781938957870703, 0.0723457941088485, 0.0658222227763618,
                                  0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
                                  0.0342738629130214, 0.0253920653092621, 0.0162743947309057,
                                  0.0070186100094701};
    double acc = 0.0;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < 16; ++i) acc += ws[i] * (f(c + h * xs[i]) + f(c - h * xs[i]));
    return acc * h;
}

// int rho(s,y)^2 dy by Gauss quadrature in y = sqrt(s) v
double rho_sq_slice(double s) {
    return gl32(-8.0, 8.0, [&](double v) {
               const double r = polymer::walk::heat_kernel(s, std::sqrt(s) * v);
               return r * r;
           }) *
           std::sqrt(s);
}
}  // namespace

TEST_CASE("fock_norm matches direct quadrature for k = 1, 2") {
    // k=1: t = u^2 removes the endpoint singularity
    const double q1 = gl32(0.0, 1.0, [](double u) { return 2.0 * u * rho_sq_slice(u * u); });
    CHECK(q1 == doctest::Approx(walk::fock_norm(1)).epsilon(1e-6));
    // k=2: t2 = tau^2, t1 = t2 sin^2(theta); the integrand becomes smooth
    const double q2 = gl32(0.0, 1.0, [](double tau) {
        const double t2 = tau * tau;
        return 2.0 * tau * gl32(0.0, M_PI / 2.0, [&](double th) {
                   const double s = std::sin(th), c = std::cos(th);
                   const double t1 = t2 * s * s;
                   const double dt1 = 2.0 * t2 * s * c;
                   if (t1 <= 0.0 || t2 - t1 <= 0.0) return 0.0;
                   return rho_sq_slice(t1) * rho_sq_slice(t2 - t1) * dt1;
               });
    });
    CHECK(q2 == doctest::Approx(walk::fock_norm(2)).epsilon(1e-6));
}

TEST_CASE("local limit theorem gap decays") {
    const double g64 = walk::llt_gap(64);
    const double g1024 = walk::llt_gap(1024);
    CHECK(g1024 < g64);
    // decay at least as fast as n^{-1/2}: n * gap stays bounded
    std::vector<double> ngaps;
    for (long n : {64L, 256L, 1024L}) ngaps.push_back(n * walk::llt_gap(n));
    for (double v : ngaps) CHECK(v < 2.0 * ngaps.front() + 1.0);
    const double g2 = walk::llt_gap(2);
    CHECK(g2 > 0.0);
    CHECK(std::isfinite(g2));
}

TEST_CASE("discrete chaos kernel norm obeys the uniform bound") {
    // fitted per-order constant (||n^{k/2} p_k^n|| / ||rho_k||)^{1/k} <= 2
    double fitted = 0.0;
    for (int k = 1; k <= 4; ++k)
        for (long n : {16L, 64L, 256L}) {
            const double ratio =
                std::sqrt(walk::pkn_norm_sq(k, n) / walk::fock_norm(k));
            fitted = std::max(fitted, std::pow(ratio, 1.0 / k));
        }
    CHECK(fitted <= 2.0);
    CHECK(fitted > 0.5);
}

TEST_CASE("pkn_norm_sq against brute force at k=2, n=6") {
    // direct lattice sum over D_2^6
    double acc = 0.0;
    for (long i1 = 1; i1 <= 6; ++i1)
        for (long i2 = i1 + 1; i2 <= 6; ++i2) {
            double inner = 0.0;
            for (long x1 = -i1; x1 <= i1; x1 += 2)
                for (long x2 = x1 - (i2 - i1); x2 <= x1 + (i2 - i1); x2 += 2) {
                    const double p = walk::rw_pmf(i1, x1) * walk::rw_pmf(i2 - i1, x2 - x1);
                    inner += p * p;
                }
            acc += inner;
        }
    const double expected = std::ldexp(acc, -2) * std::pow(6.0, -1.0);
    CHECK(walk::pkn_norm_sq(2, 6) == doctest::Approx(expected).epsilon(1e-13));
}
