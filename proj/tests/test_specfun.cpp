#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oamcoinc/specfun.hpp"

using namespace oamcoinc;

namespace {

// Independent Laguerre oracle: explicit monomial expansion
// L_n^k(x) = sum_i (-1)^i C(n+k, n-i) x^i / i!, coefficients exact in double
// for the ranges used here (binomials < 2^53).
double laguerre_monomial(int n, int k, double x) {
    auto binom = [](int a, int b) {
        double r = 1.0;
        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    double sum = 0.0;
    double xpow = 1.0;
    double ifact = 1.0;
    for (int i = 0; i <= n; ++i) {
        const double c = binom(n + k, n - i) * xpow / ifact;
        sum += (i % 2 == 0) ? c : -c;
        xpow *= x;
        ifact *= (i + 1.0);
    }
    return sum;
}

// Scaled Bessel-I series oracle, all terms positive.
double bessel_series_oracle(int ell, double x) {
    int nu = std::abs(ell);
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    double t = std::pow(0.5 * x, nu);
    for (int i = 1; i <= nu; ++i) t /= i;
    double sum = t;
    for (int k = 0; k < 3000; ++k) {
        t *= 0.25 * x * x / ((k + 1.0) * (k + 1.0 + nu));
        sum += t;
        if (t < sum * 1e-18) break;
    }
    return std::exp(-x) * sum;
}

}  // namespace

TEST_CASE("ln_gamma basics") {
    CHECK(std::abs(ln_gamma(1.0)) <= 1e-15);
    CHECK(std::abs(ln_gamma(2.0)) <= 1e-15);
    const double ref = 0.5 * std::log(std::acos(-1.0));  // ln sqrt(pi)
    CHECK(ln_gamma(0.5) == doctest::Approx(ref).epsilon(1e-13));
    CHECK_THROWS_AS(ln_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(ln_gamma(-1.5), std::domain_error);
}

TEST_CASE("assoc_laguerre low orders") {
    for (int k : {0, 1, 5})
        for (double x : {-2.0, 0.0, 0.7, 10.0})
            CHECK(assoc_laguerre(0, k, x) == 1.0);
    for (double x : {-1.0, 0.0, 2.5}) {
        CHECK(assoc_laguerre(1, 0, x) == doctest::Approx(1.0 - x));
    }
    // L_2^1(x) = x^2/2 - 3x + 3 at x = 1
    CHECK(assoc_laguerre(2, 1, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(assoc_laguerre(-1, 0, 1.0), std::domain_error);
}

TEST_CASE("assoc_laguerre recurrence matches monomial expansion") {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> npick(0, 30), kpick(0, 20);
    std::uniform_real_distribution<double> xpick(-50.0, 50.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = npick(rng), k = kpick(rng);
        const double x = xpick(rng);
        const double got = assoc_laguerre(n, k, x);
        const double want = laguerre_monomial(n, k, x);
        // The monomial oracle cancels catastrophically near Laguerre zeros:
        // its own noise floor is ~ n * eps * sum|terms|, which dominates the
        // 1e-9 relative target there.
        double scale = 0.0;
        double xpow = 1.0, ifact = 1.0;
        for (int i = 0; i <= n; ++i) {
            double c = 1.0;
            for (int j = 1; j <= n - i; ++j) c = c * (n + k - (n - i) + j) / j;
            scale += std::abs(c * xpow / ifact);
            xpow *= x;
            ifact *= (i + 1.0);
        }
        const double tol = std::max(1e-9 * std::abs(want), 1e-12 * scale);
        CHECK(std::abs(got - want) <= tol);
    }
}

TEST_CASE("bessel_i_scaled basics") {
    CHECK(bessel_i_scaled(0, 0.0) == 1.0);
    CHECK(bessel_i_scaled(3, 0.0) == 0.0);
    CHECK(bessel_i_scaled(-3, 0.0) == 0.0);
    // e^{-2} I_1(2) against the series oracle
    const double want = bessel_series_oracle(1, 2.0);
    CHECK(want == doctest::Approx(0.2152692).epsilon(1e-6));
    CHECK(bessel_i_scaled(1, 2.0) == doctest::Approx(want).epsilon(1e-13));
    CHECK_THROWS_AS(bessel_i_scaled(0, -1.0), std::domain_error);
}

TEST_CASE("bessel_i_scaled against series oracle across orders") {
    for (double x : {0.1, 1.0, 10.0, 100.0}) {
        for (int l = 0; l <= 20; ++l) {
            const double want = bessel_series_oracle(l, x);
            const double got = bessel_i_scaled(l, x);
            CHECK(std::abs(got - want) <= 1e-10 * std::max(want, 1e-300));
        }
    }
}

TEST_CASE("bessel_i_scaled evaluation paths agree on overlap band") {
    for (double x : {15.0, 18.0, 20.0, 22.0, 25.0}) {
        for (int l = 0; l <= 20; ++l) {
            const double a = detail::bessel_i_scaled_series(l, x);
            const double b = detail::bessel_i_scaled_miller(l, x);
            CHECK(std::abs(a - b) <= 1e-10 * std::max(a, 1e-300));
        }
    }
}

TEST_CASE("bessel_i_scaled large argument sanity") {
    // leading asymptotics e^{-x} I_0(x) ~ (2 pi x)^{-1/2} (1 + 1/(8x))
    for (double x : {300.0, 700.0}) {
        const double lead = 1.0 / std::sqrt(2.0 * std::acos(-1.0) * x);
        const double approx = lead * (1.0 + 1.0 / (8.0 * x));
        CHECK(bessel_i_scaled(0, x) == doctest::Approx(approx).epsilon(1e-4));
    }
}

TEST_CASE("hyp2f1_diag special values") {
    for (double z : {0.0, 0.3, 0.99, 1.0})
        CHECK(hyp2f1_diag(0, z) == 1.0);
    CHECK(hyp2f1_diag(2, 0.0) == 1.0);
    // Gauss summation at z = 1: Gamma(3)Gamma(1)/Gamma(2)^2 = 2
    CHECK(hyp2f1_diag(2, 1.0) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK_THROWS_AS(hyp2f1_diag(2, -0.1), std::domain_error);
    CHECK_THROWS_AS(hyp2f1_diag(2, 1.1), std::domain_error);
    CHECK_THROWS_AS(hyp2f1_diag(-1, 0.5), std::domain_error);
}

TEST_CASE("hyp2f1_diag nondecreasing in z") {
    for (int l : {1, 2, 5, 12}) {
        double prev = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double z = i / 40.0;
            const double f = hyp2f1_diag(l, z);
            CHECK(f >= prev - 1e-14);
            prev = f;
        }
    }
}

TEST_CASE("hyp2f1_diag reports non-convergence") {
    SeriesControl tight;
    tight.max_terms = 3;
    try {
        hyp2f1_diag(4, 0.9, tight);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.attained_tol() > 0.0);
    }
}
