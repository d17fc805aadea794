#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oamcoinc {

/// Truncation control for the series evaluations in this module.
/// A series is stopped once the current term drops below rel_tol times the
/// accumulated sum; exceeding max_terms raises ConvergenceError.
struct SeriesControl {
    double rel_tol = 1e-12;
    std::size_t max_terms = 10000;
};

/// Raised when a series fails to reach its target tolerance within
/// max_terms. attained_tol() reports the relative size of the last term.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& msg, double attained)
        : std::runtime_error(msg), attained_(attained) {}
    double attained_tol() const noexcept { return attained_; }

private:
    double attained_;
};

/// ln Gamma(x) for x > 0. Accuracy: |err| <= 1e-13*|ln Gamma(x)| + 1e-15.
double ln_gamma(double x);

/// Associated Laguerre polynomial L_n^k(x), n,k >= 0, evaluated by the
/// three-term recurrence in n (stable for the degrees used here).
double assoc_laguerre(int n, int k, double x);

/// Scaled modified Bessel function e^{-x} I_{|ell|}(x), x >= 0.
/// Relative error <= 1e-10 for x <= 700.
double bessel_i_scaled(int ell, double x);

/// Gauss hypergeometric function on the diagonal family the radial overlaps
/// need: F(|ell|/2, |ell|/2; 1+|ell|; z) for 0 <= z <= 1, ell >= 0.
/// z = 1 is summed in closed form (Gauss summation, convergent since
/// c - a - b = 1); z < 1 uses the ascending series under ctl.
double hyp2f1_diag(int ell, double z, const SeriesControl& ctl = {});

namespace detail {

// Exposed for cross-validation tests of the two evaluation paths.
double bessel_i_scaled_series(int ell, double x);
double bessel_i_scaled_miller(int ell, double x);

// Ascending Gauss series for F(a,b;c;z), all parameters positive, 0 <= z < 1.
double gauss_series(double a, double b, double c, double z,
                    const SeriesControl& ctl);

}  // namespace detail

}  // namespace oamcoinc
