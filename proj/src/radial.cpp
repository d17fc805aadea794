#include "oamcoinc/radial.hpp"

#include <algorithm>
#include <cmath>

#include "oamcoinc/quadrature.hpp"

namespace oamcoinc {

namespace {

// Beyond this z = s^2 the ascending series is traded for the logarithmic
// connection expansion around z = 1 (c - a - b = 1 for this family).
constexpr double kBoundaryZ = 1.0 - 1e-5;
constexpr double kEulerGamma = 0.57721566490153286060651209;

// digamma at integer or half-integer arguments (2x integral), exact forms
double digamma_int_half(int twice_x) {
    if (twice_x % 2 == 0) {
        double psi = -kEulerGamma;
        for (int j = 1; j < twice_x / 2; ++j) psi += 1.0 / j;
        return psi;
    }
    double psi = -kEulerGamma - 2.0 * std::log(2.0);
    for (int j = 1; j < twice_x; j += 2) psi += 2.0 / j;
    return psi;
}

// R_ell via the ascending Gauss series with the Gamma prefactor and s^ell
// folded into the leading term: all terms are positive and partial sums are
// bounded by the result (<= 1), so nothing can overflow.
double r_ell_series(int l, double s, double z, double lg_pre,
                    const SeriesControl& ctl) {
    const double a = 0.5 * l;
    const double c = 1.0 + l;
    double u = std::exp(lg_pre + l * std::log(s));
    if (u == 0.0) return 0.0;  // genuinely below double range
    double sum = u;
    // terms ramp up to k ~ a/sqrt(1-z) before the geometric decay wins
    const double need =
        1.5 * a / std::sqrt(1.0 - z) + 60.0 / (1.0 - z);
    const std::size_t max_terms = std::max(
        ctl.max_terms,
        static_cast<std::size_t>(std::min(need, 6e6)));
    // stop once the geometric tail bound u z/(1-z) is below tolerance
    const double tail_factor = (1.0 - z) / z;
    for (std::size_t k = 0; k < max_terms; ++k) {
        const double kk = static_cast<double>(k);
        u *= (a + kk) * (a + kk) * z / ((c + kk) * (kk + 1.0));
        sum += u;
        if (u <= ctl.rel_tol * sum * tail_factor) return sum;
    }
    throw ConvergenceError("r_ell: series did not converge", u / sum);
}

// Connection expansion at z -> 1:
// R = s^l [1 + a^2 (1-z) sum_n t_n (ln(1-z) - psi(n+1) - psi(n+2)
//                                   + 2 psi(a+n+1))],
// t_n = ((a+1)_n)^2 (1-z)^n / (n! (n+1)!). Converges in powers of (1-z).
double r_ell_boundary(int l, double s, double z, const SeriesControl& ctl) {
    const double a = 0.5 * l;
    const double eps = 1.0 - z;
    const double log_eps = std::log(eps);
    double t = 1.0;
    double psi_n1 = digamma_int_half(2);          // psi(1)
    double psi_n2 = digamma_int_half(4);          // psi(2)
    double psi_an = digamma_int_half(l + 2);      // psi(a + 1)
    double acc = 0.0;
    int quiet = 0;
    for (std::size_t n = 0; n < std::max<std::size_t>(ctl.max_terms, 10000);
         ++n) {
        const double nn = static_cast<double>(n);
        const double term = t * (log_eps - psi_n1 - psi_n2 + 2.0 * psi_an);
        acc += term;
        if (std::abs(term) <= ctl.rel_tol * (1.0 + std::abs(acc)))
            ++quiet;
        else
            quiet = 0;
        if (quiet >= 2)
            return std::pow(s, l) * (1.0 + a * a * eps * acc);
        t *= (a + 1.0 + nn) * (a + 1.0 + nn) * eps /
             ((nn + 1.0) * (nn + 2.0));
        psi_n1 += 1.0 / (nn + 1.0);
        psi_n2 += 1.0 / (nn + 2.0);
        psi_an += 1.0 / (a + 1.0 + nn);
    }
    throw ConvergenceError("r_ell: boundary expansion did not converge",
                           std::abs(t));
}

}  // namespace

DetectionParams::DetectionParams(double wG) : wG_um(wG) {
    if (!(wG > 0.0))
        throw std::invalid_argument("DetectionParams: requires wG > 0");
}

double s_param(const SourceParams& p, const DetectionParams& d) {
    const double x = xi(p);
    const double ratio = schmidt_width(p) / d.wG_um;
    return 2.0 * x / (1.0 + x * x + (1.0 - x * x) * ratio * ratio);
}

double r_ell(double s, int ell, const SeriesControl& ctl) {
    if (s < 0.0 || s > 1.0)
        throw std::domain_error("r_ell: s must lie in [0, 1]");
    const int l = std::abs(ell);
    if (l == 0) return 1.0;
    if (s == 0.0) return 0.0;
    const double lg_half = ln_gamma(1.0 + 0.5 * l);
    const double lg_full = ln_gamma(1.0 + l);
    const double lg_pre = 2.0 * lg_half - lg_full;
    if (s == 1.0) {
        // Gauss summation: the logs cancel exactly, R_ell(1) = 1.
        return std::exp(lg_pre + (lg_full - 2.0 * lg_half));
    }
    const double z = s * s;
    if (z > kBoundaryZ) return r_ell_boundary(l, s, z, ctl);
    return r_ell_series(l, s, z, lg_pre, ctl);
}

double r_ell_full(const SourceParams& p, const DetectionParams& d, int ell,
                  const SeriesControl& ctl) {
    const double x = xi(p);
    const double g = 1.0 - x * x;
    const double ratio = schmidt_width(p) / d.wG_um;
    const double asym = ratio - 1.0 / ratio;
    const double prefactor = g / (1.0 + 0.25 * g * asym * asym);
    return prefactor * r_ell(s_param(p, d), ell, ctl);
}

double r_ell_oracle(const SourceParams& p, const DetectionParams& d, int ell,
                    const SeriesControl& ctl) {
    const int l = std::abs(ell);
    const double x = xi(p);
    const double wS = schmidt_width(p);
    const double wG = d.wG_um;

    const int nodes = 400;
    const QuadRule& rule = gauss_legendre(nodes);
    const double rmax = 8.0 * std::max(wS, wG);

    // Fixed per-node factors: fiber mode, measure, and the n-independent part
    // of the Schmidt mode.
    std::vector<double> base(nodes), arg(nodes), lm1(nodes, 0.0), lc(nodes, 1.0);
    for (int j = 0; j < nodes; ++j) {
        const double r = 0.5 * rmax * (rule.nodes[j] + 1.0);
        const double wj = 0.5 * rmax * rule.weights[j];
        const double fiber = (2.0 / wG) * std::exp(-r * r / (wG * wG));
        const double u = std::sqrt(2.0) * r / wS;
        base[j] = wj * r * fiber * (2.0 / wS) * std::pow(u, l) *
                  std::exp(-r * r / (wS * wS));
        arg[j] = 2.0 * r * r / (wS * wS);
        lc[j] = 1.0;  // L_0^l
    }

    double normf = 1.0;  // sqrt(n! / (n+l)!) at n = 0 ... updated below
    for (int k = 1; k <= l; ++k) normf /= std::sqrt(static_cast<double>(k));

    double sum = 0.0;
    int quiet = 0;  // consecutive negligible terms; overlaps can graze zero
    const int n_cap = 2000;
    for (int n = 0; n <= n_cap; ++n) {
        double overlap = 0.0;
        for (int j = 0; j < nodes; ++j) overlap += base[j] * lc[j];
        overlap *= normf;
        const double rt_lambda = (1.0 - x * x) * std::pow(x, l + 2.0 * n);
        const double term = rt_lambda * overlap * overlap;
        sum += term;
        if (std::abs(term) <= ctl.rel_tol * std::max(std::abs(sum), 1e-300))
            ++quiet;
        else
            quiet = 0;
        if (n >= 1 && quiet >= 2) return sum;
        // Advance the Laguerre recurrence and the normalisation factor.
        for (int j = 0; j < nodes; ++j) {
            const double lp1 =
                ((2.0 * n + l + 1.0 - arg[j]) * lc[j] - (n + l) * lm1[j]) /
                (n + 1.0);
            lm1[j] = lc[j];
            lc[j] = lp1;
        }
        normf *= std::sqrt((n + 1.0) / (n + 1.0 + l));
    }
    throw ConvergenceError("r_ell_oracle: radial-index sum did not converge",
                           ctl.rel_tol);
}

RadialTable RadialTable::build(double s, int lmax, const SeriesControl& ctl) {
    if (s < 0.0 || s > 1.0)
        throw std::domain_error("RadialTable: s must lie in [0, 1]");
    if (lmax < 0) throw std::domain_error("RadialTable: lmax must be >= 0");
    RadialTable t;
    t.s = s;
    t.values.resize(lmax + 1);
    if (s == 1.0) {
        std::fill(t.values.begin(), t.values.end(), 1.0);
    } else {
        for (int l = 0; l <= lmax; ++l) t.values[l] = r_ell(s, l, ctl);
    }
    return t;
}

double RadialTable::operator()(int ell) const {
    const int l = std::abs(ell);
    if (l >= static_cast<int>(values.size()))
        throw std::out_of_range("RadialTable: ell beyond table range");
    return values[l];
}

}  // namespace oamcoinc
