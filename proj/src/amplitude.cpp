#include "oamcoinc/amplitude.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace oamcoinc {

namespace {
constexpr double kPi = std::numbers::pi;
}

SourceParams::SourceParams(double w0, double b) : w0_um(w0), b_um(b) {
    if (!(b > 0.0) || !(b <= w0))
        throw std::invalid_argument("SourceParams: requires 0 < b <= w0");
}

double xi(const SourceParams& p) {
    return (p.w0_um - p.b_um) / (p.w0_um + p.b_um);
}

double schmidt_lambda(const SourceParams& p, ModeIndex m) {
    if (m.n < 0) throw std::domain_error("schmidt_lambda: n must be >= 0");
    const double x = xi(p);
    const double g = 1.0 - x * x;
    return g * g * std::pow(x, 2.0 * std::abs(m.ell) + 4.0 * m.n);
}

double schmidt_number_closed(const SourceParams& p) {
    const double x2 = xi(p) * xi(p);
    const double r = (1.0 + x2) / (1.0 - x2);
    return r * r;
}

double schmidt_number_truncated(const SourceParams& p, int lmax, int nmax) {
    if (lmax < 0 || nmax < 0)
        throw std::domain_error("schmidt_number_truncated: bad truncation");
    const double x = xi(p);
    if (x == 0.0) return 1.0;
    const double x4 = std::pow(x, 4);
    const double x8 = std::pow(x, 8);
    // sum over n of xi^{8n}, truncated
    double nsum = 0.0, xn = 1.0;
    for (int n = 0; n <= nmax; ++n, xn *= x8) nsum += xn;
    // sum over ell of xi^{4|ell|}, truncated
    double lsum = 1.0, xl = 1.0;
    for (int l = 1; l <= lmax; ++l) {
        xl *= x4;
        lsum += 2.0 * xl;
    }
    const double g = 1.0 - x * x;
    return 1.0 / (g * g * g * g * lsum * nsum);
}

double schmidt_lambda_total(const SourceParams& p, int lmax, int nmax) {
    const double x = xi(p);
    if (x == 0.0) return 1.0;
    const double x2 = x * x;
    const double x4 = x2 * x2;
    double nsum = 0.0, xn = 1.0;
    for (int n = 0; n <= nmax; ++n, xn *= x4) nsum += xn;
    double lsum = 1.0, xl = 1.0;
    for (int l = 1; l <= lmax; ++l) {
        xl *= x2;
        lsum += 2.0 * xl;
    }
    const double g = 1.0 - x2;
    return g * g * lsum * nsum;
}

double schmidt_width(const SourceParams& p) {
    return std::sqrt(2.0 * p.w0_um * p.b_um);
}

double beam_width(const SourceParams& p) {
    return std::sqrt(2.0 * p.w0_um * p.w0_um + p.b_um * p.b_um);
}

int default_mode_lmax(double xi_value) {
    if (xi_value <= 0.0) return 32;
    const double need = std::ceil(std::log(1e-14) / std::log(xi_value)) / 2.0;
    return std::max(32, static_cast<int>(need));
}

double lg_radial_mom(ModeIndex m, double w_um, double q) {
    if (!(w_um > 0.0)) throw std::domain_error("lg_radial_mom: w must be > 0");
    if (q < 0.0) throw std::domain_error("lg_radial_mom: q must be >= 0");
    const int l = std::abs(m.ell);
    const double u = 0.5 * w_um * w_um * q * q;   // w^2 q^2 / 2
    const double normf =
        std::exp(0.5 * (ln_gamma(m.n + 1.0) - ln_gamma(m.n + l + 1.0)));
    return w_um * normf * std::pow(std::sqrt(u), l) * assoc_laguerre(m.n, l, u) *
           std::exp(-0.5 * u);
}

double lg_radial_pos(ModeIndex m, double w_um, double r_um) {
    // Same functional family: position waist w corresponds to momentum-space
    // waist parameter 2/w.
    return lg_radial_mom(m, 2.0 / w_um, r_um);
}

std::complex<double> lg_mode_phase(ModeIndex m) {
    switch ((2 * m.n + std::abs(m.ell)) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

double two_photon_amplitude(const SourceParams& p, TransverseVec qi,
                            TransverseVec qs) {
    const double w0 = p.w0_um, b = p.b_um;
    return (w0 * b / kPi) * std::exp(-0.25 * w0 * w0 * norm2(qi + qs)) *
           std::exp(-0.25 * b * b * norm2(qi - qs));
}

std::complex<double> reconstruct_amplitude(const SourceParams& p,
                                           TransverseVec qi, TransverseVec qs,
                                           int lmax, int nmax) {
    const double wS = schmidt_width(p);
    const double qi_r = std::sqrt(norm2(qi)), qs_r = std::sqrt(norm2(qs));
    const double phi_i = std::atan2(qi.qy, qi.qx);
    const double phi_s = std::atan2(qs.qy, qs.qx);
    std::complex<double> sum = 0.0;
    for (int l = -lmax; l <= lmax; ++l) {
        const std::complex<double> azim =
            std::exp(std::complex<double>(0.0, l * (phi_i - phi_s)));
        for (int n = 0; n <= nmax; ++n) {
            const double rt = std::sqrt(schmidt_lambda(p, {l, n}));
            if (rt == 0.0) continue;
            const ModeIndex mi{l, n}, ms{-l, n};
            // The idler/signal mode phases multiply to (-1)^l; that IS the
            // alternating sign of the Schmidt expansion, so no extra parity
            // factor may appear here.
            const std::complex<double> ph = lg_mode_phase(mi) * lg_mode_phase(ms);
            sum += rt * azim * ph * lg_radial_mom(mi, wS, qi_r) *
                   lg_radial_mom(ms, wS, qs_r) / (2.0 * kPi);
        }
    }
    return sum;
}

void write_spectrum_csv(std::ostream& os, const SourceParams& p, int lmax,
                        int nmax) {
    os << "l,n,lambda\n";
    char buf[64];
    for (int l = -lmax; l <= lmax; ++l) {
        for (int n = 0; n <= nmax; ++n) {
            std::snprintf(buf, sizeof buf, "%d,%u,%.12e\n", l,
                          static_cast<unsigned>(n), schmidt_lambda(p, {l, n}));
            os << buf;
        }
    }
}

}  // namespace oamcoinc
