#pragma once

#include <complex>
#include <iosfwd>

#include "oamcoinc/specfun.hpp"

namespace oamcoinc {

// Unit conventions used throughout: lengths in micrometres, transverse
// wave vectors in rad/um, angles in radians.

/// Down-conversion source: pump waist w0 and effective phase-matching
/// width b, both in um. Requires 0 < b <= w0 (b = w0 is the separable limit).
struct SourceParams {
    double w0_um;
    double b_um;
    SourceParams(double w0, double b);
};

/// Mode labels of the Laguerre-Gaussian family: topological charge ell and
/// radial index n >= 0.
struct ModeIndex {
    int ell = 0;
    int n = 0;
};

/// Transverse wave vector, Cartesian components in rad/um.
struct TransverseVec {
    double qx = 0.0;
    double qy = 0.0;
};

inline TransverseVec operator+(TransverseVec a, TransverseVec b) {
    return {a.qx + b.qx, a.qy + b.qy};
}
inline TransverseVec operator-(TransverseVec a, TransverseVec b) {
    return {a.qx - b.qx, a.qy - b.qy};
}
inline double norm2(TransverseVec v) { return v.qx * v.qx + v.qy * v.qy; }

/// xi = (w0 - b) / (w0 + b), in [0, 1); zero iff b = w0.
double xi(const SourceParams& p);

/// Schmidt eigenvalue lambda_{ell,n} = (1 - xi^2)^2 xi^{2|ell| + 4n}.
double schmidt_lambda(const SourceParams& p, ModeIndex m);

/// Closed-form Schmidt number K = [(1 + xi^2)/(1 - xi^2)]^2.
double schmidt_number_closed(const SourceParams& p);

/// 1 / sum of lambda^2 truncated to |ell| <= lmax, n <= nmax; converges to
/// the closed form from above.
double schmidt_number_truncated(const SourceParams& p, int lmax, int nmax);

/// Truncated sum of the eigenvalues themselves (analytically 1).
double schmidt_lambda_total(const SourceParams& p, int lmax, int nmax);

/// Schmidt width w_S = sqrt(2 w0 b), um.
double schmidt_width(const SourceParams& p);

/// Measurable idler/signal beam width W = sqrt(2 w0^2 + b^2), um.
double beam_width(const SourceParams& p);

/// Truncation level at which the lambda tail drops below ~1e-14.
int default_mode_lmax(double xi_value);

/// Radial profile of the normalised Laguerre-Gaussian mode of waist w in the
/// transverse-momentum representation; normalised as
/// integral of v^2 q dq = 1. The full mode is
/// e^{i ell phi} * lg_mode_phase(m) * lg_radial_mom(...) / sqrt(2 pi).
double lg_radial_mom(ModeIndex m, double w_um, double q);

/// Same mode family in the transverse-position representation at the waist
/// plane (normalised against integral v^2 r dr = 1).
double lg_radial_pos(ModeIndex m, double w_um, double r_um);

/// Mode phase convention exp[-i pi/2 (2n + |ell|)]; cancels in all
/// coincidence magnitudes but is needed for amplitude reconstruction.
std::complex<double> lg_mode_phase(ModeIndex m);

/// Double-Gaussian two-photon amplitude
/// (w0 b / pi) exp(-w0^2 |qi+qs|^2 / 4) exp(-b^2 |qi-qs|^2 / 4).
double two_photon_amplitude(const SourceParams& p, TransverseVec qi,
                            TransverseVec qs);

/// Partial Schmidt sum over |ell| <= lmax, n <= nmax with w_S modes;
/// converges pointwise to two_photon_amplitude.
std::complex<double> reconstruct_amplitude(const SourceParams& p,
                                           TransverseVec qi, TransverseVec qs,
                                           int lmax, int nmax);

/// Write the eigenvalue spectrum as CSV rows `l,n,lambda` for
/// |l| <= lmax, n <= nmax.
void write_spectrum_csv(std::ostream& os, const SourceParams& p, int lmax,
                        int nmax);

}  // namespace oamcoinc
