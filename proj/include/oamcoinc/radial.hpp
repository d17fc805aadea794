#pragma once

#include <vector>

#include "oamcoinc/amplitude.hpp"
#include "oamcoinc/specfun.hpp"

namespace oamcoinc {

/// Detection side: fundamental fiber-mode width at the plate plane, um.
struct DetectionParams {
    double wG_um;
    explicit DetectionParams(double wG);
};

/// s = 2 xi / [1 + xi^2 + (1 - xi^2)(wS/wG)^2]; equals xi iff wS = wG.
double s_param(const SourceParams& p, const DetectionParams& d);

/// Radial overlap weight of OAM channel ell,
/// R_ell(s) = Gamma^2(1+|ell|/2)/Gamma(1+|ell|) F(|ell|/2,|ell|/2;1+|ell|;s^2) s^|ell|.
/// R_0 = 1 identically; R_ell(1) = 1 via Gauss summation.
double r_ell(double s, int ell, const SeriesControl& ctl = {});

/// Same overlap including the ell-independent prefactor
/// (1 - xi^2) / [1 + (1-xi^2)/4 (wS/wG - wG/wS)^2].
double r_ell_full(const SourceParams& p, const DetectionParams& d, int ell,
                  const SeriesControl& ctl = {});

/// Brute-force evaluation of the defining overlap integrals:
/// sum_n sqrt(lambda_{ell,n}) [int v^{(wG)}_{0,0} v^{(wS)}_{ell,n} r dr]^2
/// by Gauss-Legendre quadrature; independent check of r_ell_full.
double r_ell_oracle(const SourceParams& p, const DetectionParams& d, int ell,
                    const SeriesControl& ctl = {});

/// Precomputed R_ell values for ell = 0..lmax at fixed s (symmetric in ell).
struct RadialTable {
    double s = 0.0;
    std::vector<double> values;

    static RadialTable build(double s, int lmax, const SeriesControl& ctl = {});
    int lmax() const { return static_cast<int>(values.size()) - 1; }
    double operator()(int ell) const;
};

}  // namespace oamcoinc
