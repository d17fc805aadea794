#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "oamcoinc/amplitude.hpp"

namespace oamcoinc {

/// Refractive index vs vacuum wavelength (um), piecewise linear; a single
/// entry acts as a constant model. Evaluation outside the tabulated range
/// throws.
struct IndexModel {
    std::vector<std::pair<double, double>> table;  // (lambda_um, n), sorted
    static IndexModel constant(double n);
    static IndexModel from_csv(std::istream& in);  // rows `lambda_um,n`
    double operator()(double lambda_um) const;
};

/// Collinear type-II crystal description. All operations run at frequency
/// degeneracy: idler and signal at twice the pump wavelength.
struct CrystalConfig {
    double L_um;          // crystal thickness
    double lambda_p_um;   // pump vacuum wavelength
    double theta_oa;      // optical axis vs propagation axis, rad
    IndexModel n_o;
    IndexModel n_e;

    CrystalConfig(double L_um, double lambda_p_um, double theta_oa,
                  IndexModel n_o, IndexModel n_e);
    double k_p() const;   // vacuum pump wavenumber, rad/um
};

/// The three angular index combinations at a given wavelength:
/// 1/n_e^2(theta) = sin^2/n_e^2 + cos^2/n_o^2,
/// 1/n_e'^2(theta) = cos^2/n_e^2 + sin^2/n_o^2,
/// 1/n~^2 = 1/n_o^2 - 1/n_e^2 (reported as the inverse square, which is the
/// combination the mismatch uses and stays finite for isotropic media).
struct AngularIndices {
    double n_e_theta;
    double n_e_prime_theta;
    double inv_n_tilde_sq;
};

AngularIndices angular_indices(const CrystalConfig& cfg, double lambda_um);

/// Full anisotropic collinear wave-vector mismatch at frequency degeneracy:
/// longitudinal index mismatch, the linear walk-off terms in q_sx, q_ix, and
/// the quadratic transverse terms. Sets *collinear_warning if |q| exceeds
/// 0.1 k_p on either beam.
double delta_full(const CrystalConfig& cfg, TransverseVec qi, TransverseVec qs,
                  bool* collinear_warning = nullptr);

/// Isotropic approximation Delta = |qi - qs|^2 / (2 k_p n_eff).
double delta_iso(double n_eff, double k_p, TransverseVec qi, TransverseVec qs);

/// sinc(Delta_full L/2) vs exp(-Delta_iso L/2) along the anticorrelated slice
/// qi = -qs = dq/2 x^, with the relative L2 error taken over the region the
/// pinhole passes (dq <= pinhole).
struct ProfileComparison {
    std::vector<double> dq;
    std::vector<double> sinc_profile;
    std::vector<double> gauss_profile;
    double rel_l2_error = 0.0;
};

ProfileComparison compare_profiles(const CrystalConfig& cfg, double n_eff,
                                   std::span<const double> dq_grid,
                                   double pinhole);

struct NeffFit {
    double n_eff = 1.0;
    double rel_l2_error = 0.0;
    bool at_boundary = false;
};

/// n_eff minimising the comparison error, golden-section over (0.1, 10).
NeffFit fit_neff(const CrystalConfig& cfg, std::span<const double> dq_grid,
                 double pinhole);

/// Effective phase-matching width b = sqrt(L / (k_p n_eff)) in um, matching
/// exp(-(L / 4 k_p n_eff)|qi-qs|^2) against exp(-b^2 |qi-qs|^2 / 4).
double effective_b(double L_um, double lambda_p_um, double n_eff);

}  // namespace oamcoinc
