#pragma once

#include <functional>
#include <span>
#include <vector>

#include "oamcoinc/plates.hpp"
#include "oamcoinc/radial.hpp"

namespace oamcoinc {

/// Engine knobs. signal_offset absorbs the 180-degree inversion of the
/// reference axes of a complementary plate pair: with the default pi, the
/// relative angle alpha = 0 is the coincidence maximum.
struct EngineOptions {
    int lmax = 64;
    double signal_offset = 3.14159265358979323846;
    double rel_tol = 1e-12;
};

struct TruncationInfo {
    bool warning = false;
    double last_term_ratio = 0.0;
};

/// Coincidence probability for fundamental-mode fiber detection behind the
/// plate pair: |sum_l (-1)^l R_|l| h^{(i)}_{0,l} h^{(s)}_{0,-l}|^2 with the
/// idler plate at orientation alpha and the signal plate (profile -theta) at
/// its axis offset.
double coincidence_general(const PlateSpec& plate_i, const PlateSpec& plate_s,
                           double alpha, const RadialTable& table,
                           const EngineOptions& opt,
                           TruncationInfo* info = nullptr);

/// Closed-form angular-diaphragm distribution (up to an alpha-independent
/// constant): [R_0 ((beta-pi)^2 + pi^2 cot^2(pi eta))
///             + 8 sum_{l>=1} R_l cos(l alpha) sin^2(l beta/2)/l^2]^2.
/// Integer eta yields a constant profile and is returned as such.
double ad_closed(double alpha, double beta, double eta, const RadialTable& table);
double ad_closed(double alpha, double beta, double eta, double s, int lmax,
                 const SeriesControl& ctl = {});

/// s -> 1 limit of the angular-diaphragm distribution:
/// pi^2 [pi(cot^2(pi eta) - 1) + |2pi - alpha - beta| + |alpha - beta|]^2.
double ad_limit_s1(double alpha, double beta, double eta);

/// Closed-form spiral-phase-plate distribution
/// |sum_l R_|l| e^{i l alpha} (l + eta)^{-2}|^2 (integer eta: constant).
double spp_closed(double alpha, double eta, const RadialTable& table);
double spp_closed(double alpha, double eta, double s, int lmax,
                  const SeriesControl& ctl = {});

/// s -> 1 limit of the spiral-phase-plate distribution:
/// pi^2 [pi^2 cot^2(pi eta) + (alpha - pi)^2] / sin^2(pi eta).
double spp_limit_s1(double alpha, double eta);

/// Truncation level with tail of R_l / l^2 below ~1e-12, capped at 1024:
/// near s = 1 the series decays only algebraically and the cap leaves a
/// relative truncation residue that coincidence_general reports through
/// TruncationInfo.
int default_engine_lmax(double s);

/// Coincidence curve over a grid of relative orientations. normalized is
/// raw / raw(alpha = 0); if that normaliser vanishes the curve falls back to
/// max-normalisation and sets normalized_by_max.
struct CoincidenceCurve {
    std::vector<double> alphas;
    std::vector<double> raw;
    std::vector<double> normalized;
    bool normalized_by_max = false;
    bool truncation_warning = false;
};

CoincidenceCurve sweep_curve(const std::function<double(double)>& model,
                             std::span<const double> alphas);

/// (max - min) / (max + min) of a curve.
double visibility(std::span<const double> values);

}  // namespace oamcoinc
