#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "oamcoinc/coincidence.hpp"

namespace oamcoinc {

/// One measured coincidence point: relative plate orientation (rad), raw
/// counts, optional count uncertainty. Missing sigmas default to sqrt(counts)
/// (shot noise) during fitting.
struct MeasurementPoint {
    double alpha = 0.0;
    double counts = 0.0;
    std::optional<double> sigma;
};

struct MeasurementSet {
    std::vector<MeasurementPoint> points;
    void validate() const;  // >= 5 points, alphas in [0, 2pi), counts >= 0
};

/// Read `alpha_deg,counts[,sigma]` rows (with header); angles are converted
/// to radians here and nowhere else.
MeasurementSet load_measurements_csv(std::istream& in);

/// Plate pair whose normalized coincidence curve is fitted; instrument
/// parameters eta (and beta for diaphragms) are inputs, never fitted.
struct PlateModel {
    enum class Kind { AngularDiaphragm, SpiralPhasePlate } kind;
    double eta = 0.5;
    double beta = 3.14159265358979323846 / 2.0;  // used by AD only
    /// Normalized model curve at radial parameter s and orientation alpha.
    double operator()(double s, double alpha) const;
    /// Batch version: one radial table for the whole grid.
    std::vector<double> normalized(double s,
                                   const std::vector<double>& alphas) const;
};

struct FitOptions {
    bool fit_offset = false;    // free angular offset (default off)
    bool fit_baseline = false;  // free additive baseline (default off)
    bool weighted = true;       // chi^2 with sigma weights; else plain SSE
    double s_lo = 0.01;
    double s_hi = 0.999;
    int scan_points = 64;       // coarse profile scan before refinement
    double s_tol = 1e-6;        // golden-section tolerance in s
};

struct FitResult {
    double s_hat = 0.0;
    double scale = 0.0;
    std::optional<double> offset_alpha;
    std::optional<double> baseline;
    double rss = 0.0;      // weighted residual sum of squares at the optimum
    double s_sigma = 0.0;  // curvature-based 1-sigma uncertainty
    bool at_boundary = false;
    bool degenerate = false;  // objective flat in s (model alpha-independent)
};

/// Profile fit of the single radial parameter s: for each s the scale (and
/// baseline, if free) are solved linearly; s itself is located by a grid
/// scan refined with golden-section search.
FitResult fit_s(const MeasurementSet& data, const PlateModel& model,
                const FitOptions& options = {});

/// Experimental Schmidt number K(s, mu) = (1 + 2 s mu^2)^2 /
/// [(1 - s)(1 + s + 4 s mu^2)], with mu = w0 / wG.
double schmidt_number_experimental(double s, double mu);

struct KInterval {
    double k_low = 0.0;
    double k_hat = 0.0;
    double k_high = 0.0;
    bool clipped = false;  // s_hat +/- s_sigma left (0, 1) and was clipped
};

/// Delta-method interval: K evaluated at s_hat and s_hat +/- s_sigma.
KInterval k_interval(const FitResult& fit, double mu);

/// Deterministic synthetic data set: scale * model(s, alpha) perturbed by
/// Gaussian noise proportional to each point's clean value (noise_frac
/// relative). Box-Muller over mt19937_64, so the stream is identical across
/// platforms. Sigmas are filled in to match the noise actually applied.
MeasurementSet synthesize(const PlateModel& model, double s, double scale,
                          double noise_frac, int n_angles, std::uint64_t seed);

}  // namespace oamcoinc
