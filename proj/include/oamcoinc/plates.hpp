#pragma once

#include <complex>
#include <iosfwd>
#include <variant>
#include <vector>

namespace oamcoinc {

/// One azimuthal segment with a linear phase ramp:
/// theta(phi) = theta0 + (theta1 - theta0) (phi - phi0)/(phi1 - phi0).
struct PlateSegment {
    double phi0 = 0.0;
    double phi1 = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;
};

/// Angular diaphragm: a "cake-slice" indentation of aperture beta with zero
/// phase, the rest of the disc at the constant step phase 2 pi eta.
struct AngularDiaphragm {
    double beta;  // aperture angle, in (0, 2 pi)
    double eta;   // step parameter (n0 - 1) d / lambda
};

/// Spiral phase plate: theta(phi) = eta * phi over one turn.
struct SpiralPhasePlate {
    double eta;
};

/// Arbitrary piecewise-linear azimuthal profile; segments must partition
/// [0, 2 pi) contiguously. Build through make_custom_plate.
struct CustomPlate {
    std::vector<PlateSegment> segments;
};

using PlateSpec = std::variant<AngularDiaphragm, SpiralPhasePlate, CustomPlate>;

/// Plate rotation angle, radians; reduced mod 2 pi where it matters.
struct Orientation {
    double alpha = 0.0;
};

/// Validated constructor for custom plates (throws std::invalid_argument if
/// the segments do not partition [0, 2 pi)).
CustomPlate make_custom_plate(std::vector<PlateSegment> segments);

/// Parse a plate from CSV rows `phi_start,phi_end,theta_start,theta_end`
/// (radians, with header).
CustomPlate load_plate_csv(std::istream& in);

/// Segment representation of any plate at orientation zero.
std::vector<PlateSegment> plate_segments(const PlateSpec& plate);

/// Profile theta(phi) of the idler plate (sign = +1) or of the complementary
/// signal plate theta_s = -theta_i (sign = -1), at orientation zero.
double phase_profile(const PlateSpec& plate, int sign, double phi);

/// Spiral-harmonic impulse coefficient
/// h_{ell_out, ell_in} = (1/2 pi) int e^{i(ell_in - ell_out) phi}
///                       e^{i sign theta(phi - alpha)} dphi,
/// each linear-phase segment integrated in closed form.
std::complex<double> impulse_coeff(const PlateSpec& plate, int sign,
                                   Orientation o, int ell_out, int ell_in);

/// Row of coefficients h_{ell_out, ell} for ell in [-lmax, lmax]; index
/// ell + lmax. Equivalent to impulse_coeff but amortises the segment setup.
std::vector<std::complex<double>> impulse_row(const PlateSpec& plate, int sign,
                                              Orientation o, int ell_out,
                                              int lmax);

/// Numerical check of unitarity: max over ell, ell' in [-lmax, lmax] of
/// |sum_{|l''| <= 3 lmax} conj(h_{l'',ell}) h_{l'',ell'} - delta|.
double unitarity_defect(const PlateSpec& plate, int sign, Orientation o,
                        int lmax);

}  // namespace oamcoinc
