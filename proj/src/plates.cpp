#include "oamcoinc/plates.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace oamcoinc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSegmentTol = 1e-9;

double wrap_2pi(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

// sin(x)/x with the small-argument limit; keeps segment integrals finite at
// integer-eta resonances.
double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

void validate_segments(const std::vector<PlateSegment>& segs) {
    if (segs.empty())
        throw std::invalid_argument("plate segments: empty profile");
    double cursor = 0.0;
    for (const auto& s : segs) {
        if (std::abs(s.phi0 - cursor) > kSegmentTol)
            throw std::invalid_argument("plate segments: gap or overlap in [0, 2pi)");
        if (!(s.phi1 > s.phi0))
            throw std::invalid_argument("plate segments: non-positive width");
        cursor = s.phi1;
    }
    if (std::abs(cursor - kTwoPi) > kSegmentTol)
        throw std::invalid_argument("plate segments: profile must end at 2pi");
}

}  // namespace

CustomPlate make_custom_plate(std::vector<PlateSegment> segments) {
    std::sort(segments.begin(), segments.end(),
              [](const PlateSegment& a, const PlateSegment& b) {
                  return a.phi0 < b.phi0;
              });
    validate_segments(segments);
    return CustomPlate{std::move(segments)};
}

CustomPlate load_plate_csv(std::istream& in) {
    std::string line;
    std::vector<PlateSegment> segs;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.find("phi_start") != std::string::npos) continue;
        }
        std::istringstream row(line);
        PlateSegment s;
        char c1, c2, c3;
        if (!(row >> s.phi0 >> c1 >> s.phi1 >> c2 >> s.theta0 >> c3 >> s.theta1) ||
            c1 != ',' || c2 != ',' || c3 != ',')
            throw std::invalid_argument("plate csv: bad row: " + line);
        segs.push_back(s);
    }
    return make_custom_plate(std::move(segs));
}

std::vector<PlateSegment> plate_segments(const PlateSpec& plate) {
    return std::visit(
        [](const auto& p) -> std::vector<PlateSegment> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, AngularDiaphragm>) {
                if (!(p.beta > 0.0) || !(p.beta < kTwoPi))
                    throw std::invalid_argument(
                        "AngularDiaphragm: beta must lie in (0, 2pi)");
                const double step = wrap_2pi(kTwoPi * p.eta);
                return {{0.0, p.beta, 0.0, 0.0},
                        {p.beta, kTwoPi, step, step}};
            } else if constexpr (std::is_same_v<T, SpiralPhasePlate>) {
                return {{0.0, kTwoPi, 0.0, p.eta * kTwoPi}};
            } else {
                return p.segments;
            }
        },
        plate);
}

double phase_profile(const PlateSpec& plate, int sign, double phi) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("phase_profile: sign must be +1 or -1");
    const double x = wrap_2pi(phi);
    const auto segs = plate_segments(plate);
    for (const auto& s : segs) {
        if (x >= s.phi0 - kSegmentTol && x < s.phi1) {
            const double t =
                s.theta0 + (s.theta1 - s.theta0) * (x - s.phi0) / (s.phi1 - s.phi0);
            return sign * t;
        }
    }
    // boundary round-off: belongs to the last segment's end
    return sign * segs.back().theta1;
}

namespace {

std::complex<double> coeff_from_segments(const std::vector<PlateSegment>& segs,
                                         int sign, double alpha, int m) {
    // (1/2pi) int_0^{2pi} e^{i m phi} e^{i sign theta(phi - alpha)} dphi
    //   = e^{i m alpha} (1/2pi) sum_seg int e^{i m psi + i sign theta(psi)} dpsi.
    std::complex<double> acc = 0.0;
    for (const auto& s : segs) {
        const double width = s.phi1 - s.phi0;
        const double slope = (s.theta1 - s.theta0) / width;
        const double a = m + sign * slope;
        const double phase0 = m * s.phi0 + sign * s.theta0;
        const double half = 0.5 * a * width;
        acc += width * sinc(half) *
               std::exp(std::complex<double>(0.0, phase0 + half));
    }
    return std::exp(std::complex<double>(0.0, m * alpha)) * acc / kTwoPi;
}

}  // namespace

std::complex<double> impulse_coeff(const PlateSpec& plate, int sign,
                                   Orientation o, int ell_out, int ell_in) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("impulse_coeff: sign must be +1 or -1");
    return coeff_from_segments(plate_segments(plate), sign, o.alpha,
                               ell_in - ell_out);
}

std::vector<std::complex<double>> impulse_row(const PlateSpec& plate, int sign,
                                              Orientation o, int ell_out,
                                              int lmax) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("impulse_row: sign must be +1 or -1");
    if (lmax < 0) throw std::invalid_argument("impulse_row: lmax must be >= 0");
    const auto segs = plate_segments(plate);
    std::vector<std::complex<double>> row(2 * lmax + 1);
    for (int l = -lmax; l <= lmax; ++l)
        row[l + lmax] = coeff_from_segments(segs, sign, o.alpha, l - ell_out);
    return row;
}

double unitarity_defect(const PlateSpec& plate, int sign, Orientation o,
                        int lmax) {
    if (lmax < 1) throw std::invalid_argument("unitarity_defect: lmax must be >= 1");
    const int cutoff = 3 * lmax;
    const auto segs = plate_segments(plate);
    // h[l''][l] for l'' in [-cutoff, cutoff], l in [-lmax, lmax]
    std::vector<std::vector<std::complex<double>>> h(
        2 * cutoff + 1, std::vector<std::complex<double>>(2 * lmax + 1));
    for (int lo = -cutoff; lo <= cutoff; ++lo)
        for (int li = -lmax; li <= lmax; ++li)
            h[lo + cutoff][li + lmax] =
                coeff_from_segments(segs, sign, o.alpha, li - lo);
    double defect = 0.0;
    for (int l1 = -lmax; l1 <= lmax; ++l1) {
        for (int l2 = -lmax; l2 <= lmax; ++l2) {
            std::complex<double> dot = 0.0;
            for (int lo = -cutoff; lo <= cutoff; ++lo)
                dot += std::conj(h[lo + cutoff][l1 + lmax]) *
                       h[lo + cutoff][l2 + lmax];
            if (l1 == l2) dot -= 1.0;
            defect = std::max(defect, std::abs(dot));
        }
    }
    return defect;
}

}  // namespace oamcoinc
