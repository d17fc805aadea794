#include "oamcoinc/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace oamcoinc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kIntegerEtaTol = 1e-9;

bool integer_eta(double eta) {
    return std::abs(eta - std::round(eta)) < kIntegerEtaTol;
}

double wrap_2pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

}  // namespace

double coincidence_general(const PlateSpec& plate_i, const PlateSpec& plate_s,
                           double alpha, const RadialTable& table,
                           const EngineOptions& opt, TruncationInfo* info) {
    if (opt.lmax < 1)
        throw std::invalid_argument("coincidence_general: lmax must be >= 1");
    if (table.lmax() < opt.lmax)
        throw std::invalid_argument(
            "coincidence_general: radial table does not cover lmax");
    const int L = opt.lmax;
    const auto hi = impulse_row(plate_i, +1, Orientation{alpha}, 0, L);
    const auto hs = impulse_row(plate_s, -1, Orientation{opt.signal_offset}, 0, L);
    std::complex<double> sum = 0.0;
    std::complex<double> edge = 0.0;
    for (int l = -L; l <= L; ++l) {
        const double parity = (l % 2 == 0) ? 1.0 : -1.0;
        // hs index for -l
        const std::complex<double> term =
            parity * table(l) * hi[l + L] * hs[-l + L];
        sum += term;
        if (std::abs(l) == L) edge += term;
    }
    if (info) {
        const double ratio =
            std::abs(edge) / std::max(std::abs(sum), 1e-300);
        info->last_term_ratio = ratio;
        info->warning = ratio > opt.rel_tol;
    }
    return std::norm(sum);
}

double ad_closed(double alpha, double beta, double eta,
                 const RadialTable& table) {
    if (!(beta > 0.0) || !(beta < kTwoPi))
        throw std::invalid_argument("ad_closed: beta must lie in (0, 2pi)");
    if (integer_eta(eta)) {
        // cot^2(pi eta) diverges but the physical profile is constant: an
        // integer step is no step at all.
        return 1.0;
    }
    const double ct = 1.0 / std::tan(kPi * eta);
    double bracket = table(0) * ((beta - kPi) * (beta - kPi) + kPi * kPi * ct * ct);
    // cos(l alpha) by recurrence
    const double c1 = std::cos(alpha);
    double cm1 = 1.0, cc = c1;
    for (int l = 1; l <= table.lmax(); ++l) {
        const double sb = std::sin(0.5 * l * beta);
        bracket += 8.0 * table(l) * cc * sb * sb / (static_cast<double>(l) * l);
        const double cn = 2.0 * c1 * cc - cm1;
        cm1 = cc;
        cc = cn;
    }
    return bracket * bracket;
}

double ad_closed(double alpha, double beta, double eta, double s, int lmax,
                 const SeriesControl& ctl) {
    return ad_closed(alpha, beta, eta, RadialTable::build(s, lmax, ctl));
}

double ad_limit_s1(double alpha, double beta, double eta) {
    if (!(beta > 0.0) || !(beta < kTwoPi))
        throw std::invalid_argument("ad_limit_s1: beta must lie in (0, 2pi)");
    if (integer_eta(eta)) return 1.0;
    const double a = wrap_2pi(alpha);
    const double ct = 1.0 / std::tan(kPi * eta);
    const double bracket = kPi * (ct * ct - 1.0) + std::abs(kTwoPi - a - beta) +
                           std::abs(a - beta);
    return kPi * kPi * bracket * bracket;
}

double spp_closed(double alpha, double eta, const RadialTable& table) {
    if (integer_eta(eta)) {
        // Pure vortex plate: only the l = -eta channel survives, so the
        // coincidence profile carries no alpha dependence.
        const int l = static_cast<int>(std::llround(std::abs(eta)));
        const double r = l <= table.lmax() ? table(l) : 0.0;
        return r * r;
    }
    std::complex<double> sum = 0.0;
    const std::complex<double> rot = std::exp(std::complex<double>(0.0, alpha));
    std::complex<double> epos = 1.0, eneg = 1.0;
    for (int l = 0; l <= table.lmax(); ++l) {
        if (l == 0) {
            sum += table(0) / (eta * eta);
        } else {
            const double dp = l + eta, dn = -l + eta;
            sum += table(l) * (epos / (dp * dp) + eneg / (dn * dn));
        }
        epos *= rot;
        eneg *= std::conj(rot);
    }
    return std::norm(sum);
}

double spp_closed(double alpha, double eta, double s, int lmax,
                  const SeriesControl& ctl) {
    return spp_closed(alpha, eta, RadialTable::build(s, lmax, ctl));
}

double spp_limit_s1(double alpha, double eta) {
    if (integer_eta(eta))
        throw std::domain_error("spp_limit_s1: eta must be noninteger");
    const double a = wrap_2pi(alpha);
    const double st = std::sin(kPi * eta);
    const double ct = std::cos(kPi * eta) / st;
    return kPi * kPi * (kPi * kPi * ct * ct + (a - kPi) * (a - kPi)) / (st * st);
}

int default_engine_lmax(double s) {
    // R_l <= s^l: pick the tail below ~1e-12. Near s = 1 that blows up, so
    // cap at 1024 and let the engine's truncation warning flag the residue.
    if (s >= 0.997) return 1024;
    const double base = std::log(1e-12) / std::log(std::max(s, 0.1));
    return std::clamp(static_cast<int>(std::ceil(base)), 64, 1024);
}

CoincidenceCurve sweep_curve(const std::function<double(double)>& model,
                             std::span<const double> alphas) {
    if (alphas.empty())
        throw std::invalid_argument("sweep_curve: empty orientation grid");
    CoincidenceCurve out;
    out.alphas.assign(alphas.begin(), alphas.end());
    out.raw.resize(alphas.size());
    double at_zero = -1.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        out.raw[i] = model(alphas[i]);
        if (out.raw[i] < 0.0)
            throw std::runtime_error("sweep_curve: negative coincidence value");
        if (alphas[i] == 0.0) at_zero = out.raw[i];
    }
    if (at_zero < 0.0)
        throw std::invalid_argument("sweep_curve: grid must contain alpha = 0");
    double norm = at_zero;
    if (norm <= 0.0) {
        norm = *std::max_element(out.raw.begin(), out.raw.end());
        out.normalized_by_max = true;
        if (norm <= 0.0) norm = 1.0;  // identically zero curve
    }
    out.normalized.resize(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i)
        out.normalized[i] = out.raw[i] / norm;
    return out;
}

double visibility(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("visibility: empty curve");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn, hi = *mx;
    if (hi + lo == 0.0) return 0.0;
    return (hi - lo) / (hi + lo);
}

}  // namespace oamcoinc
