#include "oamcoinc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace oamcoinc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGolden = 0.61803398874989485;

}  // namespace

void MeasurementSet::validate() const {
    if (points.size() < 5)
        throw std::invalid_argument("MeasurementSet: need at least 5 points");
    for (const auto& p : points) {
        if (p.alpha < 0.0 || p.alpha >= kTwoPi)
            throw std::invalid_argument("MeasurementSet: alpha outside [0, 2pi)");
        if (p.counts < 0.0)
            throw std::invalid_argument("MeasurementSet: negative counts");
        if (p.sigma && !(*p.sigma > 0.0))
            throw std::invalid_argument("MeasurementSet: nonpositive sigma");
    }
}

MeasurementSet load_measurements_csv(std::istream& in) {
    MeasurementSet set;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.find("alpha_deg") != std::string::npos) continue;
        }
        std::istringstream row(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(row, field, ',')) vals.push_back(std::stod(field));
        if (vals.size() != 2 && vals.size() != 3)
            throw std::invalid_argument("measurement csv: bad row: " + line);
        MeasurementPoint p;
        p.alpha = (vals[0] / 180.0) * kPi;
        p.counts = vals[1];
        if (vals.size() == 3) p.sigma = vals[2];
        set.points.push_back(p);
    }
    set.validate();
    return set;
}

std::vector<double> PlateModel::normalized(
    double s, const std::vector<double>& alphas) const {
    const int lmax = default_engine_lmax(s);
    const RadialTable table = RadialTable::build(s, lmax);
    auto raw = [&](double a) {
        return kind == Kind::SpiralPhasePlate ? spp_closed(a, eta, table)
                                              : ad_closed(a, beta, eta, table);
    };
    const double raw0 = raw(0.0);
    std::vector<double> out(alphas.size());
    for (std::size_t j = 0; j < alphas.size(); ++j)
        out[j] = raw0 > 0.0 ? raw(alphas[j]) / raw0 : raw(alphas[j]);
    return out;
}

double PlateModel::operator()(double s, double alpha) const {
    return normalized(s, {alpha})[0];
}

namespace {

struct LinearFit {
    double scale = 0.0;
    double baseline = 0.0;
    double rss = 0.0;
};

// Weighted least squares of counts ~ scale * m + baseline with the linear
// parameters solved in closed form.
LinearFit solve_linear(const std::vector<double>& m,
                       const std::vector<double>& y,
                       const std::vector<double>& w, bool with_baseline) {
    LinearFit out;
    if (with_baseline) {
        double sw = 0, swm = 0, swy = 0, swmm = 0, swmy = 0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            sw += w[j];
            swm += w[j] * m[j];
            swy += w[j] * y[j];
            swmm += w[j] * m[j] * m[j];
            swmy += w[j] * m[j] * y[j];
        }
        const double det = sw * swmm - swm * swm;
        if (std::abs(det) < 1e-14 * std::max(sw * swmm, 1.0)) {
            // model column is (numerically) constant: scale unidentifiable
            out.scale = 0.0;
            out.baseline = swy / sw;
        } else {
            out.scale = (sw * swmy - swm * swy) / det;
            out.baseline = (swmm * swy - swm * swmy) / det;
        }
    } else {
        double swmm = 0, swmy = 0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            swmm += w[j] * m[j] * m[j];
            swmy += w[j] * m[j] * y[j];
        }
        out.scale = swmm > 0.0 ? swmy / swmm : 0.0;
    }
    for (std::size_t j = 0; j < m.size(); ++j) {
        const double r = y[j] - out.scale * m[j] - out.baseline;
        out.rss += w[j] * r * r;
    }
    return out;
}

}  // namespace

FitResult fit_s(const MeasurementSet& data, const PlateModel& model,
                const FitOptions& options) {
    data.validate();
    const std::size_t n = data.points.size();
    std::vector<double> y(n), w(n);
    for (std::size_t j = 0; j < n; ++j) {
        y[j] = data.points[j].counts;
        double sig = 1.0;
        if (options.weighted) {
            sig = data.points[j].sigma
                      ? *data.points[j].sigma
                      : std::sqrt(std::max(data.points[j].counts, 1.0));
        }
        w[j] = 1.0 / (sig * sig);
    }

    // Offset handling: profile over a small offset bracket inside the
    // s-objective when requested.
    auto objective_at = [&](double s, double* scale_out, double* base_out,
                            double* offset_out) {
        auto eval = [&](double off) {
            std::vector<double> alphas(n);
            for (std::size_t j = 0; j < n; ++j)
                alphas[j] = data.points[j].alpha + off;
            const std::vector<double> m = model.normalized(s, alphas);
            return solve_linear(m, y, w, options.fit_baseline);
        };
        double best_off = 0.0;
        LinearFit best = eval(0.0);
        if (options.fit_offset) {
            double a = -kPi / 8.0, b = kPi / 8.0;
            // coarse bracket then golden refinement
            for (int i = 0; i <= 16; ++i) {
                const double off = a + (b - a) * i / 16.0;
                LinearFit f = eval(off);
                if (f.rss < best.rss) {
                    best = f;
                    best_off = off;
                }
            }
            double lo = best_off - (b - a) / 16.0, hi = best_off + (b - a) / 16.0;
            double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
            LinearFit f1 = eval(x1), f2 = eval(x2);
            while (hi - lo > 1e-5) {
                if (f1.rss < f2.rss) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - kGolden * (hi - lo);
                    f1 = eval(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + kGolden * (hi - lo);
                    f2 = eval(x2);
                }
            }
            best_off = 0.5 * (lo + hi);
            best = eval(best_off);
        }
        if (scale_out) *scale_out = best.scale;
        if (base_out) *base_out = best.baseline;
        if (offset_out) *offset_out = best_off;
        return best.rss;
    };

    auto objective = [&](double s) {
        return objective_at(s, nullptr, nullptr, nullptr);
    };

    // Coarse scan of the profile objective.
    const int np = std::max(options.scan_points, 8);
    std::vector<double> svals(np), fvals(np);
    for (int i = 0; i < np; ++i) {
        svals[i] = options.s_lo +
                   (options.s_hi - options.s_lo) * i / (np - 1.0);
        fvals[i] = objective(svals[i]);
    }
    const auto [mn_it, mx_it] = std::minmax_element(fvals.begin(), fvals.end());
    const int imin = static_cast<int>(mn_it - fvals.begin());

    FitResult res;
    // Flat profile: the model cannot identify s (alpha-independent curve).
    if (*mx_it - *mn_it <= 1e-10 * (1.0 + std::abs(*mn_it))) {
        res.degenerate = true;
        res.s_hat = svals[imin];
        objective_at(res.s_hat, &res.scale, nullptr, nullptr);
        res.rss = fvals[imin];
        return res;
    }

    double lo = svals[std::max(imin - 1, 0)];
    double hi = svals[std::min(imin + 1, np - 1)];
    double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    while (hi - lo > options.s_tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = objective(x2);
        }
    }
    res.s_hat = 0.5 * (lo + hi);
    double base = 0.0, off = 0.0;
    res.rss = objective_at(res.s_hat, &res.scale, &base, &off);
    if (options.fit_baseline) res.baseline = base;
    if (options.fit_offset) res.offset_alpha = off;
    res.at_boundary = (res.s_hat - options.s_lo < 4.0 * options.s_tol) ||
                      (options.s_hi - res.s_hat < 4.0 * options.s_tol);

    // Curvature of the profile objective -> 1-sigma via delta chi^2 = 1.
    double h = 1e-3;
    double curv = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        const double sl = std::max(res.s_hat - h, options.s_lo);
        const double sr = std::min(res.s_hat + h, options.s_hi);
        const double fl = objective(sl), fr = objective(sr);
        const double hc = 0.5 * (sr - sl);
        curv = (fl + fr - 2.0 * res.rss) / (hc * hc);
        if (curv > 0.0) break;
        h *= 4.0;
    }
    if (curv > 0.0) {
        double var = 2.0 / curv;
        if (!options.weighted) {
            const int dof = static_cast<int>(n) -
                            (options.fit_baseline ? 2 : 1) -
                            (options.fit_offset ? 1 : 0) - 1;
            if (dof > 0) var *= res.rss / dof;
        }
        res.s_sigma = std::sqrt(var);
    } else {
        res.s_sigma = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

double schmidt_number_experimental(double s, double mu) {
    if (s < 0.0 || s >= 1.0)
        throw std::domain_error("schmidt_number_experimental: s must be in [0, 1)");
    if (!(mu > 0.0))
        throw std::domain_error("schmidt_number_experimental: mu must be > 0");
    const double num = 1.0 + 2.0 * s * mu * mu;
    return num * num / ((1.0 - s) * (1.0 + s + 4.0 * s * mu * mu));
}

KInterval k_interval(const FitResult& fit, double mu) {
    KInterval out;
    double lo = fit.s_hat - fit.s_sigma;
    double hi = fit.s_hat + fit.s_sigma;
    if (lo < 0.0) {
        lo = 0.0;
        out.clipped = true;
    }
    if (hi >= 1.0) {
        hi = std::nextafter(1.0, 0.0) - 1e-12;
        out.clipped = true;
    }
    out.k_low = schmidt_number_experimental(lo, mu);
    out.k_hat = schmidt_number_experimental(fit.s_hat, mu);
    out.k_high = schmidt_number_experimental(hi, mu);
    return out;
}

MeasurementSet synthesize(const PlateModel& model, double s, double scale,
                          double noise_frac, int n_angles, std::uint64_t seed) {
    if (n_angles < 5)
        throw std::invalid_argument("synthesize: need at least 5 angles");
    std::mt19937_64 rng(seed);
    auto uniform01 = [&rng]() {
        return (rng() >> 11) * 0x1.0p-53;  // 53-bit mantissa in [0, 1)
    };
    auto gaussian = [&]() {
        // Box-Muller; avoids the implementation-defined std::normal_distribution
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    };
    MeasurementSet set;
    std::vector<double> alphas(n_angles);
    for (int j = 0; j < n_angles; ++j) alphas[j] = kTwoPi * j / n_angles;
    const std::vector<double> clean = model.normalized(s, alphas);
    for (int j = 0; j < n_angles; ++j) {
        MeasurementPoint p;
        p.alpha = alphas[j];
        const double level = scale * clean[j];
        // sigma floor keeps the weights finite where the curve grazes zero
        const double sigma = noise_frac * std::max(level, 1e-3 * scale);
        p.counts = std::max(level + sigma * gaussian(), 0.0);
        if (sigma > 0.0) p.sigma = sigma;
        set.points.push_back(p);
    }
    return set;
}

}  // namespace oamcoinc
