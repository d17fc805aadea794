#include "oamcoinc/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace oamcoinc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGolden = 0.61803398874989485;

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}
}  // namespace

IndexModel IndexModel::constant(double n) {
    if (!(n > 1.0))
        throw std::invalid_argument("IndexModel: index values must exceed 1");
    return IndexModel{{{0.0, n}}};
}

IndexModel IndexModel::from_csv(std::istream& in) {
    IndexModel model;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.find("lambda_um") != std::string::npos) continue;
        }
        std::istringstream row(line);
        double lam, n;
        char c;
        if (!(row >> lam >> c >> n) || c != ',')
            throw std::invalid_argument("index csv: bad row: " + line);
        if (!(n > 1.0))
            throw std::invalid_argument("index csv: index values must exceed 1");
        model.table.emplace_back(lam, n);
    }
    if (model.table.empty())
        throw std::invalid_argument("index csv: empty table");
    std::sort(model.table.begin(), model.table.end());
    for (std::size_t i = 1; i < model.table.size(); ++i)
        if (model.table[i].first <= model.table[i - 1].first)
            throw std::invalid_argument("index csv: wavelengths must be distinct");
    return model;
}

double IndexModel::operator()(double lambda_um) const {
    if (table.empty()) throw std::logic_error("IndexModel: empty table");
    if (table.size() == 1) return table.front().second;
    if (lambda_um < table.front().first || lambda_um > table.back().first)
        throw std::domain_error("IndexModel: wavelength outside tabulated range");
    auto hi = std::lower_bound(
        table.begin(), table.end(), lambda_um,
        [](const std::pair<double, double>& e, double v) { return e.first < v; });
    if (hi == table.begin()) return hi->second;
    auto lo = hi - 1;
    const double t = (lambda_um - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

CrystalConfig::CrystalConfig(double L, double lambda_p, double theta,
                             IndexModel no, IndexModel ne)
    : L_um(L), lambda_p_um(lambda_p), theta_oa(theta), n_o(std::move(no)),
      n_e(std::move(ne)) {
    if (!(L > 0.0)) throw std::invalid_argument("CrystalConfig: L must be > 0");
    if (!(lambda_p > 0.0))
        throw std::invalid_argument("CrystalConfig: lambda_p must be > 0");
}

double CrystalConfig::k_p() const { return kTwoPi / lambda_p_um; }

AngularIndices angular_indices(const CrystalConfig& cfg, double lambda_um) {
    const double no = cfg.n_o(lambda_um);
    const double ne = cfg.n_e(lambda_um);
    const double s2 = std::sin(cfg.theta_oa) * std::sin(cfg.theta_oa);
    const double c2 = 1.0 - s2;
    AngularIndices out;
    out.n_e_theta = 1.0 / std::sqrt(s2 / (ne * ne) + c2 / (no * no));
    out.n_e_prime_theta = 1.0 / std::sqrt(c2 / (ne * ne) + s2 / (no * no));
    out.inv_n_tilde_sq = 1.0 / (no * no) - 1.0 / (ne * ne);
    return out;
}

double delta_full(const CrystalConfig& cfg, TransverseVec qi, TransverseVec qs,
                  bool* collinear_warning) {
    const double kp = cfg.k_p();
    const double ks = 0.5 * kp;  // frequency degenerate
    const double ki = 0.5 * kp;
    const double lam_p = cfg.lambda_p_um;
    const double lam_d = 2.0 * cfg.lambda_p_um;  // idler/signal wavelength

    if (collinear_warning) {
        const double qmax = 0.1 * kp;
        *collinear_warning =
            std::sqrt(norm2(qi)) >= qmax || std::sqrt(norm2(qs)) >= qmax;
    }

    const AngularIndices ap = angular_indices(cfg, lam_p);
    const AngularIndices as = angular_indices(cfg, lam_d);
    const double no_p = cfg.n_o(lam_p);
    const double ne_p = cfg.n_e(lam_p);
    const double no_d = cfg.n_o(lam_d);
    const double ne_d = cfg.n_e(lam_d);
    const double sin2t = std::sin(2.0 * cfg.theta_oa);

    const double walk_p = ap.n_e_theta * ap.n_e_theta * ap.inv_n_tilde_sq;
    const double walk_s = as.n_e_theta * as.n_e_theta * as.inv_n_tilde_sq;

    double delta = kp * ap.n_e_theta - ks * as.n_e_theta - ki * no_d;
    delta += qs.qx * 0.5 * sin2t * (walk_p + walk_s);
    delta += qi.qx * 0.5 * sin2t * walk_p;
    const double sum_y = qi.qy + qs.qy;
    const double sum_x = qi.qx + qs.qx;
    delta -= (as.n_e_theta / (2.0 * ne_p * ne_p * kp)) *
             (sum_y * sum_y +
              sum_x * sum_x * ap.n_e_theta * ap.n_e_theta / (no_p * no_p));
    delta += (as.n_e_theta * as.n_e_theta * as.n_e_theta /
              (2.0 * ne_d * ne_d * no_d * no_d * ks)) *
             qs.qx * qs.qx;
    delta += (as.n_e_theta / (2.0 * ne_d * ne_d * ks)) * qs.qy * qs.qy;
    delta += (qi.qx * qi.qx + qi.qy * qi.qy) / (2.0 * no_d * ki);
    return delta;
}

double delta_iso(double n_eff, double k_p, TransverseVec qi, TransverseVec qs) {
    if (!(n_eff > 0.0))
        throw std::domain_error("delta_iso: n_eff must be > 0");
    return norm2(qi - qs) / (2.0 * k_p * n_eff);
}

ProfileComparison compare_profiles(const CrystalConfig& cfg, double n_eff,
                                   std::span<const double> dq_grid,
                                   double pinhole) {
    if (dq_grid.empty())
        throw std::invalid_argument("compare_profiles: empty grid");
    ProfileComparison out;
    out.dq.assign(dq_grid.begin(), dq_grid.end());
    out.sinc_profile.resize(dq_grid.size());
    out.gauss_profile.resize(dq_grid.size());
    const double kp = cfg.k_p();
    double num = 0.0, den = 0.0;
    std::size_t inside = 0;
    for (std::size_t j = 0; j < dq_grid.size(); ++j) {
        const TransverseVec qi{0.5 * dq_grid[j], 0.0};
        const TransverseVec qs{-0.5 * dq_grid[j], 0.0};
        const double sf = sinc(delta_full(cfg, qi, qs) * cfg.L_um / 2.0);
        const double gf = std::exp(-delta_iso(n_eff, kp, qi, qs) * cfg.L_um / 2.0);
        out.sinc_profile[j] = sf;
        out.gauss_profile[j] = gf;
        if (std::abs(dq_grid[j]) <= pinhole) {
            const double d = sf - gf;
            num += d * d;
            den += sf * sf;
            ++inside;
        }
    }
    if (inside < 2 || den <= 0.0)
        throw std::invalid_argument(
            "compare_profiles: pinhole passes no usable comparison region");
    out.rel_l2_error = std::sqrt(num / den);
    return out;
}

NeffFit fit_neff(const CrystalConfig& cfg, std::span<const double> dq_grid,
                 double pinhole) {
    if (dq_grid.size() < 2)
        throw std::invalid_argument("fit_neff: need at least two grid points");
    auto err = [&](double n_eff) {
        return compare_profiles(cfg, n_eff, dq_grid, pinhole).rel_l2_error;
    };
    double lo = 0.1, hi = 10.0;
    // Coarse log-spaced scan picks the bracket before golden refinement.
    const int coarse = 60;
    double best = lo, fbest = err(lo);
    for (int i = 1; i <= coarse; ++i) {
        const double x = lo * std::pow(hi / lo, i / static_cast<double>(coarse));
        const double f = err(x);
        if (f < fbest) {
            fbest = f;
            best = x;
        }
    }
    double a = std::max(lo, best / std::pow(hi / lo, 1.0 / coarse));
    double b = std::min(hi, best * std::pow(hi / lo, 1.0 / coarse));
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = err(x1), f2 = err(x2);
    while (b - a > 1e-7 * std::max(1.0, b)) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = err(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = err(x2);
        }
    }
    NeffFit fit;
    fit.n_eff = 0.5 * (a + b);
    fit.rel_l2_error = err(fit.n_eff);
    fit.at_boundary = fit.n_eff < 0.1 * 1.02 || fit.n_eff > 10.0 / 1.02;
    return fit;
}

double effective_b(double L_um, double lambda_p_um, double n_eff) {
    if (!(L_um > 0.0) || !(lambda_p_um > 0.0) || !(n_eff > 0.0))
        throw std::domain_error("effective_b: all arguments must be positive");
    const double kp = kTwoPi / lambda_p_um;
    return std::sqrt(L_um / (kp * n_eff));
}

}  // namespace oamcoinc
