// oamcoinc: model coincidence distributions of OAM-entangled photon pairs
// behind rotated azimuthal phase plates, estimate the radial parameter s
// from measured curves, and derive Schmidt-number and phase-matching
// quantities. All file output is CSV; angles are taken in degrees at the
// command line (suffix `rad` to override) and emitted in radians.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "oamcoinc/amplitude.hpp"
#include "oamcoinc/cli_util.hpp"
#include "oamcoinc/coincidence.hpp"
#include "oamcoinc/estimator.hpp"
#include "oamcoinc/phasematch.hpp"
#include "oamcoinc/plates.hpp"
#include "oamcoinc/radial.hpp"

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

using oamcoinc::parse_angle;
using oamcoinc::SeriesControl;

// Stream results either to stdout ("-") or atomically to a file.
void write_output(const std::string& path, const std::string& payload) {
    if (path == "-") {
        std::cout << payload;
        return;
    }
    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot open output: " + path);
        out << payload;
        if (!out) throw std::runtime_error("failed writing output: " + path);
    }
    std::filesystem::rename(tmp, target);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

struct PlateArgs {
    std::string kind = "spp";
    double eta = 0.5;
    std::string beta_text = "90";
    std::string plate_file;
    std::string signal_offset_text = "180";

    oamcoinc::PlateSpec build() const {
        if (kind == "ad")
            return oamcoinc::AngularDiaphragm{parse_angle(beta_text), eta};
        if (kind == "spp") return oamcoinc::SpiralPhasePlate{eta};
        if (kind == "custom") {
            std::ifstream in(plate_file);
            if (!in)
                throw std::invalid_argument("cannot open plate file: " + plate_file);
            return oamcoinc::load_plate_csv(in);
        }
        throw std::invalid_argument("unknown plate kind: " + kind);
    }
};

void add_plate_options(CLI::App* cmd, PlateArgs& args, bool require_eta) {
    cmd->add_option("--plate", args.kind, "plate type: ad | spp | custom")
        ->check(CLI::IsMember({"ad", "spp", "custom"}));
    auto* eta = cmd->add_option("--eta", args.eta, "plate step parameter eta");
    if (require_eta) eta->required();
    cmd->add_option("--beta", args.beta_text,
                    "diaphragm aperture angle (degrees unless suffixed rad)");
    cmd->add_option("--plate-file", args.plate_file,
                    "custom plate CSV: phi_start,phi_end,theta_start,theta_end");
    cmd->add_option("--signal-offset", args.signal_offset_text,
                    "signal-plate axis offset (default 180deg)");
}

int cmd_spectrum(double w0, double b, std::optional<int> lmax_opt,
                 std::optional<int> nmax_opt, const std::string& out) {
    const oamcoinc::SourceParams p(w0, b);
    const double x = oamcoinc::xi(p);
    const int lmax = lmax_opt.value_or(oamcoinc::default_mode_lmax(x));
    const int nmax = nmax_opt.value_or(std::max(lmax / 2, 16));
    std::ostringstream csv;
    oamcoinc::write_spectrum_csv(csv, p, lmax, nmax);
    write_output(out, csv.str());

    const double k_closed = oamcoinc::schmidt_number_closed(p);
    const double k_trunc = oamcoinc::schmidt_number_truncated(p, lmax, nmax);
    const double total = oamcoinc::schmidt_lambda_total(p, lmax, nmax);
    std::cerr << "xi           = " << fmt(x) << "\n"
              << "w_S [um]     = " << fmt(oamcoinc::schmidt_width(p)) << "\n"
              << "W_beam [um]  = " << fmt(oamcoinc::beam_width(p)) << "\n"
              << "K (closed)   = " << fmt(k_closed) << "\n"
              << "K (truncated)= " << fmt(k_trunc) << " (lmax=" << lmax
              << ", nmax=" << nmax << ")\n"
              << "sum lambda   = " << fmt(total) << "\n";
    if (std::abs(k_trunc - k_closed) > 1e-6 * k_closed) {
        std::cerr << "warning: truncated K disagrees with closed form beyond 1e-6\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_radial(std::optional<double> s_opt, std::optional<double> w0,
               std::optional<double> b, std::optional<double> wg, int lmax,
               const std::string& out) {
    double s;
    if (s_opt) {
        s = *s_opt;
    } else {
        if (!w0 || !b || !wg)
            throw std::invalid_argument("radial: give --s or all of --w0 --b --wg");
        s = oamcoinc::s_param(oamcoinc::SourceParams(*w0, *b),
                              oamcoinc::DetectionParams(*wg));
        std::cerr << "s = " << fmt(s) << "\n";
    }
    const oamcoinc::RadialTable table = oamcoinc::RadialTable::build(s, lmax);
    std::ostringstream csv;
    csv << "l,R\n";
    for (int l = 0; l <= table.lmax(); ++l)
        csv << l << "," << fmt(table(l)) << "\n";
    write_output(out, csv.str());
    return kExitOk;
}

int cmd_coincidence(const PlateArgs& plate_args, std::optional<double> s_opt,
                    std::optional<double> w0, std::optional<double> b,
                    std::optional<double> wg, bool limit_s1, int grid,
                    std::optional<int> lmax_opt, const std::string& out) {
    if (grid < 2) throw std::invalid_argument("coincidence: --grid must be >= 2");
    std::vector<double> alphas(grid);
    for (int j = 0; j < grid; ++j) alphas[j] = 2.0 * kPi * j / grid;

    oamcoinc::CoincidenceCurve curve;
    if (limit_s1) {
        auto model = [&](double a) {
            return plate_args.kind == "ad"
                       ? oamcoinc::ad_limit_s1(a, parse_angle(plate_args.beta_text),
                                               plate_args.eta)
                       : oamcoinc::spp_limit_s1(a, plate_args.eta);
        };
        if (plate_args.kind == "custom")
            throw std::invalid_argument(
                "coincidence: --limit-s1 supports ad and spp plates only");
        curve = oamcoinc::sweep_curve(model, alphas);
    } else {
        double s;
        if (s_opt) {
            s = *s_opt;
        } else {
            if (!w0 || !b || !wg)
                throw std::invalid_argument(
                    "coincidence: give --s or all of --w0 --b --wg");
            s = oamcoinc::s_param(oamcoinc::SourceParams(*w0, *b),
                                  oamcoinc::DetectionParams(*wg));
            std::cerr << "s = " << fmt(s) << "\n";
        }
        oamcoinc::EngineOptions opt;
        opt.lmax = lmax_opt.value_or(oamcoinc::default_engine_lmax(s));
        opt.signal_offset = parse_angle(plate_args.signal_offset_text);
        const oamcoinc::RadialTable table =
            oamcoinc::RadialTable::build(s, opt.lmax);
        const oamcoinc::PlateSpec spec = plate_args.build();
        if (plate_args.kind == "spp" &&
            std::abs(plate_args.eta - std::round(plate_args.eta)) < 1e-9)
            std::cerr << "warning: integer eta - constant coincidence profile\n";
        oamcoinc::TruncationInfo info;
        auto model = [&](double a) {
            oamcoinc::TruncationInfo ti;
            const double v =
                oamcoinc::coincidence_general(spec, spec, a, table, opt, &ti);
            if (ti.warning) info.warning = true;
            return v;
        };
        curve = oamcoinc::sweep_curve(model, alphas);
        curve.truncation_warning = info.warning;
        if (info.warning)
            std::cerr << "warning: ell-truncation may be insufficient\n";
        if (curve.normalized_by_max)
            std::cerr << "warning: P(0) = 0; normalized by maximum instead\n";
    }

    std::ostringstream csv;
    csv << "alpha_rad,p_raw,p_norm\n";
    for (std::size_t j = 0; j < curve.alphas.size(); ++j)
        csv << fmt(curve.alphas[j]) << "," << fmt(curve.raw[j]) << ","
            << fmt(curve.normalized[j]) << "\n";
    write_output(out, csv.str());
    return kExitOk;
}

int cmd_fit(const std::string& data_path, const PlateArgs& plate_args,
            std::optional<double> mu, bool fit_offset, bool fit_baseline,
            bool unweighted, const std::string& out) {
    std::ifstream in(data_path);
    if (!in) throw std::invalid_argument("cannot open data file: " + data_path);
    const oamcoinc::MeasurementSet data = oamcoinc::load_measurements_csv(in);

    oamcoinc::PlateModel model;
    if (plate_args.kind == "ad") {
        model.kind = oamcoinc::PlateModel::Kind::AngularDiaphragm;
        model.beta = parse_angle(plate_args.beta_text);
    } else if (plate_args.kind == "spp") {
        model.kind = oamcoinc::PlateModel::Kind::SpiralPhasePlate;
    } else {
        throw std::invalid_argument("fit: --plate must be ad or spp");
    }
    model.eta = plate_args.eta;

    oamcoinc::FitOptions options;
    options.fit_offset = fit_offset;
    options.fit_baseline = fit_baseline;
    options.weighted = !unweighted;
    const oamcoinc::FitResult res = oamcoinc::fit_s(data, model, options);

    nlohmann::json record;
    record["s"] = res.s_hat;
    record["s_sigma"] = res.s_sigma;
    record["scale"] = res.scale;
    record["baseline"] = res.baseline ? nlohmann::json(*res.baseline)
                                      : nlohmann::json(nullptr);
    record["offset_alpha_rad"] = res.offset_alpha
                                     ? nlohmann::json(*res.offset_alpha)
                                     : nlohmann::json(nullptr);
    record["rss"] = res.rss;
    record["degenerate"] = res.degenerate;
    record["at_boundary"] = res.at_boundary;

    std::cerr << "s_hat   = " << fmt(res.s_hat) << " +/- " << fmt(res.s_sigma)
              << "\nscale   = " << fmt(res.scale) << "\nrss     = "
              << fmt(res.rss) << "\n";
    if (res.degenerate) {
        std::cerr << "error: model is alpha-independent here; s is not "
                     "identifiable\n";
        write_output(out, record.dump(2) + "\n");
        return kExitNumerical;
    }
    if (res.at_boundary)
        std::cerr << "warning: s_hat at scan boundary; K not reported\n";
    if (mu && !res.at_boundary) {
        const oamcoinc::KInterval ki = oamcoinc::k_interval(res, *mu);
        record["mu"] = *mu;
        record["K"] = ki.k_hat;
        record["K_low"] = ki.k_low;
        record["K_high"] = ki.k_high;
        record["K_clipped"] = ki.clipped;
        std::cerr << "K(" << fmt(res.s_hat) << ", mu=" << *mu << ") = "
                  << fmt(ki.k_hat) << "  [" << fmt(ki.k_low) << ", "
                  << fmt(ki.k_high) << "]\n";
    }
    write_output(out, record.dump(2) + "\n");
    return kExitOk;
}

int cmd_phasematch(double L_mm, double lambda_um, const std::string& theta_text,
                   const std::string& no_file, const std::string& ne_file,
                   double n_const, std::optional<double> neff_opt, bool do_fit,
                   double qmax, int grid, double pinhole,
                   const std::string& out) {
    if (grid < 2) throw std::invalid_argument("phasematch: --grid must be >= 2");
    oamcoinc::IndexModel no = oamcoinc::IndexModel::constant(n_const);
    oamcoinc::IndexModel ne = oamcoinc::IndexModel::constant(n_const);
    if (!no_file.empty()) {
        std::ifstream in(no_file);
        if (!in) throw std::invalid_argument("cannot open index file: " + no_file);
        no = oamcoinc::IndexModel::from_csv(in);
    }
    if (!ne_file.empty()) {
        std::ifstream in(ne_file);
        if (!in) throw std::invalid_argument("cannot open index file: " + ne_file);
        ne = oamcoinc::IndexModel::from_csv(in);
    }
    const oamcoinc::CrystalConfig cfg(L_mm * 1000.0, lambda_um,
                                      parse_angle(theta_text), no, ne);
    std::vector<double> dq(grid);
    for (int j = 0; j < grid; ++j) dq[j] = qmax * j / (grid - 1.0);

    double n_eff;
    if (do_fit) {
        const oamcoinc::NeffFit fit = oamcoinc::fit_neff(cfg, dq, pinhole);
        n_eff = fit.n_eff;
        std::cerr << "fitted n_eff = " << fmt(n_eff)
                  << " (rel L2 error " << fmt(fit.rel_l2_error) << ")\n";
        if (fit.at_boundary)
            std::cerr << "warning: n_eff at fit-range boundary\n";
    } else {
        n_eff = neff_opt.value_or(1.0);
    }

    const oamcoinc::ProfileComparison cmp =
        oamcoinc::compare_profiles(cfg, n_eff, dq, pinhole);
    std::ostringstream csv;
    csv << "dq,sinc,gauss\n";
    for (std::size_t j = 0; j < cmp.dq.size(); ++j)
        csv << fmt(cmp.dq[j]) << "," << fmt(cmp.sinc_profile[j]) << ","
            << fmt(cmp.gauss_profile[j]) << "\n";
    write_output(out, csv.str());

    const double b = oamcoinc::effective_b(cfg.L_um, cfg.lambda_p_um, n_eff);
    std::cerr << "n_eff        = " << fmt(n_eff) << "\n"
              << "rel L2 error = " << fmt(cmp.rel_l2_error) << "\n"
              << "b [um]       = " << fmt(b) << "\n";
    return kExitOk;
}

int cmd_selfcheck(const std::vector<std::string>& only, double tol_scale);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-photon OAM coincidence modelling and Schmidt-number "
                 "estimation"};
    app.require_subcommand(1);

    // spectrum
    auto* spectrum = app.add_subcommand(
        "spectrum", "Schmidt eigenvalue spectrum and Schmidt number");
    double sp_w0 = 0, sp_b = 0;
    std::optional<int> sp_lmax, sp_nmax;
    std::string sp_out = "-";
    spectrum->add_option("--w0", sp_w0, "pump waist, um")->required();
    spectrum->add_option("--b", sp_b, "phase-matching width, um")->required();
    spectrum->add_option("--lmax", sp_lmax, "OAM truncation");
    spectrum->add_option("--nmax", sp_nmax, "radial truncation");
    spectrum->add_option("--out,-o", sp_out, "output CSV path or -");

    // radial
    auto* radial = app.add_subcommand("radial", "radial overlap table R_l(s)");
    std::optional<double> ra_s, ra_w0, ra_b, ra_wg;
    int ra_lmax = 16;
    std::string ra_out = "-";
    radial->add_option("--s", ra_s, "radial parameter s in [0, 1]");
    radial->add_option("--w0", ra_w0, "pump waist, um");
    radial->add_option("--b", ra_b, "phase-matching width, um");
    radial->add_option("--wg", ra_wg, "fiber mode width at plate plane, um");
    radial->add_option("--lmax", ra_lmax, "table size");
    radial->add_option("--out,-o", ra_out, "output CSV path or -");

    // coincidence
    auto* coinc = app.add_subcommand(
        "coincidence", "coincidence curve versus relative plate rotation");
    PlateArgs co_plate;
    std::optional<double> co_s, co_w0, co_b, co_wg;
    std::optional<int> co_lmax;
    bool co_limit = false;
    int co_grid = 128;
    std::string co_out = "-";
    add_plate_options(coinc, co_plate, true);
    coinc->add_option("--s", co_s, "radial parameter s in [0, 1]");
    coinc->add_option("--w0", co_w0, "pump waist, um");
    coinc->add_option("--b", co_b, "phase-matching width, um");
    coinc->add_option("--wg", co_wg, "fiber mode width at plate plane, um");
    coinc->add_flag("--limit-s1", co_limit, "emit the s -> 1 limit curve");
    coinc->add_option("--grid", co_grid, "number of orientation samples");
    coinc->add_option("--lmax", co_lmax, "OAM truncation override");
    coinc->add_option("--out,-o", co_out, "output CSV path or -");

    // fit
    auto* fit = app.add_subcommand("fit", "fit s to measured coincidences");
    PlateArgs fi_plate;
    std::string fi_data;
    std::optional<double> fi_mu;
    bool fi_offset = false, fi_baseline = false, fi_unweighted = false;
    std::string fi_out = "-";
    fit->add_option("--data", fi_data, "CSV alpha_deg,counts[,sigma]")
        ->required();
    add_plate_options(fit, fi_plate, true);
    fit->add_option("--mu", fi_mu, "width ratio w0/wG (enables K report)");
    fit->add_flag("--offset", fi_offset, "fit a free angular offset");
    fit->add_flag("--baseline", fi_baseline, "fit a free additive baseline");
    fit->add_flag("--unweighted", fi_unweighted, "plain least squares");
    fit->add_option("--out,-o", fi_out, "fit record (JSON) path or -");

    // phasematch
    auto* pm = app.add_subcommand(
        "phasematch", "sinc vs Gaussian phase-matching comparison");
    double pm_L = 1.0, pm_lambda = 0.8, pm_nconst = 1.5, pm_qmax = 0.35,
           pm_pinhole = 0.18;
    std::string pm_theta = "0", pm_no, pm_ne, pm_out = "-";
    std::optional<double> pm_neff;
    bool pm_fit = false;
    int pm_grid = 512;
    pm->add_option("--L", pm_L, "crystal thickness, mm")->required();
    pm->add_option("--lambda", pm_lambda, "pump wavelength, um")->required();
    pm->add_option("--theta", pm_theta, "optical-axis angle (deg or rad)");
    pm->add_option("--no", pm_no, "ordinary index CSV lambda_um,n");
    pm->add_option("--ne", pm_ne, "extraordinary index CSV lambda_um,n");
    pm->add_option("--n-const", pm_nconst, "constant index when no tables");
    pm->add_option("--neff", pm_neff, "effective index for the Gaussian");
    pm->add_flag("--fit-neff", pm_fit, "fit n_eff to the sinc profile");
    pm->add_option("--qmax", pm_qmax, "grid extent in |qi-qs|, rad/um");
    pm->add_option("--grid", pm_grid, "number of grid points");
    pm->add_option("--pinhole", pm_pinhole, "pinhole radius in |qi-qs|, rad/um");
    pm->add_option("--out,-o", pm_out, "output CSV path or -");

    // selfcheck
    auto* self = app.add_subcommand("selfcheck", "run built-in oracle suites");
    std::vector<std::string> sc_only;
    double sc_tol_scale = 1.0;
    self->add_option("--only", sc_only, "run only the named suites");
    self->add_option("--tol-scale", sc_tol_scale,
                     "multiply all tolerances (diagnostics)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (spectrum->parsed())
            return cmd_spectrum(sp_w0, sp_b, sp_lmax, sp_nmax, sp_out);
        if (radial->parsed())
            return cmd_radial(ra_s, ra_w0, ra_b, ra_wg, ra_lmax, ra_out);
        if (coinc->parsed())
            return cmd_coincidence(co_plate, co_s, co_w0, co_b, co_wg, co_limit,
                                   co_grid, co_lmax, co_out);
        if (fit->parsed())
            return cmd_fit(fi_data, fi_plate, fi_mu, fi_offset, fi_baseline,
                           fi_unweighted, fi_out);
        if (pm->parsed())
            return cmd_phasematch(pm_L, pm_lambda, pm_theta, pm_no, pm_ne,
                                  pm_nconst, pm_neff, pm_fit, pm_qmax, pm_grid,
                                  pm_pinhole, pm_out);
        if (self->parsed()) return cmd_selfcheck(sc_only, sc_tol_scale);
    } catch (const oamcoinc::ConvergenceError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

namespace {

int cmd_selfcheck(const std::vector<std::string>& only, double tol_scale) {
    using namespace oamcoinc;
    auto enabled = [&](const std::string& name) {
        if (only.empty()) return true;
        for (const auto& o : only)
            if (o == name) return true;
        return false;
    };
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        all_ok = all_ok && ok;
    };

    if (enabled("radial-oracle")) {
        // quadrature oracle vs closed-form overlaps
        bool ok = true;
        const double tol = 1e-6 * tol_scale;
        for (double b_ratio : {0.1, 0.5}) {
            const SourceParams p(2.0, 2.0 * b_ratio);
            for (double g_ratio : {0.5, 1.0, 2.0}) {
                const DetectionParams d(g_ratio * schmidt_width(p));
                for (int l = 0; l <= 6; l += 2) {
                    const double closed = r_ell_full(p, d, l);
                    const double oracle = r_ell_oracle(p, d, l);
                    if (std::abs(oracle - closed) >
                        tol * std::max(std::abs(closed), 1e-12))
                        ok = false;
                }
            }
        }
        report("radial-oracle", ok);
    }

    if (enabled("engine-closed-forms")) {
        bool ok = true;
        const double tol = 1e-6 * tol_scale;
        const int lmax = 96;
        const RadialTable table = RadialTable::build(0.7, lmax);
        const EngineOptions opt{lmax, kPi, 1e-12};
        const PlateSpec spp = SpiralPhasePlate{3.5};
        const PlateSpec ad = AngularDiaphragm{kPi / 2.0, 0.5};
        const double e_spp0 = coincidence_general(spp, spp, 0.0, table, opt);
        const double c_spp0 = spp_closed(0.0, 3.5, table);
        const double e_ad0 = coincidence_general(ad, ad, 0.0, table, opt);
        const double c_ad0 = ad_closed(0.0, kPi / 2.0, 0.5, table);
        for (int j = 0; j < 32; ++j) {
            const double a = 2.0 * kPi * j / 32;
            if (std::abs(coincidence_general(spp, spp, a, table, opt) / e_spp0 -
                         spp_closed(a, 3.5, table) / c_spp0) > tol)
                ok = false;
            if (std::abs(coincidence_general(ad, ad, a, table, opt) / e_ad0 -
                         ad_closed(a, kPi / 2.0, 0.5, table) / c_ad0) > tol)
                ok = false;
        }
        report("engine-closed-forms", ok);
    }

    if (enabled("reconstruction")) {
        bool ok = true;
        const SourceParams p(2.0, 2.0 / 3.0);  // xi = 0.5
        const double tol = 1e-8 * tol_scale;
        const std::complex<double> rec =
            reconstruct_amplitude(p, {0, 0}, {0, 0}, 40, 40);
        if (std::abs(rec - two_photon_amplitude(p, {0, 0}, {0, 0})) > tol)
            ok = false;
        double prev = 1e300;
        for (int trunc : {5, 10, 20, 40}) {
            const std::complex<double> r =
                reconstruct_amplitude(p, {0.4, 0.1}, {-0.3, 0.2}, trunc, trunc);
            const double err =
                std::abs(r - two_photon_amplitude(p, {0.4, 0.1}, {-0.3, 0.2}));
            if (err > prev + 1e-12) ok = false;
            prev = err;
        }
        report("reconstruction", ok);
    }

    return all_ok ? kExitOk : kExitNumerical;
}

}  // namespace
