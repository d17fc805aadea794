#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "oamcoinc/amplitude.hpp"
#include "oamcoinc/quadrature.hpp"
#include "oamcoinc/specfun.hpp"

using namespace oamcoinc;

namespace {

constexpr double kPi = std::numbers::pi;

// 1D radial overlap of two momentum-space modes, int v1 v2 q dq.
double mode_overlap(ModeIndex m1, double w1, ModeIndex m2, double w2) {
    const double qmax = 12.0 / std::min(w1, w2);
    return integrate(
        [&](double q) {
            return lg_radial_mom(m1, w1, q) * lg_radial_mom(m2, w2, q) * q;
        },
        0.0, qmax, 200);
}

}  // namespace

TEST_CASE("SourceParams validation and xi") {
    CHECK_THROWS_AS(SourceParams(3.0, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(SourceParams(3.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SourceParams(3.0, -1.0), std::invalid_argument);
    CHECK(xi(SourceParams(780.0, 780.0)) == 0.0);
    CHECK(xi(SourceParams(780.0, 260.0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(xi(SourceParams(3.0, 1.0)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Schmidt eigenvalues") {
    const SourceParams p(3.0, 1.0);  // xi = 0.5
    CHECK(schmidt_lambda(p, {0, 0}) == doctest::Approx(0.5625).epsilon(1e-14));
    // lambda_{1,0} = (1 - xi^2)^2 xi^2 = 0.5625 * 0.25
    CHECK(schmidt_lambda(p, {1, 0}) == doctest::Approx(0.140625).epsilon(1e-14));
    CHECK(schmidt_lambda(p, {-1, 0}) == schmidt_lambda(p, {1, 0}));
    const SourceParams sep(2.0, 2.0);  // xi = 0
    CHECK(schmidt_lambda(sep, {0, 0}) == 1.0);
    CHECK(schmidt_lambda(sep, {1, 0}) == 0.0);
    CHECK(schmidt_lambda(sep, {0, 2}) == 0.0);
}

TEST_CASE("Schmidt number closed form and truncated sum") {
    CHECK(schmidt_number_closed(SourceParams(2.0, 2.0)) == 1.0);
    CHECK(schmidt_number_closed(SourceParams(3.0, 1.0)) ==
          doctest::Approx(25.0 / 9.0).epsilon(1e-14));
    CHECK(schmidt_number_truncated(SourceParams(2.0, 2.0), 10, 10) == 1.0);
    {
        const SourceParams p(3.0, 1.0);  // xi = 0.5
        CHECK(std::abs(schmidt_number_truncated(p, 60, 60) -
                       schmidt_number_closed(p)) <= 1e-9);
        CHECK(std::abs(schmidt_lambda_total(p, 60, 60) - 1.0) <= 1e-12);
    }
    {
        // xi = 0.9: w0/b = (1+xi)/(1-xi) = 19
        const SourceParams p(19.0, 1.0);
        CHECK(xi(p) == doctest::Approx(0.9).epsilon(1e-14));
        CHECK(std::abs(schmidt_number_truncated(p, 400, 400) -
                       schmidt_number_closed(p)) <= 1e-9);
        CHECK(std::abs(schmidt_lambda_total(p, 400, 400) - 1.0) <= 1e-12);
    }
    // K grows without bound as b -> 0 (xi -> 1)
    {
        double prev = 0.0;
        for (double b : {1.0, 0.5, 0.1, 0.01}) {
            const double k = schmidt_number_closed(SourceParams(2.0, b));
            CHECK(k > prev);
            prev = k;
        }
        CHECK(prev > 1e4);
    }
    // converges to the closed form from above as the truncation grows
    const SourceParams p(3.0, 1.0);
    double prev = 1e300;
    for (int t : {2, 4, 8, 16, 32}) {
        const double k = schmidt_number_truncated(p, t, t);
        CHECK(k <= prev + 1e-15);
        CHECK(k >= schmidt_number_closed(p) - 1e-12);
        prev = k;
    }
}

TEST_CASE("Schmidt and beam widths") {
    CHECK(schmidt_width(SourceParams(2.0, 2.0)) ==
          doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(schmidt_width(SourceParams(2.0, 0.5)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    // b at the thin-crystal scale of a 1 mm crystal, 780 um pump
    CHECK(schmidt_width(SourceParams(780.0, 11.28)) ==
          doctest::Approx(132.65).epsilon(1e-3));
    CHECK(beam_width(SourceParams(1.0, 1.0)) ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(beam_width(SourceParams(780.0, 1e-9)) ==
          doctest::Approx(780.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("LG modes: normalisation, orthogonality, vortex null") {
    CHECK(mode_overlap({0, 0}, 2.0, {0, 0}, 2.0) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(mode_overlap({0, 0}, 2.0, {0, 1}, 2.0)) <= 1e-10);
    CHECK(lg_radial_mom({1, 0}, 2.0, 0.0) == 0.0);

    // Gram matrix over ell in [-3, 3], n in [0, 3] at equal width
    const double w = 1.7;
    for (int l1 = -3; l1 <= 3; ++l1) {
        for (int n1 = 0; n1 <= 3; ++n1) {
            for (int n2 = 0; n2 <= 3; ++n2) {
                // orthogonality in ell is enforced by the azimuthal factor;
                // the radial family at fixed |ell| must be orthonormal
                const double g = mode_overlap({l1, n1}, w, {l1, n2}, w);
                const double want = (n1 == n2) ? 1.0 : 0.0;
                CHECK(std::abs(g - want) <= 1e-8);
            }
        }
    }
}

TEST_CASE("two-photon amplitude values and normalisation") {
    const SourceParams p(2.0, 1.0);
    CHECK(two_photon_amplitude(p, {0, 0}, {0, 0}) ==
          doctest::Approx(2.0 / kPi).epsilon(1e-14));
    // anticorrelation ridge: the pump Gaussian saturates at qi = -qs
    const double ridge = two_photon_amplitude(p, {3.0, 0.0}, {-3.0, 0.0});
    CHECK(ridge == doctest::Approx((2.0 / kPi) * std::exp(-0.25 * 36.0))
                       .epsilon(1e-12));
    // amplitude must be strictly positive
    CHECK(two_photon_amplitude(p, {5.0, -2.0}, {1.0, 0.5}) > 0.0);

    // normalisation: int Phi^2 factorises into two isotropic Gaussians
    const double su = integrate(
        [&](double u) { return std::exp(-0.5 * p.w0_um * p.w0_um * u * u) * u; },
        0.0, 12.0 / p.w0_um, 200);
    const double sv = integrate(
        [&](double v) { return std::exp(-0.5 * p.b_um * p.b_um * v * v) * v; },
        0.0, 12.0 / p.b_um, 200);
    const double w0b = p.w0_um * p.b_um;
    // (w0 b/pi)^2 * (1/4) * (2 pi su) * (2 pi sv) with su = 1/w0^2, sv = 1/b^2
    const double total =
        (w0b / kPi) * (w0b / kPi) * 0.25 * (2.0 * kPi * su) * (2.0 * kPi * sv);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Schmidt reconstruction of the amplitude") {
    {
        // xi = 0: single separable term, exact at any point
        const SourceParams p(2.0, 2.0);
        for (auto [qa, qb] : std::vector<std::pair<double, double>>{
                 {0.0, 0.0}, {0.3, -0.2}, {1.0, 0.4}}) {
            const TransverseVec qi{qa, qb}, qs{-qb, qa};
            const std::complex<double> rec = reconstruct_amplitude(p, qi, qs, 0, 0);
            CHECK(rec.real() ==
                  doctest::Approx(two_photon_amplitude(p, qi, qs)).epsilon(1e-12));
            CHECK(std::abs(rec.imag()) <= 1e-14);
        }
    }
    {
        const SourceParams p(3.0, 1.0);  // xi = 0.5
        const std::complex<double> rec =
            reconstruct_amplitude(p, {0, 0}, {0, 0}, 40, 40);
        CHECK(std::abs(rec - two_photon_amplitude(p, {0, 0}, {0, 0})) <= 1e-8);

        // pointwise convergence at probe points, monotone in the truncation
        const std::vector<std::pair<TransverseVec, TransverseVec>> probes = {
            {{0.0, 0.0}, {0.0, 0.0}},   {{0.2, 0.0}, {-0.2, 0.0}},
            {{0.5, 0.1}, {-0.4, 0.0}},  {{0.3, -0.3}, {0.1, 0.2}},
            {{0.8, 0.0}, {0.0, 0.6}},   {{0.1, 0.7}, {-0.2, -0.5}},
            {{1.1, 0.2}, {-0.9, 0.1}},  {{0.4, 0.4}, {-0.4, -0.4}},
            {{0.6, -0.2}, {-0.5, 0.3}}};
        double prev = 1e300;
        for (int t : {5, 10, 20, 40}) {
            double err = 0.0;
            double imag_max = 0.0;
            for (const auto& [qi, qs] : probes) {
                const std::complex<double> r = reconstruct_amplitude(p, qi, qs, t, t);
                err = std::max(err,
                               std::abs(r - two_photon_amplitude(p, qi, qs)));
                imag_max = std::max(imag_max, std::abs(r.imag()));
            }
            CHECK(err <= prev * (1.0 + 1e-12));
            CHECK(imag_max <= 1e-10);
            prev = err;
        }
        CHECK(prev <= 1e-8);
    }
}

TEST_CASE("OAM selection rules of the double-Gaussian amplitude") {
    const SourceParams p(2.0, 1.0);
    const double wS = schmidt_width(p);
    const double c = 0.25 * (p.w0_um * p.w0_um + p.b_um * p.b_um);
    const double y = 0.5 * (p.w0_um * p.w0_um - p.b_um * p.b_um);

    const int nq = 240;
    const double qmax = 14.0 / std::min(wS, p.b_um);
    const QuadRule& rule = gauss_legendre(nq);
    std::vector<double> q(nq), wq(nq);
    for (int j = 0; j < nq; ++j) {
        q[j] = 0.5 * qmax * (rule.nodes[j] + 1.0);
        wq[j] = 0.5 * qmax * rule.weights[j];
    }

    // With both detection widths at w_S, the radial overlap of Phi against
    // u_{l,n} u_{-l,n'} collapses to sqrt(lambda) delta_{nn'}. The azimuthal
    // integrals have been done with the Anger-Jacobi expansion, which brings
    // in the scaled Bessel kernel; exponents are combined before
    // exponentiating so nothing overflows.
    for (int l : {0, 1, 2}) {
        std::vector<double> kernel(nq * nq);
        for (int a = 0; a < nq; ++a)
            for (int b = 0; b < nq; ++b) {
                const double arg = y * q[a] * q[b];
                kernel[a * nq + b] =
                    std::exp(-c * (q[a] * q[a] + q[b] * q[b]) + arg) *
                    bessel_i_scaled(l, arg);
            }
        std::vector<std::vector<double>> modes(3, std::vector<double>(nq));
        for (int n = 0; n <= 2; ++n)
            for (int j = 0; j < nq; ++j)
                modes[n][j] = lg_radial_mom({l, n}, wS, q[j]);

        // The Anger-Jacobi expansion contributes (-1)^l and the conjugated
        // mode phases contribute (-1)^l again; together they cancel, so the
        // projection onto u*_{l,n} u*_{-l,n'} is +sqrt(lambda) delta_{nn'}.
        for (int ni = 0; ni <= 2; ++ni) {
            for (int ns = 0; ns <= 2; ++ns) {
                double acc = 0.0;
                for (int a = 0; a < nq; ++a) {
                    double row = 0.0;
                    for (int b = 0; b < nq; ++b)
                        row += kernel[a * nq + b] * wq[b] * q[b] * modes[ns][b];
                    acc += wq[a] * q[a] * modes[ni][a] * row;
                }
                const double got = 2.0 * p.w0_um * p.b_um * acc;
                const double want =
                    (ni == ns) ? std::sqrt(schmidt_lambda(p, {l, ni})) : 0.0;
                CHECK(std::abs(got - want) <= 1e-8);
            }
        }
    }

    // Full 4D overlap for a charge-violating pair (l_i = 1, l_s = 1): the
    // integral must vanish, OAM conservation forbids l_s != -l_i.
    {
        const int nphi = 24;
        const int nr = 48;
        const QuadRule& rrule = gauss_legendre(nr);
        const double rmax = 10.0 / std::min(wS, p.b_um);
        std::vector<double> r(nr), wr(nr), v(nr);
        for (int j = 0; j < nr; ++j) {
            r[j] = 0.5 * rmax * (rrule.nodes[j] + 1.0);
            wr[j] = 0.5 * rmax * rrule.weights[j];
            v[j] = lg_radial_mom({1, 0}, wS, r[j]);
        }
        std::complex<double> acc = 0.0;
        for (int ai = 0; ai < nphi; ++ai) {
            const double phi_i = 2.0 * kPi * ai / nphi;
            for (int as = 0; as < nphi; ++as) {
                const double phi_s = 2.0 * kPi * as / nphi;
                const double cosd = std::cos(phi_i - phi_s);
                double inner = 0.0;
                for (int a = 0; a < nr; ++a)
                    for (int b = 0; b < nr; ++b)
                        inner += wr[a] * wr[b] * r[a] * r[b] * v[a] * v[b] *
                                 std::exp(-c * (r[a] * r[a] + r[b] * r[b]) -
                                          y * r[a] * r[b] * cosd);
                acc += inner *
                       std::exp(std::complex<double>(0.0, -phi_i - phi_s)) *
                       (2.0 * kPi / nphi) * (2.0 * kPi / nphi);
            }
        }
        acc *= (p.w0_um * p.b_um / kPi) / (2.0 * kPi);
        CHECK(std::abs(acc) <= 1e-8);
    }
}

TEST_CASE("spectrum CSV format") {
    std::ostringstream os;
    write_spectrum_csv(os, SourceParams(3.0, 1.0), 1, 1);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "l,n,lambda");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3 * 2);  // l in {-1,0,1} x n in {0,1}
}
