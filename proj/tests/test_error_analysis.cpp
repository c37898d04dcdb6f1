#include <doctest.h>

#include <cmath>

#include "ohlrelay/error_analysis.hpp"
#include "ohlrelay/relay_chain.hpp"

using namespace ohl;

namespace {

HopErrorInputs make_inputs(double length_m, double sigma_theta, double wi,
                           double p_th) {
    LinkGeometry g;
    g.length_m = length_m;
    g.jitter_sigma_rad = sigma_theta;
    HopErrorInputs in;
    in.fading = FadingModel::for_link(g, wi);
    in.tx_power_prev_w = 4.0;
    in.threshold_w = p_th;
    in.sigma_bg_w = 6e-9;
    NoiseBudget n;
    in.sigma_prime_w = n.sigma_prime_w();
    return in;
}

// Direct pdf-weighted quadrature of the fading expectation after the
// substitution u = (h/h_max)^gamma. Valid for moderate gamma; used as an
// independent cross-check of the integration-by-parts form.
double pe_ohl_hop_usub(const HopErrorInputs& in) {
    const double g = in.fading.gamma_shape;
    const double hmax = in.fading.h_max;
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    const double miss = integrate(
        [&](double u) {
            const double h = hmax * std::pow(u, 1.0 / g);
            return q_exact((in.tx_power_prev_w * h - in.threshold_w) /
                           in.sigma_bg_w);
        },
        0.0, 1.0, spec);
    return 0.5 * q_exact(in.threshold_w / in.sigma_bg_w) + 0.5 * miss;
}

}  // namespace

TEST_CASE("ohl hop error matches the substitution form at moderate gamma") {
    // Geometries with gamma <= 4, where the naive substitution form still
    // resolves the Gaussian boundary layer and serves as an oracle.
    for (double wi : {400.0, 500.0, 600.0}) {
        const HopErrorInputs in = make_inputs(1e6, 150e-6, wi, 2.5e-8);
        CHECK(in.fading.gamma_shape <= 4.001);
        const double ibp = pe_ohl_hop(in);
        const double ref = pe_ohl_hop_usub(in);
        CHECK(std::fabs(ibp - ref) <= 3e-6 * ref + 1e-300);
    }
}

TEST_CASE("ohl hop error survives strongly peaked fading") {
    // Intra-orbit: gamma ~ 20-36; the naive substitution collapses here,
    // the integration-by-parts form must stay positive and bounded by the
    // crude union of false alarm and full miss.
    const HopErrorInputs in = make_inputs(1.75e6, 50e-6, 606.0, 2.95e-8);
    CHECK(in.fading.gamma_shape > 10.0);
    const double pe = pe_ohl_hop(in);
    CHECK(pe > 1e-12);
    CHECK(pe < 1e-3);
    // Lower bound: the false-alarm half alone.
    CHECK(pe >= 0.5 * q_exact(in.threshold_w / in.sigma_bg_w));
}

TEST_CASE("ohl hop error limits in the threshold") {
    const HopErrorInputs base = make_inputs(1e6, 150e-6, 600.0, 2.5e-8);
    // Tiny threshold: false alarms dominate, pe -> 1/2 Q(0) = 1/4 plus miss.
    HopErrorInputs lo = base;
    lo.threshold_w = 1e-15;
    CHECK(pe_ohl_hop(lo) == doctest::Approx(0.25).epsilon(1e-3));
    // Threshold far above P h_max: every mark is missed, pe -> 1/2.
    HopErrorInputs hi = base;
    hi.threshold_w = 4.0 * base.fading.h_max * 10.0;
    CHECK(pe_ohl_hop(hi) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("df closed form equals the approx-Q quadrature") {
    // Moderate gamma so the substituted quadrature itself is an oracle; at
    // intra-orbit gammas its boundary layer is unresolvable and only the
    // closed form remains trustworthy.
    for (double wi : {350.0, 450.0, 600.0}) {
        const HopErrorInputs in = make_inputs(1e6, 150e-6, wi, 0.0);
        const double closed = pe_df_hop_closed(in);
        QuadratureSpec spec;
        spec.rel_tol = 1e-12;
        const double quad = pe_df_hop_quadrature(in, spec, true);
        CHECK(std::fabs(closed - quad) <= 1e-6 * quad);
    }
}

TEST_CASE("df closed form tracks the exact-Q quadrature") {
    const HopErrorInputs in = make_inputs(1e6, 150e-6, 600.0, 0.0);
    const double closed = pe_df_hop_closed(in);
    const double exact = pe_df_hop_quadrature(in, {}, false);
    CHECK(std::fabs(closed - exact) / exact < 0.25);
}

TEST_CASE("df closed form detects corrupted coefficients") {
    const HopErrorInputs in = make_inputs(1e6, 150e-6, 600.0, 0.0);
    DfClosedFormCoeffs bad;
    bad.a[1] *= 2.0;  // the b = 11/20 term carries most of the mass
    const double good = pe_df_hop_closed(in);
    const double corrupted = pe_df_hop_closed(in, bad);
    CHECK(std::fabs(corrupted - good) / good > 0.1);
}

TEST_CASE("e2e composition") {
    CHECK(pe_e2e({0.0, 0.0}, ChainComposition::ohl_chain) == 0.0);
    CHECK(pe_e2e({1e-3}, ChainComposition::ohl_chain) ==
          doctest::Approx(1e-3).epsilon(1e-12));
    // 1 - (1-a)(1-b) with tiny values: log1p path keeps precision.
    const double a = 3e-13, b = 5e-13;
    CHECK(pe_e2e({a, b}, ChainComposition::df_chain) ==
          doctest::Approx(a + b - a * b).epsilon(1e-10));
    CHECK(pe_e2e({0.5, 1.0}, ChainComposition::ohl_chain) == 1.0);
    CHECK_THROWS_AS(pe_e2e({-0.1}, ChainComposition::ohl_chain),
                    std::invalid_argument);
}

TEST_CASE("surrogate pe is trend-accurate and guards its regime") {
    const HopErrorInputs in = make_inputs(1e6, 150e-6, 600.0, 2.5e-8);
    const double s = pe_ohl_approx(in);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    HopErrorInputs worse = in;
    worse.threshold_w *= 2.0;
    CHECK(pe_ohl_approx(worse) > s);  // raising the threshold raises misses
    HopErrorInputs out_of_regime = in;
    out_of_regime.threshold_w = 2.0 * in.tx_power_prev_w * in.fading.h_max;
    CHECK_THROWS_AS(pe_ohl_approx(out_of_regime), std::domain_error);
}
