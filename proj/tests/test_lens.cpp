#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ohlrelay/lens.hpp"

using namespace ohl;

namespace {

LensSystem sys() { return LensSystem::make(2e-3, 1550e-9, 40e-3); }

}  // namespace

TEST_CASE("free-space limit: infinite focal length reproduces w(L')") {
    const LensSystem s = sys();
    const double zr = M_PI * s.input_waist_m * s.input_waist_m / s.wavelength_m;
    const double free_w =
        s.input_waist_m *
        std::sqrt(1.0 + (s.spacing_m / zr) * (s.spacing_m / zr));
    const BeamAtLens out = propagate_q(s, 1e15);
    CHECK(std::fabs(out.beam_radius_m - free_w) / free_w < 1e-12);
}

TEST_CASE("propagate_q at F = L' focuses the waist image") {
    const LensSystem s = sys();
    const BeamAtLens out = propagate_q(s, s.spacing_m);
    // w^2 = (lambda/pi) L'^2 / z_R at F = L'.
    const double zr = s.rayleigh_m;
    const double expect = std::sqrt(s.wavelength_m / M_PI * s.spacing_m *
                                    s.spacing_m / zr);
    CHECK(out.beam_radius_m == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("solve_focal_length round-trips below 1e-9") {
    const LensSystem s = sys();
    // Targets spanning the achievable band of the focal range.
    const double w_lo = propagate_q(s, s.focal_max_m).beam_radius_m;
    const double w_hi = propagate_q(s, s.focal_min_m).beam_radius_m;
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double target = w_lo + t * (w_hi - w_lo);
        const LensSolution sol = solve_focal_length(s, target);
        CHECK(sol.focal_length_m >= s.focal_min_m);
        CHECK(sol.focal_length_m <= s.focal_max_m);
        const double back = propagate_q(s, sol.focal_length_m).beam_radius_m;
        CHECK(std::fabs(back - target) / target < 1e-9);
        CHECK(sol.forward_residual < 1e-9);
    }
}

TEST_CASE("unachievable targets throw") {
    const LensSystem s = sys();
    CHECK_THROWS_AS(solve_focal_length(s, 1e-9), std::domain_error);
    CHECK_THROWS_AS(solve_focal_length(s, 1.0), std::domain_error);
}

TEST_CASE("divergence and waist helpers are mutual inverses") {
    const double wi = 600.0, L = 1e6;
    const double theta = divergence_for_target(wi, L);
    CHECK(theta == doctest::Approx(wi / L).epsilon(1e-12));
    const double w = waist_for_divergence(theta, 1550e-9);
    CHECK(w == doctest::Approx(1550e-9 / (M_PI * theta)).epsilon(1e-12));
}

TEST_CASE("paper closed form is reproduced but not asserted against q") {
    const LensSystem s = sys();
    // Real root exists once the target term dominates 2 z_R; below that the
    // published quadratic has no real solution and nan is the contract.
    const double f = paper_focal_length(s, 2e-3);
    CHECK(std::isfinite(f));
    CHECK(f > 0.0);
    CHECK(std::isnan(paper_focal_length(s, 2e-4)));
}

TEST_CASE("lens calibration interpolation is monotone and invertible") {
    const LensCalibration cal = LensCalibration::identity();
    for (double f : {0.016, 0.03, 0.059}) {
        const double v = cal.voltage_for_focal(f);
        CHECK(cal.focal_for_voltage(v) == doctest::Approx(f).epsilon(1e-9));
    }
    CHECK_THROWS_AS(cal.focal_for_voltage(-1e3), std::out_of_range);
}
