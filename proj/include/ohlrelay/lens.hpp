#pragma once

#include <string>
#include <vector>

namespace ohl {

// Tunable liquid lens followed by free space of length L' up to the fixed
// output lens.
struct LensSystem {
    double input_waist_m = 2e-3;   // w_0 at the liquid lens
    double rayleigh_m = 0.0;       // pi w_0^2 / lambda
    double wavelength_m = 1550e-9;
    double spacing_m = 40e-3;      // L'
    double focal_min_m = 15e-3;
    double focal_max_m = 60e-3;
    double response_time_s = 5e-3; // informational, 1-10 ms class devices

    static LensSystem make(double w0_m, double wavelength_m, double spacing_m,
                           double focal_min_m = 15e-3, double focal_max_m = 60e-3);
};

struct LensSolution {
    double focal_length_m = 0.0;
    double target_w_m = 0.0;
    double target_divergence_rad = 0.0;
    double forward_residual = 0.0;  // relative round-trip error
};

struct BeamAtLens {
    double beam_radius_m = 0.0;
    double curvature_inv_m = 0.0;  // Re(1/q'), 1/R
};

// Required transmit divergence for a target receiver beam radius.
double divergence_for_target(double wi_star_m, double link_length_m);

// Far-field waist for a target divergence: w = lambda / (pi theta).
double waist_for_divergence(double theta_rad, double wavelength_m);

// First-principles complex-q propagation through lens(F) + free space L':
//   w^2(L') = (lambda/pi) * (L'^2 + z_R^2 (1 - L'/F)^2) / z_R.
BeamAtLens propagate_q(const LensSystem& sys, double focal_length_m);

// Bracketed root solve of propagate_q(F).beam_radius == target on the
// monotone sub-branch below F = L' (falling back to the upper branch).
// Throws std::domain_error when the target is unachievable within the
// focal range.
LensSolution solve_focal_length(const LensSystem& sys, double target_w_m);

// The published closed-form focal length, evaluated verbatim for
// comparison. Its intermediate beam relation is dimensionally inconsistent
// with the ABCD derivation, so this is reproduction only, never asserted.
double paper_focal_length(const LensSystem& sys, double target_w_m);

// Monotone (voltage, focal length) calibration, piecewise-cubic monotone
// interpolation. File format: two numeric columns per line, volts meters,
// strictly increasing volts. Out-of-table queries throw std::out_of_range.
class LensCalibration {
public:
    static LensCalibration identity();  // placeholder mapping F -> F volts
    static LensCalibration load(const std::string& path);
    double focal_for_voltage(double volts) const;
    double voltage_for_focal(double focal_m) const;

private:
    std::vector<double> volts_, focal_m_, slopes_;
    void build_slopes();
};

}  // namespace ohl
