#include "ohlrelay/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ohl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

BeamConfig BeamConfig::from_waist(const LinkGeometry& geom, double w0) {
    if (w0 <= 0.0) throw std::invalid_argument("BeamConfig: waist must be > 0");
    BeamConfig b;
    b.waist_m = w0;
    b.receiver_radius_m = beam_radius_at(geom, w0);
    b.divergence_rad = geom.wavelength_m / (kPi * w0);
    return b;
}

BeamConfig BeamConfig::from_receiver_radius(const LinkGeometry& geom, double wi) {
    if (wi <= 0.0)
        throw std::invalid_argument("BeamConfig: beam radius must be > 0");
    // In the far field wi ~ theta_d * L = lambda L / (pi w0).
    const double w0 = geom.wavelength_m * geom.length_m / (kPi * wi);
    BeamConfig b;
    b.waist_m = w0;
    b.receiver_radius_m = wi;
    b.divergence_rad = geom.wavelength_m / (kPi * w0);
    return b;
}

FadingModel FadingModel::for_link(const LinkGeometry& geom, double wi) {
    FadingModel fm;
    const double ls = geom.length_m * geom.jitter_sigma_rad;
    fm.gamma_shape = wi * wi / (4.0 * ls * ls);
    fm.h_max = geom.aperture_radius_m * geom.aperture_radius_m / (wi * wi);
    return fm;
}

double FadingModel::pdf(double h) const {
    if (h <= 0.0 || h >= h_max) return 0.0;
    return gamma_shape * std::pow(h / h_max, gamma_shape) / h;
}

double FadingModel::cdf(double h) const {
    if (h <= 0.0) return 0.0;
    if (h >= h_max) return 1.0;
    return std::pow(h / h_max, gamma_shape);
}

double FadingModel::mean_gain() const {
    return gamma_shape / (gamma_shape + 1.0) * h_max;
}

double beam_radius_at(const LinkGeometry& geom, double w0) {
    if (w0 <= 0.0) throw std::invalid_argument("beam_radius_at: w0 must be > 0");
    const double s = geom.wavelength_m * geom.length_m / (kPi * w0 * w0);
    return w0 * std::sqrt(1.0 + s * s);
}

double bessel_i0_scaled(double z) {
    // z >= 0 in this usage.
    if (z < 600.0) {
        // Power series for I0, then scale.
        double term = 1.0, sum = 1.0;
        const double q = 0.25 * z * z;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return sum * std::exp(-z);
    }
    // Asymptotic expansion: I0(z) e^{-z} ~ (2 pi z)^{-1/2} (1 + 1/(8z) + ...).
    const double iz = 1.0 / z;
    const double s = 1.0 + iz * (0.125 + iz * (0.0703125 + iz * 0.0732421875));
    return s / std::sqrt(2.0 * kPi * z);
}

double channel_gain_exact(const LinkGeometry& geom, double wi,
                          const PointingError& err, const QuadratureSpec& spec) {
    if (wi <= 0.0)
        throw std::invalid_argument("channel_gain_exact: wi must be > 0");
    const double ra = geom.aperture_radius_m;
    const double L = geom.length_m;
    const double dx = L * err.theta_x_rad;
    const double dy = L * err.theta_y_rad;
    const double d = std::hypot(dx, dy);
    const double w2 = wi * wi;
    // Polar decomposition about the aperture center; the angular integral
    // of the displaced Gaussian is 2*pi*I0(4 r d / w^2) * exp(-2(r^2+d^2)/w^2).
    // Combine exponents with the scaled Bessel term so deep fades do not
    // underflow before they cancel:
    //   h = (4/w^2) int_0^ra r exp(-2 (r-d)^2 / w^2) * I0s(4 r d / w^2) dr.
    auto integrand = [&](double r) {
        const double e = -2.0 * (r - d) * (r - d) / w2;
        return r * std::exp(e) * bessel_i0_scaled(4.0 * r * d / w2);
    };
    return 4.0 / w2 * integrate(integrand, 0.0, ra, spec);
}

double channel_gain_farfield(const FadingModel& fm, const LinkGeometry& geom,
                             double wi, const PointingError& err,
                             bool* validity_warning) {
    if (validity_warning)
        *validity_warning = (wi < 10.0 * geom.aperture_radius_m);
    const double L = geom.length_m;
    const double r2 = err.theta_x_rad * err.theta_x_rad +
                      err.theta_y_rad * err.theta_y_rad;
    return fm.h_max * std::exp(-2.0 * L * L * r2 / (wi * wi));
}

PointingError sample_pointing(const LinkGeometry& geom, Rng& rng) {
    double zx, zy;
    rng.normal_pair(zx, zy);
    return PointingError{geom.jitter_sigma_rad * zx, geom.jitter_sigma_rad * zy};
}

}  // namespace ohl
