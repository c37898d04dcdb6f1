#pragma once

#include "ohlrelay/numerics.hpp"
#include "ohlrelay/rng.hpp"

namespace ohl {

enum class LinkClass { intra_orbit, inter_orbit };

// Physical parameters of one inter-satellite hop.
struct LinkGeometry {
    double length_m = 1.0e6;           // L_i
    double jitter_sigma_rad = 150e-6;  // per-axis pointing-error std
    double aperture_radius_m = 0.1;    // r_a
    double wavelength_m = 1550e-9;
    LinkClass link_class = LinkClass::inter_orbit;
};

// Transmit beam description; receiver radius and divergence follow from
// the waist.
struct BeamConfig {
    double waist_m = 0.0;            // w_0 at the transmitter
    double receiver_radius_m = 0.0;  // w_i at distance L
    double divergence_rad = 0.0;     // far-field half-angle lambda/(pi w_0)

    static BeamConfig from_waist(const LinkGeometry& geom, double w0);
    // Far-field inversion: pick the waist whose divergence produces the
    // requested beam radius at the link distance.
    static BeamConfig from_receiver_radius(const LinkGeometry& geom, double wi);
};

// Power-law fading of the channel gain h on (0, h_max]:
//   pdf f(h) = gamma * h^{gamma-1} * h_max^{-gamma}
//   cdf F(h) = (h / h_max)^gamma
struct FadingModel {
    double gamma_shape = 0.0;  // w^2 / (4 L^2 sigma_theta^2)
    double h_max = 0.0;        // r_a^2 / w^2

    static FadingModel for_link(const LinkGeometry& geom, double wi);
    double pdf(double h) const;
    double cdf(double h) const;
    double mean_gain() const;  // gamma/(gamma+1) * h_max
};

struct PointingError {
    double theta_x_rad = 0.0;
    double theta_y_rad = 0.0;
};

// Gaussian beam radius after propagating the link length from waist w0.
double beam_radius_at(const LinkGeometry& geom, double w0);

// Fraction of optical power collected by the aperture, by quadrature of the
// displaced Gaussian intensity over the circular aperture (reduced to one
// radial integral with a Bessel kernel).
double channel_gain_exact(const LinkGeometry& geom, double wi,
                          const PointingError& err,
                          const QuadratureSpec& spec = {});

// Far-field closed form h = (r_a^2/w^2) exp(-2 L^2 (tx^2+ty^2) / w^2).
// Valid when the beam is much wider than the aperture; if wi < 10 r_a the
// optional flag is set (diagnostic only, the value is still returned).
double channel_gain_farfield(const FadingModel& fm, const LinkGeometry& geom,
                             double wi, const PointingError& err,
                             bool* validity_warning = nullptr);

PointingError sample_pointing(const LinkGeometry& geom, Rng& rng);

// exp(-z) * I0(z), stable for large z.
double bessel_i0_scaled(double z);

}  // namespace ohl
