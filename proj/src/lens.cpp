#include "ohlrelay/lens.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ohl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

LensSystem LensSystem::make(double w0_m, double wavelength_m, double spacing_m,
                            double focal_min_m, double focal_max_m) {
    if (w0_m <= 0.0 || wavelength_m <= 0.0 || spacing_m <= 0.0 ||
        focal_min_m <= 0.0 || focal_max_m <= focal_min_m)
        throw std::invalid_argument("LensSystem: invalid parameters");
    LensSystem s;
    s.input_waist_m = w0_m;
    s.wavelength_m = wavelength_m;
    s.rayleigh_m = kPi * w0_m * w0_m / wavelength_m;
    s.spacing_m = spacing_m;
    s.focal_min_m = focal_min_m;
    s.focal_max_m = focal_max_m;
    return s;
}

double divergence_for_target(double wi_star_m, double link_length_m) {
    if (wi_star_m <= 0.0 || link_length_m <= 0.0)
        throw std::invalid_argument("divergence_for_target: inputs must be > 0");
    return wi_star_m / link_length_m;
}

double waist_for_divergence(double theta_rad, double wavelength_m) {
    if (theta_rad <= 0.0)
        throw std::invalid_argument("waist_for_divergence: theta must be > 0");
    return wavelength_m / (kPi * theta_rad);
}

BeamAtLens propagate_q(const LensSystem& sys, double focal_length_m) {
    if (focal_length_m == 0.0)
        throw std::invalid_argument("propagate_q: focal length must be nonzero");
    const double zr = sys.rayleigh_m;
    const double lp = sys.spacing_m;
    // q' = (A i z_R + B) / (C i z_R + D), A = 1 - L'/F, B = L', C = -1/F, D = 1.
    const double a = 1.0 - lp / focal_length_m;
    const double denom = lp * lp + zr * zr * a * a;  // |B + i A z_R|^2
    BeamAtLens out;
    // -Im(1/q') = z_R / denom = lambda / (pi w^2)
    out.beam_radius_m = std::sqrt(sys.wavelength_m * denom / (kPi * zr));
    // Re(1/q') = (B D + A C z_R^2) / denom
    out.curvature_inv_m = (lp - a * zr * zr / focal_length_m) / denom;
    return out;
}

namespace {

double bisect_focal(const LensSystem& sys, double target, double lo, double hi) {
    auto f = [&](double F) { return propagate_q(sys, F).beam_radius_m - target; };
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) return -1.0;  // no root in bracket
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if ((hi - lo) < 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

LensSolution solve_focal_length(const LensSystem& sys, double target_w_m) {
    if (target_w_m <= 0.0)
        throw std::invalid_argument("solve_focal_length: target must be > 0");
    const double lp = sys.spacing_m;
    // The beam radius is minimized at F = L' and monotone on either side.
    double min_w = propagate_q(sys, std::clamp(lp, sys.focal_min_m,
                                               sys.focal_max_m))
                       .beam_radius_m;
    min_w = std::min({min_w, propagate_q(sys, sys.focal_min_m).beam_radius_m,
                      propagate_q(sys, sys.focal_max_m).beam_radius_m});
    if (target_w_m < min_w) {
        std::ostringstream os;
        os << "solve_focal_length: target " << target_w_m
           << " m below achievable minimum " << min_w << " m in focal range";
        throw std::domain_error(os.str());
    }

    double root = -1.0;
    if (lp > sys.focal_min_m) {
        // Lower branch: w decreasing in F on [focal_min, min(L', focal_max)].
        root = bisect_focal(sys, target_w_m, sys.focal_min_m,
                            std::min(lp, sys.focal_max_m));
    }
    if (root < 0.0 && lp < sys.focal_max_m) {
        // Upper branch: w increasing in F on [max(L', focal_min), focal_max].
        root = bisect_focal(sys, target_w_m, std::max(lp, sys.focal_min_m),
                            sys.focal_max_m);
    }
    if (root < 0.0)
        throw std::domain_error(
            "solve_focal_length: no focal length in range reaches the target");

    LensSolution sol;
    sol.focal_length_m = root;
    sol.target_w_m = target_w_m;
    sol.target_divergence_rad =
        sys.wavelength_m / (kPi * target_w_m);  // far-field angle of that waist
    sol.forward_residual =
        std::fabs(propagate_q(sys, root).beam_radius_m - target_w_m) /
        target_w_m;
    return sol;
}

double paper_focal_length(const LensSystem& sys, double target_w_m) {
    const double lp = sys.spacing_m;
    const double zr = sys.rayleigh_m;
    const double t = 2.0 * lp +
                     kPi * target_w_m * target_w_m * zr / sys.wavelength_m;
    const double disc = t * t - 4.0 * (lp * lp + zr * zr);
    if (disc < 0.0) return std::nan("");
    return 0.5 * (t + std::sqrt(disc));
}

LensCalibration LensCalibration::identity() {
    LensCalibration c;
    // Placeholder: volts numerically equal to millimeters of focal length
    // over a generous span.
    for (int i = 0; i <= 100; ++i) {
        const double f = 1e-3 + i * 1e-3;
        c.volts_.push_back(f * 1e3);
        c.focal_m_.push_back(f);
    }
    c.build_slopes();
    return c;
}

LensCalibration LensCalibration::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("LensCalibration: cannot open " + path);
    LensCalibration c;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double v, f;
        if (!(ls >> v >> f))
            throw std::runtime_error("LensCalibration: malformed line: " + line);
        if (!c.volts_.empty() && v <= c.volts_.back())
            throw std::runtime_error(
                "LensCalibration: voltages must be strictly increasing");
        c.volts_.push_back(v);
        c.focal_m_.push_back(f);
    }
    if (c.volts_.size() < 2)
        throw std::runtime_error("LensCalibration: needs at least two points");
    for (std::size_t i = 1; i < c.focal_m_.size(); ++i)
        if (c.focal_m_[i] == c.focal_m_[i - 1])
            throw std::runtime_error("LensCalibration: focal lengths must be "
                                     "strictly monotone");
    c.build_slopes();
    return c;
}

void LensCalibration::build_slopes() {
    // Fritsch-Carlson monotone cubic slopes over (volts, focal).
    const std::size_t n = volts_.size();
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d[i] = (focal_m_[i + 1] - focal_m_[i]) / (volts_[i + 1] - volts_[i]);
    slopes_.assign(n, 0.0);
    slopes_[0] = d[0];
    slopes_[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0)
            slopes_[i] = 0.0;
        else
            slopes_[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
    }
}

double LensCalibration::focal_for_voltage(double volts) const {
    if (volts < volts_.front() || volts > volts_.back())
        throw std::out_of_range("LensCalibration: voltage outside table");
    const auto it = std::upper_bound(volts_.begin(), volts_.end(), volts);
    const std::size_t i =
        std::min<std::size_t>(volts_.size() - 2,
                              static_cast<std::size_t>(it - volts_.begin()) - 1);
    const double h = volts_[i + 1] - volts_[i];
    const double t = (volts - volts_[i]) / h;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * focal_m_[i] + h10 * h * slopes_[i] + h01 * focal_m_[i + 1] +
           h11 * h * slopes_[i + 1];
}

double LensCalibration::voltage_for_focal(double focal_m) const {
    const bool increasing = focal_m_.back() > focal_m_.front();
    const double lo = increasing ? focal_m_.front() : focal_m_.back();
    const double hi = increasing ? focal_m_.back() : focal_m_.front();
    if (focal_m < lo || focal_m > hi)
        throw std::out_of_range("LensCalibration: focal length outside table");
    double a = volts_.front(), b = volts_.back();
    for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (a + b);
        const double f = focal_for_voltage(m);
        if ((f < focal_m) == increasing)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace ohl
