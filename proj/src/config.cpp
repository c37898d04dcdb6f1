#include "ohlrelay/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ohl {

namespace {

std::string format_double(double v) {
    char buf[64];
    if (std::isfinite(v) && v == std::nearbyint(v) && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Trim to the shortest representation that still round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[64];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == v) return shorter;
    }
    return buf;
}

struct Field {
    const char* key;
    // Accessors over a mutable config; doubles and integers are separate
    // so integer keys reject fractional input.
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

double parse_number(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for key '" + key +
                                    "': " + value);
    }
    if (used != value.size())
        throw std::invalid_argument("config: trailing junk for key '" + key +
                                    "': " + value);
    return v;
}

#define DOUBLE_FIELD(name)                                               \
    Field{#name,                                                         \
          [](const ExperimentConfig& c) { return format_double(c.name); }, \
          [](ExperimentConfig& c, const std::string& v) {                \
              c.name = parse_number(#name, v);                           \
          }}

#define INT_FIELD(name)                                                   \
    Field{#name,                                                          \
          [](const ExperimentConfig& c) { return std::to_string(c.name); }, \
          [](ExperimentConfig& c, const std::string& v) {                 \
              const double d = parse_number(#name, v);                    \
              const long long i = static_cast<long long>(d);              \
              if (static_cast<double>(i) != d)                            \
                  throw std::invalid_argument(                            \
                      "config: key '" #name "' must be an integer");      \
              c.name = i;                                                 \
          }}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        DOUBLE_FIELD(tx_power_w),
        DOUBLE_FIELD(ohl_output_w),
        DOUBLE_FIELD(sigma_theta_intra_rad),
        DOUBLE_FIELD(sigma_theta_inter_rad),
        DOUBLE_FIELD(aperture_radius_m),
        DOUBLE_FIELD(wavelength_m),
        DOUBLE_FIELD(optical_freq_hz),
        DOUBLE_FIELD(bandwidth_hz),
        DOUBLE_FIELD(n_sp),
        DOUBLE_FIELD(planck_h),
        DOUBLE_FIELD(p_bg_w),
        DOUBLE_FIELD(responsivity_a_per_w),
        DOUBLE_FIELD(sigma_thermal),
        DOUBLE_FIELD(altitude_m),
        DOUBLE_FIELD(inclination_deg),
        INT_FIELD(planes),
        INT_FIELD(sats_per_plane),
        DOUBLE_FIELD(perturbation_max_deg),
        DOUBLE_FIELD(max_intra_link_m),
        DOUBLE_FIELD(max_inter_link_m),
        DOUBLE_FIELD(clearance_m),
        DOUBLE_FIELD(corridor_half_angle_deg),
        DOUBLE_FIELD(lens_w0_m),
        DOUBLE_FIELD(lens_spacing_m),
        DOUBLE_FIELD(lens_focal_min_m),
        DOUBLE_FIELD(lens_focal_max_m),
        DOUBLE_FIELD(ground_lat_src_deg),
        DOUBLE_FIELD(ground_lon_src_deg),
        DOUBLE_FIELD(ground_lat_dst_deg),
        DOUBLE_FIELD(ground_lon_dst_deg),
        Field{"seed",
              [](const ExperimentConfig& c) { return std::to_string(c.seed); },
              [](ExperimentConfig& c, const std::string& v) {
                  std::uint64_t s = 0;
                  const auto res =
                      std::from_chars(v.data(), v.data() + v.size(), s);
                  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
                      throw std::invalid_argument(
                          "config: key 'seed' must be a nonnegative integer");
                  c.seed = s;
              }},
    };
    return f;
}

#undef DOUBLE_FIELD
#undef INT_FIELD

void require_positive(double v, const char* name) {
    if (!(v > 0.0))
        throw std::invalid_argument(std::string("config: ") + name +
                                    " must be positive");
}

}  // namespace

void ExperimentConfig::validate() const {
    require_positive(tx_power_w, "tx_power_w");
    require_positive(ohl_output_w, "ohl_output_w");
    require_positive(sigma_theta_intra_rad, "sigma_theta_intra_rad");
    require_positive(sigma_theta_inter_rad, "sigma_theta_inter_rad");
    require_positive(aperture_radius_m, "aperture_radius_m");
    require_positive(wavelength_m, "wavelength_m");
    require_positive(optical_freq_hz, "optical_freq_hz");
    require_positive(bandwidth_hz, "bandwidth_hz");
    require_positive(n_sp, "n_sp");
    require_positive(planck_h, "planck_h");
    require_positive(p_bg_w, "p_bg_w");
    require_positive(responsivity_a_per_w, "responsivity_a_per_w");
    require_positive(sigma_thermal, "sigma_thermal");
    require_positive(altitude_m, "altitude_m");
    if (planes < 1 || sats_per_plane < 1)
        throw std::invalid_argument("config: planes and sats_per_plane >= 1");
    if (inclination_deg <= 0.0 || inclination_deg > 90.0)
        throw std::invalid_argument("config: inclination_deg in (0, 90]");
    require_positive(max_intra_link_m, "max_intra_link_m");
    require_positive(max_inter_link_m, "max_inter_link_m");
    require_positive(corridor_half_angle_deg, "corridor_half_angle_deg");
    require_positive(lens_w0_m, "lens_w0_m");
    require_positive(lens_spacing_m, "lens_spacing_m");
    if (!(lens_focal_min_m > 0.0 && lens_focal_max_m > lens_focal_min_m))
        throw std::invalid_argument("config: lens focal range invalid");
}

NoiseBudget ExperimentConfig::noise_budget() const {
    NoiseBudget n;
    n.background_sigma_w = p_bg_w;
    n.n_sp = n_sp;
    n.planck_h = planck_h;
    n.optical_freq_hz = optical_freq_hz;
    n.bandwidth_hz = bandwidth_hz;
    n.responsivity_a_per_w = responsivity_a_per_w;
    n.thermal_sigma_a = sigma_thermal;
    return n;
}

ConstellationConfig ExperimentConfig::constellation() const {
    ConstellationConfig c;
    c.num_planes = static_cast<int>(planes);
    c.sats_per_plane = static_cast<int>(sats_per_plane);
    c.altitude_m = altitude_m;
    c.inclination_deg = inclination_deg;
    c.perturbation_max_deg = perturbation_max_deg;
    c.seed = seed;
    return c;
}

LinkLimits ExperimentConfig::link_limits() const {
    LinkLimits l;
    l.max_inter_orbit_m = max_inter_link_m;
    l.max_intra_orbit_m = max_intra_link_m;
    l.min_altitude_clearance_m = clearance_m;
    l.sigma_theta_intra_rad = sigma_theta_intra_rad;
    l.sigma_theta_inter_rad = sigma_theta_inter_rad;
    return l;
}

LensSystem ExperimentConfig::lens_system() const {
    return LensSystem::make(lens_w0_m, wavelength_m, lens_spacing_m,
                            lens_focal_min_m, lens_focal_max_m);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " +
                                        std::to_string(lineno) + " has no '='");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& f : fields()) {
            if (key == f.key) {
                f.set(cfg, value);
                found = true;
                break;
            }
        }
        if (!found)
            throw std::invalid_argument("config: unknown key '" + key +
                                        "' on line " + std::to_string(lineno));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) {
        out += f.key;
        out += " = ";
        out += f.get(cfg);
        out += '\n';
    }
    return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ohl
