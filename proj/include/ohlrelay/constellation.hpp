#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ohlrelay/channel.hpp"
#include "ohlrelay/rng.hpp"

namespace ohl {

using Vec3 = std::array<double, 3>;

struct ConstellationConfig {
    int num_planes = 20;
    int sats_per_plane = 25;
    double altitude_m = 600e3;
    double inclination_deg = 53.0;
    double perturbation_max_deg = 1.0;  // uniform in-plane offset
    double earth_radius_m = 6371e3;
    std::uint64_t seed = 1;
};

struct Satellite {
    int plane_index = 0;
    int slot_index = 0;
    Vec3 position_m{};
};

struct ConstellationSnapshot {
    std::string epoch_tag;
    ConstellationConfig config;
    std::vector<Satellite> satellites;

    int id_of(int plane, int slot) const { return plane * config.sats_per_plane + slot; }
};

struct LinkCandidate {
    int from_id = 0;
    int to_id = 0;
    double length_m = 0.0;
    LinkClass link_class = LinkClass::inter_orbit;
    double sigma_theta_rad = 150e-6;
};

struct LinkLimits {
    double max_inter_orbit_m = 1e6;
    double max_intra_orbit_m = 2e6;
    double min_altitude_clearance_m = 100e3;
    double sigma_theta_intra_rad = 50e-6;
    double sigma_theta_inter_rad = 150e-6;
};

struct RoutePath {
    std::vector<int> node_sequence;
    std::vector<LinkCandidate> links;
    double total_length_m = 0.0;
    int relay_count = 0;  // intermediate nodes, excluding endpoints
};

enum class RouteObjective { min_total_length, min_e2e_pe };

// Circular inclined orbits, RAAN uniformly spaced across planes, slots
// uniformly spaced in argument of latitude plus a uniform in-plane
// perturbation drawn from the stream.
ConstellationSnapshot generate_snapshot(const ConstellationConfig& cfg,
                                        RngStream rng,
                                        const std::string& epoch_tag = "S0");

// All satellite pairs within the class length limit whose chord clears the
// Earth by the configured margin. Each pair is emitted once (from < to).
std::vector<LinkCandidate> feasible_links(const ConstellationSnapshot& snap,
                                          const LinkLimits& limits = {});

// Satellites inside the great-circle corridor spanned by the source and
// destination directions. Throws std::runtime_error when the corridor is
// too narrow to contain anything.
std::vector<int> filter_candidates(const ConstellationSnapshot& snap,
                                   const Vec3& source_pos, const Vec3& dest_pos,
                                   double corridor_half_angle_deg = 15.0);

// Dijkstra over the candidate-induced link graph. Edge weights are lengths
// for min_total_length, or -log1p(-pe) for min_e2e_pe where the caller
// supplies per-link error probabilities through the callback.
RoutePath route(const ConstellationSnapshot& snap,
                const std::vector<LinkCandidate>& links,
                const std::vector<int>& candidates, int src_id, int dst_id,
                RouteObjective objective = RouteObjective::min_total_length,
                const std::function<double(const LinkCandidate&)>& pe_of_link = {});

int nearest_satellite(const ConstellationSnapshot& snap, const Vec3& point_m);

// Re-validates a route against the constraints it was built under.
bool validate_route(const ConstellationSnapshot& snap, const RoutePath& path,
                    const LinkLimits& limits = {});

// JSON (de)serialization; stable field names documented in the README.
std::string snapshot_to_json(const ConstellationSnapshot& snap);
ConstellationSnapshot snapshot_from_json(const std::string& text);
std::string route_to_json(const RoutePath& path);
RoutePath route_from_json(const std::string& text);

void save_text_file(const std::string& path, const std::string& text);
std::string load_text_file(const std::string& path);

}  // namespace ohl
