#include "ohlrelay/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ohl {

namespace {

constexpr double kPi = 3.14159265358979323846;

double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

Vec3 sub(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

// Closest distance from the origin to segment a-b.
double segment_origin_distance(const Vec3& a, const Vec3& b) {
    const Vec3 ab = sub(b, a);
    const double denom = dot(ab, ab);
    double t = denom > 0.0 ? -dot(a, ab) / denom : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec3 p{a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]};
    return norm(p);
}

}  // namespace

ConstellationSnapshot generate_snapshot(const ConstellationConfig& cfg,
                                        RngStream stream,
                                        const std::string& epoch_tag) {
    if (cfg.num_planes < 1 || cfg.sats_per_plane < 1)
        throw std::invalid_argument("generate_snapshot: counts must be >= 1");
    if (cfg.inclination_deg <= 0.0 || cfg.inclination_deg > 90.0)
        throw std::invalid_argument("generate_snapshot: inclination out of range");
    ConstellationSnapshot snap;
    snap.epoch_tag = epoch_tag;
    snap.config = cfg;
    const double r = cfg.earth_radius_m + cfg.altitude_m;
    const double inc = cfg.inclination_deg * kPi / 180.0;
    const double pert = cfg.perturbation_max_deg * kPi / 180.0;
    Rng rng(stream);
    for (int p = 0; p < cfg.num_planes; ++p) {
        const double raan = 2.0 * kPi * p / cfg.num_planes;
        const double cr = std::cos(raan), sr = std::sin(raan);
        const double ci = std::cos(inc), si = std::sin(inc);
        for (int s = 0; s < cfg.sats_per_plane; ++s) {
            const double offset = pert * (2.0 * rng.uniform01() - 1.0);
            const double u = 2.0 * kPi * s / cfg.sats_per_plane + offset;
            // Orbit-plane coordinates rotated by inclination then RAAN.
            const double xo = std::cos(u), yo = std::sin(u);
            const Vec3 pos{r * (cr * xo - sr * ci * yo),
                           r * (sr * xo + cr * ci * yo), r * (si * yo)};
            snap.satellites.push_back(Satellite{p, s, pos});
        }
    }
    return snap;
}

std::vector<LinkCandidate> feasible_links(const ConstellationSnapshot& snap,
                                          const LinkLimits& limits) {
    if (snap.satellites.empty())
        throw std::invalid_argument("feasible_links: empty snapshot");
    std::vector<LinkCandidate> out;
    const double clear_r =
        snap.config.earth_radius_m + limits.min_altitude_clearance_m;
    const auto& sats = snap.satellites;
    for (std::size_t i = 0; i < sats.size(); ++i) {
        for (std::size_t j = i + 1; j < sats.size(); ++j) {
            const double len = norm(sub(sats[j].position_m, sats[i].position_m));
            const bool intra = sats[i].plane_index == sats[j].plane_index;
            const double max_len =
                intra ? limits.max_intra_orbit_m : limits.max_inter_orbit_m;
            if (len > max_len || len <= 0.0) continue;
            if (segment_origin_distance(sats[i].position_m, sats[j].position_m) <
                clear_r)
                continue;
            LinkCandidate c;
            c.from_id = static_cast<int>(i);
            c.to_id = static_cast<int>(j);
            c.length_m = len;
            c.link_class = intra ? LinkClass::intra_orbit : LinkClass::inter_orbit;
            c.sigma_theta_rad = intra ? limits.sigma_theta_intra_rad
                                      : limits.sigma_theta_inter_rad;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<int> filter_candidates(const ConstellationSnapshot& snap,
                                   const Vec3& source_pos, const Vec3& dest_pos,
                                   double corridor_half_angle_deg) {
    const Vec3 s = normalized(source_pos);
    const Vec3 d = normalized(dest_pos);
    const Vec3 n = normalized(cross(s, d));
    const double arc = std::acos(std::clamp(dot(s, d), -1.0, 1.0));
    const double half = corridor_half_angle_deg * kPi / 180.0;
    std::vector<int> out;
    for (std::size_t i = 0; i < snap.satellites.size(); ++i) {
        const Vec3 v = normalized(snap.satellites[i].position_m);
        // Distance from the great-circle plane.
        const double off = std::asin(std::clamp(std::fabs(dot(v, n)), 0.0, 1.0));
        if (off > half) continue;
        // Stay within the arc between the two directions (with the same
        // angular slack at the ends).
        const double as = std::acos(std::clamp(dot(v, s), -1.0, 1.0));
        const double ad = std::acos(std::clamp(dot(v, d), -1.0, 1.0));
        if (as > arc + half || ad > arc + half) continue;
        out.push_back(static_cast<int>(i));
    }
    if (out.empty())
        throw std::runtime_error(
            "filter_candidates: corridor too narrow, widen the half angle");
    return out;
}

RoutePath route(const ConstellationSnapshot& snap,
                const std::vector<LinkCandidate>& links,
                const std::vector<int>& candidates, int src_id, int dst_id,
                RouteObjective objective,
                const std::function<double(const LinkCandidate&)>& pe_of_link) {
    RoutePath path;
    if (src_id == dst_id) {
        path.node_sequence = {src_id};
        return path;
    }
    std::vector<char> allowed(snap.satellites.size(), 0);
    for (int c : candidates) allowed[c] = 1;
    if (!allowed[src_id] || !allowed[dst_id])
        throw std::invalid_argument("route: endpoints must be in the candidate set");

    // Adjacency restricted to allowed nodes.
    struct Edge {
        int to;
        double w;
        std::size_t link_idx;
    };
    std::vector<std::vector<Edge>> adj(snap.satellites.size());
    for (std::size_t li = 0; li < links.size(); ++li) {
        const auto& l = links[li];
        if (!allowed[l.from_id] || !allowed[l.to_id]) continue;
        double w;
        if (objective == RouteObjective::min_total_length) {
            w = l.length_m;
        } else {
            if (!pe_of_link)
                throw std::invalid_argument(
                    "route: min_e2e_pe objective needs a pe_of_link callback");
            w = -std::log1p(-pe_of_link(l));
        }
        adj[l.from_id].push_back({l.to_id, w, li});
        adj[l.to_id].push_back({l.from_id, w, li});
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(snap.satellites.size(), inf);
    std::vector<int> prev(snap.satellites.size(), -1);
    std::vector<std::size_t> prev_link(snap.satellites.size(), 0);
    using QItem = std::pair<double, int>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> q;
    dist[src_id] = 0.0;
    q.push({0.0, src_id});
    while (!q.empty()) {
        const auto [d, u] = q.top();
        q.pop();
        if (d > dist[u]) continue;
        if (u == dst_id) break;
        for (const auto& e : adj[u]) {
            const double nd = d + e.w;
            if (nd < dist[e.to]) {
                dist[e.to] = nd;
                prev[e.to] = u;
                prev_link[e.to] = e.link_idx;
                q.push({nd, e.to});
            }
        }
    }
    if (dist[dst_id] == inf) {
        int reachable = 0;
        for (double d : dist)
            if (d < inf) ++reachable;
        std::ostringstream os;
        os << "route: no path from " << src_id << " to " << dst_id << " ("
           << reachable << " reachable nodes in candidate graph)";
        throw std::runtime_error(os.str());
    }
    std::vector<int> seq;
    std::vector<std::size_t> link_idx;
    for (int v = dst_id; v != src_id; v = prev[v]) {
        seq.push_back(v);
        link_idx.push_back(prev_link[v]);
    }
    seq.push_back(src_id);
    std::reverse(seq.begin(), seq.end());
    std::reverse(link_idx.begin(), link_idx.end());
    path.node_sequence = seq;
    for (std::size_t i = 0; i < link_idx.size(); ++i) {
        LinkCandidate l = links[link_idx[i]];
        // Orient the stored link along the travel direction.
        if (l.from_id != seq[i]) std::swap(l.from_id, l.to_id);
        path.links.push_back(l);
        path.total_length_m += l.length_m;
    }
    path.relay_count = static_cast<int>(seq.size()) - 2;
    return path;
}

int nearest_satellite(const ConstellationSnapshot& snap, const Vec3& point_m) {
    if (snap.satellites.empty())
        throw std::invalid_argument("nearest_satellite: empty snapshot");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < snap.satellites.size(); ++i) {
        const double d = norm(sub(snap.satellites[i].position_m, point_m));
        if (d < best_d) {  // strict: ties keep the lowest id
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

bool validate_route(const ConstellationSnapshot& snap, const RoutePath& path,
                    const LinkLimits& limits) {
    if (path.node_sequence.size() < 2) return path.links.empty();
    if (path.links.size() + 1 != path.node_sequence.size()) return false;
    const double clear_r =
        snap.config.earth_radius_m + limits.min_altitude_clearance_m;
    double total = 0.0;
    for (std::size_t i = 0; i < path.links.size(); ++i) {
        const auto& l = path.links[i];
        if (l.from_id != path.node_sequence[i] ||
            l.to_id != path.node_sequence[i + 1])
            return false;
        const auto& a = snap.satellites[l.from_id];
        const auto& b = snap.satellites[l.to_id];
        const double len = norm(sub(b.position_m, a.position_m));
        if (std::fabs(len - l.length_m) > 1e-6 * len) return false;
        const bool intra = a.plane_index == b.plane_index;
        if (intra != (l.link_class == LinkClass::intra_orbit)) return false;
        const double max_len =
            intra ? limits.max_intra_orbit_m : limits.max_inter_orbit_m;
        if (len > max_len) return false;
        if (segment_origin_distance(a.position_m, b.position_m) < clear_r)
            return false;
        total += len;
    }
    return std::fabs(total - path.total_length_m) <= 1e-6 * total &&
           path.relay_count == static_cast<int>(path.node_sequence.size()) - 2;
}

namespace {

using nlohmann::json;

json link_to_json(const LinkCandidate& l) {
    return json{{"from_id", l.from_id},
                {"to_id", l.to_id},
                {"length_m", l.length_m},
                {"link_class", l.link_class == LinkClass::intra_orbit
                                   ? "intra_orbit"
                                   : "inter_orbit"},
                {"sigma_theta_rad", l.sigma_theta_rad}};
}

LinkCandidate link_from_json(const json& j) {
    LinkCandidate l;
    l.from_id = j.at("from_id").get<int>();
    l.to_id = j.at("to_id").get<int>();
    l.length_m = j.at("length_m").get<double>();
    l.link_class = j.at("link_class").get<std::string>() == "intra_orbit"
                       ? LinkClass::intra_orbit
                       : LinkClass::inter_orbit;
    l.sigma_theta_rad = j.at("sigma_theta_rad").get<double>();
    return l;
}

}  // namespace

std::string snapshot_to_json(const ConstellationSnapshot& snap) {
    json j;
    j["epoch_tag"] = snap.epoch_tag;
    j["config"] = {{"num_planes", snap.config.num_planes},
                   {"sats_per_plane", snap.config.sats_per_plane},
                   {"altitude_m", snap.config.altitude_m},
                   {"inclination_deg", snap.config.inclination_deg},
                   {"perturbation_max_deg", snap.config.perturbation_max_deg},
                   {"earth_radius_m", snap.config.earth_radius_m},
                   {"seed", snap.config.seed}};
    json sats = json::array();
    for (const auto& s : snap.satellites) {
        sats.push_back({{"plane_index", s.plane_index},
                        {"slot_index", s.slot_index},
                        {"position_m", s.position_m}});
    }
    j["satellites"] = std::move(sats);
    return j.dump(2) + "\n";
}

ConstellationSnapshot snapshot_from_json(const std::string& text) {
    const json j = json::parse(text);
    ConstellationSnapshot snap;
    snap.epoch_tag = j.at("epoch_tag").get<std::string>();
    const auto& c = j.at("config");
    snap.config.num_planes = c.at("num_planes").get<int>();
    snap.config.sats_per_plane = c.at("sats_per_plane").get<int>();
    snap.config.altitude_m = c.at("altitude_m").get<double>();
    snap.config.inclination_deg = c.at("inclination_deg").get<double>();
    snap.config.perturbation_max_deg = c.at("perturbation_max_deg").get<double>();
    snap.config.earth_radius_m = c.at("earth_radius_m").get<double>();
    snap.config.seed = c.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("satellites")) {
        Satellite sat;
        sat.plane_index = s.at("plane_index").get<int>();
        sat.slot_index = s.at("slot_index").get<int>();
        sat.position_m = s.at("position_m").get<Vec3>();
        snap.satellites.push_back(sat);
    }
    return snap;
}

std::string route_to_json(const RoutePath& path) {
    json j;
    j["node_sequence"] = path.node_sequence;
    json links = json::array();
    for (const auto& l : path.links) links.push_back(link_to_json(l));
    j["links"] = std::move(links);
    j["total_length_m"] = path.total_length_m;
    j["relay_count"] = path.relay_count;
    return j.dump(2) + "\n";
}

RoutePath route_from_json(const std::string& text) {
    const json j = json::parse(text);
    RoutePath p;
    p.node_sequence = j.at("node_sequence").get<std::vector<int>>();
    for (const auto& l : j.at("links")) p.links.push_back(link_from_json(l));
    p.total_length_m = j.at("total_length_m").get<double>();
    p.relay_count = j.at("relay_count").get<int>();
    return p;
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

std::string load_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace ohl
