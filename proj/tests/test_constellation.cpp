#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "ohlrelay/constellation.hpp"

using namespace ohl;

namespace {

double norm(const Vec3& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

double dist(const Vec3& a, const Vec3& b) {
    const Vec3 d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    return norm(d);
}

ConstellationSnapshot snap(std::uint64_t seed = 1) {
    ConstellationConfig cfg;
    cfg.seed = seed;
    return generate_snapshot(cfg, RngStream{seed, 1000}, "T");
}

// Exhaustive shortest simple path by depth-first search; tractable on the
// small subgraphs used below.
double brute_force_shortest(const std::vector<int>& nodes,
                            const std::vector<LinkCandidate>& links, int src,
                            int dst) {
    std::map<int, std::vector<std::pair<int, double>>> adj;
    for (const auto& l : links) {
        adj[l.from_id].push_back({l.to_id, l.length_m});
        adj[l.to_id].push_back({l.from_id, l.length_m});
    }
    std::map<int, bool> used;
    for (int n : nodes) used[n] = false;
    double best = std::numeric_limits<double>::infinity();
    std::function<void(int, double)> dfs = [&](int at, double acc) {
        if (acc >= best) return;
        if (at == dst) {
            best = acc;
            return;
        }
        used[at] = true;
        for (const auto& [to, w] : adj[at])
            if (used.count(to) && !used[to]) dfs(to, acc + w);
        used[at] = false;
    };
    dfs(src, 0.0);
    return best;
}

}  // namespace

TEST_CASE("snapshot geometry and determinism") {
    const ConstellationSnapshot a = snap();
    const ConstellationSnapshot b = snap();
    REQUIRE(a.satellites.size() == 500);
    const double r = 6371e3 + 600e3;
    for (const auto& s : a.satellites) {
        CHECK(std::fabs(norm(s.position_m) - r) < 1.0);  // circular orbit
    }
    for (std::size_t i = 0; i < a.satellites.size(); ++i) {
        CHECK(a.satellites[i].position_m == b.satellites[i].position_m);
    }
    const ConstellationSnapshot c = snap(2);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.satellites.size(); ++i)
        if (a.satellites[i].position_m != c.satellites[i].position_m)
            any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("in-plane perturbation stays within its bound") {
    ConstellationConfig cfg;
    const ConstellationSnapshot with = generate_snapshot(cfg, RngStream{1, 7});
    cfg.perturbation_max_deg = 0.0;
    const ConstellationSnapshot without = generate_snapshot(cfg, RngStream{1, 7});
    const double r = 6371e3 + 600e3;
    // Chord bound for a 1-degree in-plane shift.
    const double max_shift = 2.0 * r * std::sin(0.5 * M_PI / 180.0);
    for (std::size_t i = 0; i < with.satellites.size(); ++i) {
        const double d =
            dist(with.satellites[i].position_m, without.satellites[i].position_m);
        CHECK(d <= max_shift * (1.0 + 1e-9));
    }
}

TEST_CASE("feasible links respect class limits and Earth clearance") {
    const ConstellationSnapshot s = snap();
    const LinkLimits limits;
    const auto links = feasible_links(s, limits);
    CHECK(links.size() > 500);
    for (const auto& l : links) {
        CHECK(l.from_id < l.to_id);
        const auto& a = s.satellites[l.from_id];
        const auto& b = s.satellites[l.to_id];
        const bool same_plane = a.plane_index == b.plane_index;
        CHECK((l.link_class == LinkClass::intra_orbit) == same_plane);
        const double lim = same_plane ? limits.max_intra_orbit_m
                                      : limits.max_inter_orbit_m;
        CHECK(l.length_m <= lim);
        CHECK(l.length_m ==
              doctest::Approx(dist(a.position_m, b.position_m)).epsilon(1e-12));
        CHECK(l.sigma_theta_rad == (same_plane ? limits.sigma_theta_intra_rad
                                               : limits.sigma_theta_inter_rad));
        // Chord midpoint clearance is a lower bound on the chord-Earth gap.
        const Vec3 mid{0.5 * (a.position_m[0] + b.position_m[0]),
                       0.5 * (a.position_m[1] + b.position_m[1]),
                       0.5 * (a.position_m[2] + b.position_m[2])};
        CHECK(norm(mid) >= 6371e3 + limits.min_altitude_clearance_m - 1.0);
    }
}

TEST_CASE("corridor filter keeps endpoints' neighborhoods only") {
    const ConstellationSnapshot s = snap();
    const Vec3 src = s.satellites[0].position_m;
    const Vec3 dst = s.satellites[s.id_of(0, 12)].position_m;
    const auto cand = filter_candidates(s, src, dst, 15.0);
    CHECK(cand.size() > 10);
    CHECK(cand.size() < s.satellites.size());
}

TEST_CASE("dijkstra matches brute force on small subgraphs") {
    const ConstellationSnapshot s = snap();
    const auto all_links = feasible_links(s);
    // Twelve-node subgraphs: two adjacent planes, six slots each.
    for (int base_slot : {0, 5, 10, 17}) {
        std::vector<int> nodes;
        for (int p = 0; p < 2; ++p)
            for (int k = 0; k < 6; ++k)
                nodes.push_back(s.id_of(p, (base_slot + k) % 25));
        std::vector<LinkCandidate> sub;
        auto in_nodes = [&](int id) {
            for (int n : nodes)
                if (n == id) return true;
            return false;
        };
        for (const auto& l : all_links)
            if (in_nodes(l.from_id) && in_nodes(l.to_id)) sub.push_back(l);
        const int src = nodes.front();
        const int dst = nodes.back();
        const double ref = brute_force_shortest(nodes, sub, src, dst);
        if (!std::isfinite(ref)) continue;  // disconnected subgraph
        const RoutePath path = route(s, sub, nodes, src, dst);
        CHECK(path.total_length_m == doctest::Approx(ref).epsilon(1e-12));
        CHECK(path.node_sequence.front() == src);
        CHECK(path.node_sequence.back() == dst);
        CHECK(path.relay_count ==
              static_cast<int>(path.node_sequence.size()) - 2);
        CHECK(validate_route(s, path));
    }
}

TEST_CASE("min_e2e_pe objective prefers fewer error-prone links") {
    const ConstellationSnapshot s = snap();
    const auto all_links = feasible_links(s);
    std::vector<int> nodes;
    for (int p = 0; p < 2; ++p)
        for (int k = 0; k < 4; ++k) nodes.push_back(s.id_of(p, k));
    std::vector<LinkCandidate> sub;
    for (const auto& l : all_links) {
        bool a = false, b = false;
        for (int n : nodes) {
            if (n == l.from_id) a = true;
            if (n == l.to_id) b = true;
        }
        if (a && b) sub.push_back(l);
    }
    // Penalize inter-orbit links heavily; the pe-optimal route should not
    // cross planes more than once for a same-plane endpoint pair.
    auto pe_of = [](const LinkCandidate& l) {
        return l.link_class == LinkClass::inter_orbit ? 0.2 : 1e-6;
    };
    const RoutePath p = route(s, sub, nodes, nodes[0], nodes[3],
                              RouteObjective::min_e2e_pe, pe_of);
    int inter = 0;
    for (const auto& l : p.links)
        if (l.link_class == LinkClass::inter_orbit) ++inter;
    CHECK(inter == 0);
}

TEST_CASE("route validation catches tampering") {
    const ConstellationSnapshot s = snap();
    const auto links = feasible_links(s);
    std::vector<int> cand;
    for (int k = 0; k < 8; ++k) cand.push_back(s.id_of(0, k));
    RoutePath p = route(s, links, cand, cand.front(), cand.back());
    CHECK(validate_route(s, p));
    RoutePath bad = p;
    bad.links[0].length_m *= 1.5;
    CHECK_FALSE(validate_route(s, bad));
}

TEST_CASE("snapshot and route JSON round-trips") {
    const ConstellationSnapshot s = snap();
    const ConstellationSnapshot back = snapshot_from_json(snapshot_to_json(s));
    CHECK(back.epoch_tag == s.epoch_tag);
    REQUIRE(back.satellites.size() == s.satellites.size());
    for (std::size_t i = 0; i < s.satellites.size(); ++i) {
        CHECK(back.satellites[i].position_m == s.satellites[i].position_m);
        CHECK(back.satellites[i].plane_index == s.satellites[i].plane_index);
    }
    const auto links = feasible_links(s);
    std::vector<int> cand;
    for (int k = 0; k < 8; ++k) cand.push_back(s.id_of(0, k));
    const RoutePath p = route(s, links, cand, cand.front(), cand.back());
    const RoutePath rp = route_from_json(route_to_json(p));
    CHECK(rp.node_sequence == p.node_sequence);
    CHECK(rp.total_length_m == p.total_length_m);
    CHECK(rp.relay_count == p.relay_count);
}
