#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "gridev/transport.hpp"

namespace gridev {

struct SynthTripOptions {
    double median_daily_miles = 30.0;
    double sigma_log = 0.5;        // lognormal spread of daily distance
    double hdv_share = 0.08;
    double min_daily_miles = 4.0;
    double max_daily_miles = 80.0; // keeps every tour within one battery + top-ups
    double max_trip_miles = 45.0;
    int target_trips = 0;          // when > 0, emit exactly this many trips
};

namespace detail {

// One home-based tour: leaves home in the morning, runs errand trips through
// the day, and returns home on an evening trip. Departures are budgeted so no
// generated trip crosses midnight (the formats allow it; the fleet avoids it).
// All draws hash off (seed, vehicle) so output is order-independent.
inline std::vector<TripRecord> synth_vehicle_tour(long long vehicle_id, int n_nodes,
                                                  std::uint64_t seed, const SynthTripOptions& o,
                                                  int n_trips) {
    SplitMix64 rng(hash_mix(hash_mix(seed, 0x7217), static_cast<std::uint64_t>(vehicle_id)));
    const bool hdv = rng.uniform01() < o.hdv_share;
    const int home = static_cast<int>(rng.uniform_int(0, n_nodes - 1));

    double daily = rng.lognormal(o.median_daily_miles * (hdv ? 1.5 : 1.0), o.sigma_log);
    daily = std::clamp(daily, o.min_daily_miles, o.max_daily_miles);

    std::vector<double> weights(n_trips);
    double wsum = 0.0;
    for (double& w : weights) {
        w = 0.5 + rng.uniform01();
        wsum += w;
    }
    std::vector<double> dist(n_trips);
    for (int i = 0; i < n_trips; ++i)
        dist[i] = std::clamp(daily * weights[i] / wsum, 0.5, o.max_trip_miles);

    std::vector<int> dests(n_trips);
    for (int i = 0; i + 1 < n_trips; ++i) dests[i] = static_cast<int>(rng.uniform_int(0, n_nodes - 1));
    dests[n_trips - 1] = home;

    std::vector<TripRecord> out;
    double clock_min = rng.uniform(390.0, 570.0);  // first departure 06:30-09:30
    int prev_node = home;
    long long link_counter = vehicle_id * 100;
    for (int i = 0; i < n_trips; ++i) {
        if (i == n_trips - 1) {
            // homebound leg departs in the evening; cap keeps the tour inside the day
            clock_min = std::min(std::max(clock_min, rng.uniform(1020.0, 1320.0)), 1320.0);
        } else if (i > 0) {
            clock_min = std::min(clock_min + rng.uniform(45.0, 120.0), 960.0);
        }

        TripRecord t;
        t.trip_id = vehicle_id * 10 + i;
        t.vehicle_id = vehicle_id;
        t.vehicle_class = hdv ? VehicleClass::HDV : VehicleClass::LDV;
        t.ends_at_home = (i == n_trips - 1);

        const int n_links = 1 + static_cast<int>(rng.uniform_int(0, 2));
        double remaining = dist[i];
        int node = prev_node;
        for (int l = 0; l < n_links; ++l) {
            LinkTraversal link;
            link.link_id = ++link_counter;
            link.node_from = node;
            node = (l == n_links - 1) ? dests[i] : static_cast<int>(rng.uniform_int(0, n_nodes - 1));
            link.node_to = node;
            double len = (l == n_links - 1) ? remaining : remaining * rng.uniform(0.2, 0.5);
            len = std::max(len, 0.1);
            remaining = std::max(remaining - len, 0.0);
            link.length_miles = len;
            link.avg_speed_mph = 5.0 * std::floor(rng.uniform(5.0, 13.0)) + 2.5;  // 25-65 mph
            link.enter_time_min = clock_min;
            clock_min += 60.0 * link.length_miles / link.avg_speed_mph;
            t.links.push_back(link);
        }
        t.end_node = dests[i];
        t.validate();
        out.push_back(std::move(t));
        prev_node = dests[i];
        clock_min += 30.0;  // minimum dwell
    }
    return out;
}

} // namespace detail

/// Deterministic synthetic daily tours. Every vehicle leaves home, makes 2-4
/// trips, and returns home on the last one; daily distance is lognormal with
/// the configured median.
inline std::vector<TripRecord> generate_synthetic_trips(int n_vehicles, int n_nodes,
                                                        std::uint64_t seed,
                                                        const SynthTripOptions& opts = {}) {
    if (n_vehicles < 1 || n_nodes < 1)
        throw ValidationError("generate_synthetic_trips: counts must be >= 1");
    std::vector<TripRecord> out;
    if (opts.target_trips > 0) {
        if (opts.target_trips < 2)
            throw ValidationError("generate_synthetic_trips: target_trips must be >= 2");
        int remaining = opts.target_trips;
        long long vid = 0;
        while (remaining >= 2) {
            ++vid;
            int n_trips = 2 + static_cast<int>(hash_mix(seed, 0xc0u + vid) % 3);  // 2..4
            n_trips = std::min(n_trips, remaining);
            if (remaining - n_trips == 1) --n_trips;
            auto tour = detail::synth_vehicle_tour(vid, n_nodes, seed, opts, n_trips);
            remaining -= n_trips;
            for (auto& t : tour) out.push_back(std::move(t));
        }
    } else {
        for (long long vid = 1; vid <= n_vehicles; ++vid) {
            int n_trips = 2 + static_cast<int>(hash_mix(seed, 0xc0u + vid) % 3);
            auto tour = detail::synth_vehicle_tour(vid, n_nodes, seed, opts, n_trips);
            for (auto& t : tour) out.push_back(std::move(t));
        }
    }
    return out;
}

/// Coordinates for synthetic transport nodes: jittered grid over a regional
/// bounding box.
inline std::map<int, std::pair<double, double>> synthetic_node_coords(int n_nodes,
                                                                      std::uint64_t seed) {
    std::map<int, std::pair<double, double>> out;
    const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_nodes)))));
    for (int i = 0; i < n_nodes; ++i) {
        SplitMix64 rng(hash_mix(hash_mix(seed, 0x20de), static_cast<std::uint64_t>(i)));
        double lat = 30.15 + 0.3 * (i / cols) / std::max(1, cols - 1) + rng.uniform(-0.01, 0.01);
        double lon = -97.95 + 0.4 * (i % cols) / std::max(1, cols - 1) + rng.uniform(-0.01, 0.01);
        out[i] = {lat, lon};
    }
    return out;
}

inline void write_node_coords_csv(const std::map<int, std::pair<double, double>>& coords,
                                  const std::string& path) {
    CsvWriter w(path);
    w.row({"node_id", "lat", "lon"});
    for (const auto& [node, ll] : coords)
        w.row({std::to_string(node), fmt_double(ll.first), fmt_double(ll.second)});
    w.close();
}

inline std::map<int, std::pair<double, double>> load_node_coords_csv(const std::string& path) {
    auto t = read_csv(path);
    const int c_node = t.column("node_id", path);
    const int c_lat = t.column("lat", path);
    const int c_lon = t.column("lon", path);
    std::map<int, std::pair<double, double>> out;
    for (const auto& r : t.rows)
        out[static_cast<int>(parse_int(r[c_node], path + " node_id"))] = {
            parse_double(r[c_lat], path + " lat"), parse_double(r[c_lon], path + " lon")};
    return out;
}

} // namespace gridev
