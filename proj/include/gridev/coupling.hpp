#pragma once

#include <cmath>
#include <map>

#include "gridev/charging.hpp"
#include "gridev/grid_case.hpp"
#include "gridev/opf.hpp"

namespace gridev {

/// Total mapping of transport nodes onto substation buses.
struct ServiceAreaMap {
    std::map<int, int> substation_by_node;

    int substation_of(int node) const {
        auto it = substation_by_node.find(node);
        if (it == substation_by_node.end())
            throw ValidationError("transport node " + std::to_string(node) +
                                  " is not mapped to any substation");
        return it->second;
    }
};

namespace coupling_detail {

// Equirectangular approximation; fine at regional (sub-200 km) extents.
inline double distance_sq_deg(double lat1, double lon1, double lat2, double lon2) {
    const double mean_lat = 0.5 * (lat1 + lat2) * 3.141592653589793 / 180.0;
    const double dx = (lon2 - lon1) * std::cos(mean_lat);
    const double dy = lat2 - lat1;
    return dx * dx + dy * dy;
}

} // namespace coupling_detail

/// Assigns every transport node to its geodesically nearest substation bus;
/// exact ties go to the lower bus id.
inline ServiceAreaMap build_service_areas(const GridCase& c,
                                          const std::map<int, std::pair<double, double>>& node_coords) {
    bool any_substation = false;
    for (const auto& b : c.buses) any_substation |= b.is_substation;
    if (!any_substation)
        throw ValidationError("case '" + c.label + "' has no substation buses");

    ServiceAreaMap out;
    for (const auto& [node, ll] : node_coords) {
        if (!std::isfinite(ll.first) || !std::isfinite(ll.second))
            throw ValidationError("node " + std::to_string(node) + ": non-finite coordinates");
        int best = -1;
        double best_d = 0.0;
        for (const auto& b : c.buses) {
            if (!b.is_substation) continue;
            const double d =
                coupling_detail::distance_sq_deg(ll.first, ll.second, b.latitude, b.longitude);
            if (best < 0 || d < best_d || (d == best_d && b.id < best)) {
                best = b.id;
                best_d = d;
            }
        }
        out.substation_by_node[node] = best;
    }
    return out;
}

inline ServiceAreaMap load_service_area_csv(const std::string& path, const GridCase& c) {
    auto t = read_csv(path);
    const int c_node = t.column("node_id", path);
    const int c_bus = t.column("bus_id", path);
    ServiceAreaMap out;
    for (const auto& r : t.rows) {
        const int node = static_cast<int>(parse_int(r[c_node], path + " node_id"));
        const int bus = static_cast<int>(parse_int(r[c_bus], path + " bus_id"));
        const Bus* b = c.find_bus(bus);
        if (!b) throw ValidationError(path + ": node " + std::to_string(node) +
                                      " mapped to missing bus " + std::to_string(bus));
        if (!b->is_substation)
            throw ValidationError(path + ": node " + std::to_string(node) + " mapped to bus " +
                                  std::to_string(bus) + " which is not a substation");
        out.substation_by_node[node] = bus;
    }
    return out;
}

/// Folds a node-level charging profile onto substations as average MW.
inline std::map<std::pair<int, int>, double> aggregate_ev_load(const NodeChargingProfile& profile,
                                                               const ServiceAreaMap& areas) {
    std::map<std::pair<int, int>, double> out;  // (bus, hour) -> MW
    for (const auto& [key, energy_kwh] : profile.kwh) {
        const int bus = areas.substation_of(key.first);
        out[{bus, key.second}] += energy_kwh / 1000.0;
    }
    return out;
}

/// Static load plus EV load, per bus per hour, for the whole day.
inline std::vector<HourlyDemand> superpose_demand(const GridCase& c,
                                                  const std::map<std::pair<int, int>, double>& ev_load) {
    for (const auto& [key, mw] : ev_load) {
        if (!c.find_bus(key.first))
            throw ValidationError("EV load references missing bus " + std::to_string(key.first));
        if (!(mw >= 0.0))
            throw ValidationError("negative EV load at bus " + std::to_string(key.first));
    }
    std::vector<HourlyDemand> out(kHoursPerDay);
    for (int h = 0; h < kHoursPerDay; ++h) {
        out[h].hour = h;
        for (const auto& b : c.buses) out[h].load_mw_by_bus[b.id] = c.static_load_mw(b.id, h);
    }
    for (const auto& [key, mw] : ev_load) out[key.second].load_mw_by_bus[key.first] += mw;
    return out;
}

} // namespace gridev
