#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "gridev/transport.hpp"

namespace gridev {

struct ChargingEvent {
    long long vehicle_id = 0;
    int node = 0;
    int start_hour = 0;
    double energy_kwh = 0.0;
    double charger_power_kw = 0.0;
};

struct NodeChargingProfile {
    std::map<std::pair<int, int>, double> kwh;  // (node, hour) -> kWh

    void add(int node, int hour, double energy_kwh) {
        if (energy_kwh == 0.0) return;
        kwh[{node, hour}] += energy_kwh;
    }
    double total_kwh() const {
        double t = 0.0;
        for (const auto& [k, v] : kwh) t += v;
        return t;
    }
    double at(int node, int hour) const {
        auto it = kwh.find({node, hour});
        return it == kwh.end() ? 0.0 : it->second;
    }
};

struct BehaviorParams {
    double anxiety_low_miles = 20.0;
    double anxiety_high_miles = 60.0;
    double home_charger_kw = 7.2;
    double public_charger_kw = 50.0;
    int peak_start_hour = 14;     // [peak_start, peak_end)
    int peak_end_hour = 20;
    int offpeak_start_hour = 22;  // [offpeak_start, offpeak_end), wrapping midnight
    int offpeak_end_hour = 4;

    void validate() const {
        if (!(home_charger_kw > 0.0) || !(public_charger_kw > 0.0))
            throw ValidationError("charger powers must be positive");
        if (!(anxiety_low_miles >= 0.0) || !(anxiety_low_miles < anxiety_high_miles))
            throw ValidationError("anxiety threshold range must satisfy 0 <= low < high");
        for (int h : {peak_start_hour, peak_end_hour, offpeak_start_hour, offpeak_end_hour})
            if (h < 0 || h >= kHoursPerDay) throw ValidationError("window hour outside 0-23");
        if (peak_start_hour == peak_end_hour || offpeak_start_hour == offpeak_end_hour)
            throw ValidationError("empty charging window");
    }

    bool in_peak(int hour) const {
        if (peak_start_hour < peak_end_hour)
            return hour >= peak_start_hour && hour < peak_end_hour;
        return hour >= peak_start_hour || hour < peak_end_hour;
    }

    std::vector<int> offpeak_hours() const {
        std::vector<int> out;
        for (int h = offpeak_start_hour; h != offpeak_end_hour; h = (h + 1) % kHoursPerDay)
            out.push_back(h);
        return out;
    }
};

namespace charging_detail {

inline void require_assignment_covers(const std::vector<TripRecord>& trips,
                                      const EvAssignment& assignment) {
    for (const auto& t : trips)
        if (!assignment.by_vehicle.count(t.vehicle_id))
            throw ValidationError("assignment does not cover vehicle " +
                                  std::to_string(t.vehicle_id));
}

// Deliver `energy` starting at minute-of-day `start_min` at `power_kw`,
// splitting across hour buckets (wrapping past midnight onto the same
// canonical day). The final bucket absorbs the exact remainder.
inline void spread_session(NodeChargingProfile& profile, int node, double start_min, double energy,
                           double power_kw) {
    double t = start_min;
    double remaining = energy;
    while (remaining > 0.0) {
        const int hour = static_cast<int>(t / 60.0) % kHoursPerDay;
        const double minutes_left = 60.0 - std::fmod(t, 60.0);
        const double chunk = std::min(remaining, power_kw * minutes_left / 60.0);
        profile.add(node, hour, chunk);
        remaining -= chunk;
        t += minutes_left;
    }
}

} // namespace charging_detail

/// Trip-end strategy: each EV trip's energy is charged instantly in the hour
/// the trip ends, at its end node.
inline NodeChargingProfile trip_end_profile(const std::vector<TripRecord>& trips,
                                            const EvAssignment& assignment,
                                            const EnergyRateTable& rates, bool hot_weather) {
    charging_detail::require_assignment_covers(trips, assignment);
    NodeChargingProfile profile;
    for (const auto& t : trips) {
        if (t.vehicle_class != VehicleClass::LDV || !assignment.is_ev(t.vehicle_id)) continue;
        const EvInfo& info = assignment.info(t.vehicle_id);
        profile.add(t.end_node, t.end_hour(), trip_energy(t, info.range_class, rates, hot_weather));
    }
    return profile;
}

/// Off-peak strategy: energy landing in the peak window is postponed to the
/// off-peak hours of the same node, spread uniformly (the last off-peak hour
/// absorbs the split remainder so totals are conserved exactly).
inline NodeChargingProfile off_peak_profile(const NodeChargingProfile& trip_end,
                                            const BehaviorParams& params) {
    params.validate();
    const auto offpeak = params.offpeak_hours();
    NodeChargingProfile out;
    std::map<int, double> moved;
    for (const auto& [key, energy] : trip_end.kwh) {
        if (params.in_peak(key.second))
            moved[key.first] += energy;
        else
            out.add(key.first, key.second, energy);
    }
    const auto n = static_cast<double>(offpeak.size());
    for (const auto& [node, total] : moved) {
        const double share = total / n;
        double rest = total;
        for (std::size_t i = 0; i + 1 < offpeak.size(); ++i) {
            out.add(node, offpeak[i], share);
            rest -= share;
        }
        out.add(node, offpeak.back(), rest);
    }
    return out;
}

/// Range-anxiety behavior: simulate each EV's battery over its daily tour.
/// A public top-up fires when remaining energy falls below the anxiety
/// threshold plus the next trip's needs; after the last trip the battery is
/// recharged to full at home-charger power from the arrival time onward.
inline std::vector<ChargingEvent> simulate_most_likely_events(
    const std::vector<TripRecord>& trips, const EvAssignment& assignment,
    const EnergyRateTable& rates, const BehaviorParams& params, bool hot_weather,
    std::uint64_t seed, NodeChargingProfile* profile_out = nullptr) {
    params.validate();
    charging_detail::require_assignment_covers(trips, assignment);

    std::vector<ChargingEvent> events;
    NodeChargingProfile profile;
    std::vector<long long> infeasible;

    auto by_vehicle = group_trips_by_vehicle(trips);
    for (const auto& [vid, tour] : by_vehicle) {
        const EvInfo& info = assignment.by_vehicle.at(vid);
        if (!info.is_ev || tour.front()->vehicle_class != VehicleClass::LDV) continue;

        const double cap = info.battery_capacity_kwh;
        const double nominal_rate = cap / nominal_range_miles(info.range_class);
        const double threshold_kwh =
            nominal_rate * (params.anxiety_low_miles +
                            (params.anxiety_high_miles - params.anxiety_low_miles) *
                                hash_uniform01(seed, 3, static_cast<std::uint64_t>(vid)));

        std::vector<double> energy(tour.size());
        bool ok = true;
        for (std::size_t i = 0; i < tour.size(); ++i) {
            energy[i] = trip_energy(*tour[i], info.range_class, rates, hot_weather);
            if (energy[i] > cap + 1e-9) ok = false;
        }
        if (!ok) {
            infeasible.push_back(vid);
            continue;
        }

        double soc = cap;
        for (std::size_t i = 0; i < tour.size(); ++i) {
            soc -= energy[i];
            const TripRecord& t = *tour[i];
            if (i + 1 < tour.size()) {
                if (soc < threshold_kwh + energy[i + 1]) {
                    const double target = std::min(cap, threshold_kwh + energy[i + 1]);
                    const double amount = target - soc;
                    if (amount > 0.0) {
                        events.push_back({vid, t.end_node, t.end_hour(), amount,
                                          params.public_charger_kw});
                        charging_detail::spread_session(profile, t.end_node, t.end_time_min(),
                                                        amount, params.public_charger_kw);
                        soc = target;
                    }
                }
            } else {
                const double amount = cap - soc;
                if (amount > 0.0) {
                    events.push_back({vid, t.end_node, t.end_hour(), amount, params.home_charger_kw});
                    charging_detail::spread_session(profile, t.end_node, t.end_time_min(), amount,
                                                    params.home_charger_kw);
                    soc = cap;
                }
            }
        }
    }

    if (!infeasible.empty()) {
        std::string msg = "trips exceed battery capacity for vehicle(s):";
        for (long long vid : infeasible) msg += " " + std::to_string(vid);
        throw ValidationError(msg);
    }
    if (profile_out) *profile_out = std::move(profile);
    return events;
}

inline NodeChargingProfile most_likely_profile(const std::vector<TripRecord>& trips,
                                               const EvAssignment& assignment,
                                               const EnergyRateTable& rates,
                                               const BehaviorParams& params, bool hot_weather,
                                               std::uint64_t seed) {
    NodeChargingProfile profile;
    simulate_most_likely_events(trips, assignment, rates, params, hot_weather, seed, &profile);
    return profile;
}

/// kWh delivered within an hour bucket, as average MW over that hour.
inline std::map<std::pair<int, int>, double> profile_to_mw(const NodeChargingProfile& profile) {
    std::map<std::pair<int, int>, double> out;
    for (const auto& [key, energy] : profile.kwh) out[key] = energy / 1000.0;
    return out;
}

inline void write_profile_csv(const NodeChargingProfile& profile, const std::string& path) {
    CsvWriter w(path);
    w.row({"node", "hour", "kwh"});
    for (const auto& [key, energy] : profile.kwh)
        w.row({std::to_string(key.first), std::to_string(key.second), fmt_double(energy)});
    w.close();
}

inline NodeChargingProfile read_profile_csv(const std::string& path) {
    auto t = read_csv(path);
    const int c_node = t.column("node", path);
    const int c_hour = t.column("hour", path);
    const int c_kwh = t.column("kwh", path);
    NodeChargingProfile out;
    for (const auto& r : t.rows)
        out.add(static_cast<int>(parse_int(r[c_node], path + " node")),
                static_cast<int>(parse_int(r[c_hour], path + " hour")),
                parse_double(r[c_kwh], path + " kwh"));
    return out;
}

enum class Strategy { trip_end, off_peak, most_likely };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::trip_end: return "trip-end";
        case Strategy::off_peak: return "off-peak";
        case Strategy::most_likely: return "most-likely";
    }
    return "trip-end";
}

inline Strategy strategy_from_string(const std::string& s) {
    if (s == "trip-end") return Strategy::trip_end;
    if (s == "off-peak") return Strategy::off_peak;
    if (s == "most-likely") return Strategy::most_likely;
    throw ParseError("unknown charging strategy '" + s + "' (expected trip-end | off-peak | most-likely)");
}

/// Dispatches on strategy name; the off-peak profile is derived from trip-end.
inline NodeChargingProfile charging_profile(Strategy strategy, const std::vector<TripRecord>& trips,
                                            const EvAssignment& assignment,
                                            const EnergyRateTable& rates,
                                            const BehaviorParams& params, bool hot_weather,
                                            std::uint64_t seed) {
    switch (strategy) {
        case Strategy::trip_end: return trip_end_profile(trips, assignment, rates, hot_weather);
        case Strategy::off_peak:
            return off_peak_profile(trip_end_profile(trips, assignment, rates, hot_weather), params);
        case Strategy::most_likely:
            return most_likely_profile(trips, assignment, rates, params, hot_weather, seed);
    }
    throw SimulationError("unreachable strategy");
}

} // namespace gridev
