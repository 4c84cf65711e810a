#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gridev/csv.hpp"
#include "gridev/rng.hpp"

namespace gridev {

enum class VehicleClass { LDV, HDV };

inline const char* to_string(VehicleClass c) { return c == VehicleClass::LDV ? "LDV" : "HDV"; }

inline VehicleClass vehicle_class_from_string(const std::string& s) {
    if (s == "LDV") return VehicleClass::LDV;
    if (s == "HDV") return VehicleClass::HDV;
    throw ParseError("unknown vehicle_class '" + s + "'");
}

struct LinkTraversal {
    long long link_id = 0;
    int node_from = 0;
    int node_to = 0;
    double length_miles = 0.0;
    double avg_speed_mph = 0.0;
    double enter_time_min = 0.0;  // minutes from midnight

    bool operator==(const LinkTraversal&) const = default;
};

struct TripRecord {
    long long trip_id = 0;
    long long vehicle_id = 0;
    VehicleClass vehicle_class = VehicleClass::LDV;
    std::vector<LinkTraversal> links;
    int end_node = 0;
    bool ends_at_home = false;

    bool operator==(const TripRecord&) const = default;

    double distance_miles() const {
        double d = 0.0;
        for (const auto& l : links) d += l.length_miles;
        return d;
    }
    double duration_hours() const {
        double t = 0.0;
        for (const auto& l : links) t += l.length_miles / l.avg_speed_mph;
        return t;
    }
    double start_time_min() const { return links.front().enter_time_min; }
    double end_time_min() const {
        const auto& last = links.back();
        return last.enter_time_min + 60.0 * last.length_miles / last.avg_speed_mph;
    }
    int end_hour() const {
        return static_cast<int>(end_time_min() / 60.0) % kHoursPerDay;
    }

    void validate() const {
        const std::string who = "trip " + std::to_string(trip_id);
        if (links.empty()) throw ValidationError(who + ": no links");
        for (std::size_t i = 0; i < links.size(); ++i) {
            const auto& l = links[i];
            if (!(l.length_miles > 0.0)) throw ValidationError(who + ": non-positive link length");
            if (!(l.avg_speed_mph > 0.0 && l.avg_speed_mph <= 90.0))
                throw ValidationError(who + ": link speed outside (0,90] mph");
            if (!(l.enter_time_min >= 0.0 && l.enter_time_min < 1440.0))
                throw ValidationError(who + ": enter_time_min outside [0,1440)");
            if (i > 0 && links[i - 1].node_to != l.node_from)
                throw ValidationError(who + ": disconnected link sequence at position " +
                                      std::to_string(i));
        }
        if (end_node != links.back().node_to)
            throw ValidationError(who + ": end_node does not match final link");
    }
};

enum class RangeClass { R100, R200, R300 };

inline constexpr std::array<RangeClass, 3> kAllRangeClasses = {RangeClass::R100, RangeClass::R200,
                                                               RangeClass::R300};

inline const char* to_string(RangeClass r) {
    switch (r) {
        case RangeClass::R100: return "R100";
        case RangeClass::R200: return "R200";
        case RangeClass::R300: return "R300";
    }
    return "R300";
}

inline RangeClass range_class_from_string(const std::string& s) {
    for (RangeClass r : kAllRangeClasses)
        if (s == to_string(r)) return r;
    throw ParseError("unknown range_class '" + s + "'");
}

inline double nominal_range_miles(RangeClass r) {
    switch (r) {
        case RangeClass::R100: return 100.0;
        case RangeClass::R200: return 200.0;
        case RangeClass::R300: return 300.0;
    }
    return 300.0;
}

/// Battery sizes and fleet shares per range class. Shares may sum below one;
/// assign_evs renormalizes proportionally.
struct RangeConfig {
    std::map<RangeClass, double> battery_kwh{
        {RangeClass::R100, 24.0}, {RangeClass::R200, 60.0}, {RangeClass::R300, 90.0}};
    std::map<RangeClass, double> shares{
        {RangeClass::R100, 0.25}, {RangeClass::R200, 0.13}, {RangeClass::R300, 0.52}};

    void validate() const {
        double prev = 0.0;
        for (RangeClass r : kAllRangeClasses) {
            double cap = battery_kwh.at(r);
            if (!(cap > prev))
                throw ValidationError("battery capacities must strictly increase across classes");
            prev = cap;
        }
        for (const auto& [r, s] : shares)
            if (s < 0.0) throw ValidationError("negative range share for " + std::string(to_string(r)));
    }
};

/// kWh-per-mile by range class and 5 mph speed bin (0-90 mph), plus the
/// hot-weather auxiliary AC draw.
struct EnergyRateTable {
    static constexpr int kBinWidth = 5;
    static constexpr int kNumBins = 18;

    std::array<std::array<double, kNumBins>, 3> kwh_per_mile{};
    std::array<std::array<bool, kNumBins>, 3> covered{};
    double ac_aux_kw = 3.0;

    static int bin_of(double speed_mph) {
        return std::min(kNumBins - 1, static_cast<int>(speed_mph / kBinWidth));
    }

    double rate(RangeClass cls, double speed_mph) const {
        if (!(speed_mph > 0.0 && speed_mph <= 90.0))
            throw ValidationError("speed " + fmt_double(speed_mph) + " mph outside table coverage");
        const int bin = bin_of(speed_mph);
        const int ci = static_cast<int>(cls);
        if (!covered[ci][bin])
            throw ValidationError("energy rate table: no rate for " + std::string(to_string(cls)) +
                                  " at speed bin " + std::to_string(bin * kBinWidth) + " mph");
        return kwh_per_mile[ci][bin];
    }

    void set(RangeClass cls, int bin_low_mph, double rate_kwh_per_mile) {
        if (bin_low_mph % kBinWidth != 0 || bin_low_mph < 0 || bin_low_mph >= kNumBins * kBinWidth)
            throw ValidationError("energy rate table: bad speed bin " + std::to_string(bin_low_mph));
        if (!(rate_kwh_per_mile > 0.0))
            throw ValidationError("energy rate table: rates must be positive");
        kwh_per_mile[static_cast<int>(cls)][bin_low_mph / kBinWidth] = rate_kwh_per_mile;
        covered[static_cast<int>(cls)][bin_low_mph / kBinWidth] = true;
    }

    void require_full_coverage() const {
        for (RangeClass cls : kAllRangeClasses)
            for (int b = 0; b < kNumBins; ++b)
                if (!covered[static_cast<int>(cls)][b])
                    throw ValidationError("energy rate table: missing bin " +
                                          std::to_string(b * kBinWidth) + " mph for " +
                                          to_string(cls));
    }
};

inline EnergyRateTable load_energy_rates_csv(const std::string& path, double ac_aux_kw = 3.0) {
    auto t = read_csv(path);
    const int c_cls = t.column("range_class", path);
    const int c_bin = t.column("speed_bin_low_mph", path);
    const int c_rate = t.column("kwh_per_mile", path);
    EnergyRateTable out;
    out.ac_aux_kw = ac_aux_kw;
    for (const auto& row : t.rows)
        out.set(range_class_from_string(row[c_cls]),
                static_cast<int>(parse_int(row[c_bin], path + " speed_bin_low_mph")),
                parse_double(row[c_rate], path + " kwh_per_mile"));
    return out;
}

inline void write_energy_rates_csv(const EnergyRateTable& t, const std::string& path) {
    CsvWriter w(path);
    w.row({"range_class", "speed_bin_low_mph", "kwh_per_mile"});
    for (RangeClass cls : kAllRangeClasses)
        for (int b = 0; b < EnergyRateTable::kNumBins; ++b)
            if (t.covered[static_cast<int>(cls)][b])
                w.row({to_string(cls), std::to_string(b * EnergyRateTable::kBinWidth),
                       fmt_double(t.kwh_per_mile[static_cast<int>(cls)][b])});
    w.close();
}

struct EvInfo {
    bool is_ev = false;
    RangeClass range_class = RangeClass::R300;
    double battery_capacity_kwh = 0.0;
};

struct EvAssignment {
    std::map<long long, EvInfo> by_vehicle;
    double penetration = 0.0;
    std::uint64_t seed = 0;

    bool is_ev(long long vehicle_id) const {
        auto it = by_vehicle.find(vehicle_id);
        return it != by_vehicle.end() && it->second.is_ev;
    }
    const EvInfo& info(long long vehicle_id) const { return by_vehicle.at(vehicle_id); }
};

// ---------------------------------------------------------------------------
// trips CSV

inline std::vector<TripRecord> parse_trips(const std::string& path) {
    auto t = read_csv(path);
    const int c_trip = t.column("trip_id", path);
    const int c_veh = t.column("vehicle_id", path);
    const int c_cls = t.column("vehicle_class", path);
    const int c_seq = t.column("link_seq", path);
    const int c_link = t.column("link_id", path);
    const int c_from = t.column("node_from", path);
    const int c_to = t.column("node_to", path);
    const int c_len = t.column("length_miles", path);
    const int c_speed = t.column("avg_speed_mph", path);
    const int c_enter = t.column("enter_time_min", path);
    const int c_home = t.column("ends_at_home", path);

    struct Row {
        long long seq;
        LinkTraversal link;
    };
    std::map<long long, TripRecord> by_trip;
    std::map<long long, std::vector<Row>> rows_of;
    for (const auto& r : t.rows) {
        long long tid = parse_int(r[c_trip], path + " trip_id");
        TripRecord& rec = by_trip[tid];
        long long vid = parse_int(r[c_veh], path + " vehicle_id");
        VehicleClass cls = vehicle_class_from_string(r[c_cls]);
        bool home = (r[c_home] == "true" || r[c_home] == "1");
        if (rec.links.empty() && rows_of[tid].empty()) {
            rec.trip_id = tid;
            rec.vehicle_id = vid;
            rec.vehicle_class = cls;
            rec.ends_at_home = home;
        } else if (rec.vehicle_id != vid || rec.vehicle_class != cls || rec.ends_at_home != home) {
            throw ParseError(path + ": trip " + std::to_string(tid) +
                             " has inconsistent vehicle fields across rows");
        }
        Row row;
        row.seq = parse_int(r[c_seq], path + " link_seq");
        row.link.link_id = parse_int(r[c_link], path + " link_id");
        row.link.node_from = static_cast<int>(parse_int(r[c_from], path + " node_from"));
        row.link.node_to = static_cast<int>(parse_int(r[c_to], path + " node_to"));
        row.link.length_miles = parse_double(r[c_len], path + " length_miles");
        row.link.avg_speed_mph = parse_double(r[c_speed], path + " avg_speed_mph");
        row.link.enter_time_min = parse_double(r[c_enter], path + " enter_time_min");
        rows_of[tid].push_back(row);
    }

    std::vector<TripRecord> out;
    for (auto& [tid, rec] : by_trip) {
        auto& rows = rows_of[tid];
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.seq < b.seq; });
        for (auto& r : rows) rec.links.push_back(r.link);
        rec.end_node = rec.links.back().node_to;
        rec.validate();
        out.push_back(std::move(rec));
    }
    std::sort(out.begin(), out.end(), [](const TripRecord& a, const TripRecord& b) {
        if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
        if (a.start_time_min() != b.start_time_min()) return a.start_time_min() < b.start_time_min();
        return a.trip_id < b.trip_id;
    });
    return out;
}

inline void write_trips_csv(const std::vector<TripRecord>& trips, const std::string& path) {
    CsvWriter w(path);
    w.row({"trip_id", "vehicle_id", "vehicle_class", "link_seq", "link_id", "node_from", "node_to",
           "length_miles", "avg_speed_mph", "enter_time_min", "ends_at_home"});
    for (const auto& t : trips)
        for (std::size_t i = 0; i < t.links.size(); ++i) {
            const auto& l = t.links[i];
            w.row({std::to_string(t.trip_id), std::to_string(t.vehicle_id),
                   to_string(t.vehicle_class), std::to_string(i), std::to_string(l.link_id),
                   std::to_string(l.node_from), std::to_string(l.node_to), fmt_double(l.length_miles),
                   fmt_double(l.avg_speed_mph), fmt_double(l.enter_time_min),
                   t.ends_at_home ? "true" : "false"});
        }
    w.close();
}

inline std::map<long long, std::vector<const TripRecord*>> group_trips_by_vehicle(
    const std::vector<TripRecord>& trips) {
    std::map<long long, std::vector<const TripRecord*>> out;
    for (const auto& t : trips) out[t.vehicle_id].push_back(&t);
    for (auto& [vid, list] : out)
        std::sort(list.begin(), list.end(), [](const TripRecord* a, const TripRecord* b) {
            if (a->start_time_min() != b->start_time_min())
                return a->start_time_min() < b->start_time_min();
            return a->trip_id < b->trip_id;
        });
    return out;
}

// ---------------------------------------------------------------------------
// EV assignment

/// Marks round(penetration * |LDV fleet|) vehicles as EVs using one uniform
/// draw per vehicle: the k lowest draws win, so the EV set grows monotonically
/// with penetration and the count is exact to rounding. Range classes are
/// sampled independently of tour length.
inline EvAssignment assign_evs(const std::vector<TripRecord>& trips, double penetration,
                               const RangeConfig& ranges, std::uint64_t seed) {
    if (!(penetration >= 0.0 && penetration <= 1.0))
        throw ValidationError("penetration must lie in [0,1]");
    ranges.validate();

    std::map<long long, VehicleClass> fleet;
    for (const auto& t : trips) {
        auto [it, inserted] = fleet.emplace(t.vehicle_id, t.vehicle_class);
        if (!inserted && it->second != t.vehicle_class)
            throw ValidationError("vehicle " + std::to_string(t.vehicle_id) +
                                  " has trips with mixed vehicle classes");
    }

    std::vector<long long> ldv;
    for (const auto& [vid, cls] : fleet)
        if (cls == VehicleClass::LDV) ldv.push_back(vid);

    double share_sum = 0.0;
    for (const auto& [r, s] : ranges.shares) share_sum += s;
    if (share_sum <= 0.0 && penetration > 0.0 && !ldv.empty())
        throw ValidationError("range shares sum to zero");

    const auto k = static_cast<std::size_t>(
        std::llround(penetration * static_cast<double>(ldv.size())));
    std::vector<std::pair<double, long long>> draws;
    draws.reserve(ldv.size());
    for (long long vid : ldv)
        draws.emplace_back(hash_uniform01(seed, 1, static_cast<std::uint64_t>(vid)), vid);
    std::sort(draws.begin(), draws.end());

    EvAssignment out;
    out.penetration = penetration;
    out.seed = seed;
    for (const auto& [vid, cls] : fleet) out.by_vehicle[vid] = EvInfo{};

    for (std::size_t i = 0; i < k && i < draws.size(); ++i) {
        const long long vid = draws[i].second;
        const double u = hash_uniform01(seed, 2, static_cast<std::uint64_t>(vid)) * share_sum;
        double cum = 0.0;
        RangeClass cls = RangeClass::R300;
        for (RangeClass r : kAllRangeClasses) {
            auto it = ranges.shares.find(r);
            cum += (it != ranges.shares.end()) ? it->second : 0.0;
            if (u < cum) {
                cls = r;
                break;
            }
        }
        out.by_vehicle[vid] = EvInfo{true, cls, ranges.battery_kwh.at(cls)};
    }
    return out;
}

/// Per-trip electrical energy: link miles times the speed-binned rate, plus
/// the AC auxiliary draw over the drive time when hot.
inline double trip_energy(const TripRecord& trip, RangeClass cls, const EnergyRateTable& rates,
                          bool hot_weather) {
    double kwh = 0.0;
    for (const auto& l : trip.links) kwh += l.length_miles * rates.rate(cls, l.avg_speed_mph);
    if (hot_weather) kwh += rates.ac_aux_kw * trip.duration_hours();
    return kwh;
}

} // namespace gridev
