#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridev/common.hpp"

namespace gridev {

enum class FuelType { coal, natural_gas, wind, solar, nuclear, storage, other };

inline constexpr std::array<FuelType, 7> kAllFuels = {
    FuelType::coal,    FuelType::natural_gas, FuelType::wind,  FuelType::solar,
    FuelType::nuclear, FuelType::storage,     FuelType::other};

inline const char* to_string(FuelType f) {
    switch (f) {
        case FuelType::coal: return "coal";
        case FuelType::natural_gas: return "natural_gas";
        case FuelType::wind: return "wind";
        case FuelType::solar: return "solar";
        case FuelType::nuclear: return "nuclear";
        case FuelType::storage: return "storage";
        case FuelType::other: return "other";
    }
    return "other";
}

inline FuelType fuel_from_string(const std::string& s) {
    for (FuelType f : kAllFuels)
        if (s == to_string(f)) return f;
    throw ParseError("unknown fuel type '" + s + "'");
}

/// Fuels whose generation carries no combustion emissions.
inline bool is_carbon_free(FuelType f) {
    return f == FuelType::wind || f == FuelType::solar || f == FuelType::nuclear ||
           f == FuelType::storage;
}

struct Bus {
    int id = 0;
    std::string name;
    double latitude = 0.0;
    double longitude = 0.0;
    bool is_substation = false;

    bool operator==(const Bus&) const = default;
};

struct TransmissionLine {
    int from_bus = 0;
    int to_bus = 0;
    double susceptance = 0.0;    // per-unit
    double flow_limit_mw = 0.0;  // may be +inf for an unconstrained line

    bool operator==(const TransmissionLine&) const = default;
};

/// One convex piecewise-linear cost step: the marginal cost applies up to
/// breakpoint_mw (cumulative). Breakpoints strictly increase, costs never
/// decrease, and the last breakpoint must cover p_max_mw.
struct CostSegment {
    double breakpoint_mw = 0.0;
    double marginal_cost_per_mwh = 0.0;

    bool operator==(const CostSegment&) const = default;
};

struct Generator {
    int id = 0;
    int bus_id = 0;
    FuelType fuel = FuelType::other;
    double p_min_mw = 0.0;
    double p_max_mw = 0.0;
    std::vector<CostSegment> cost_curve;
    std::array<double, kHoursPerDay> availability{};  // hourly capacity factor

    bool operator==(const Generator&) const = default;
};

struct StorageUnit {
    int id = 0;
    int bus_id = 0;
    double power_limit_mw = 0.0;
    double energy_capacity_mwh = 0.0;
    double round_trip_efficiency = 1.0;  // applied on charge
    double initial_soc_mwh = 0.0;

    bool operator==(const StorageUnit&) const = default;
};

struct StaticLoadSeries {
    int bus_id = 0;
    std::array<double, kHoursPerDay> hourly_load_mw{};

    bool operator==(const StaticLoadSeries&) const = default;
};

struct GridCase {
    std::vector<Bus> buses;
    std::vector<TransmissionLine> lines;
    std::vector<Generator> generators;
    std::vector<StorageUnit> storage_units;
    std::vector<StaticLoadSeries> static_loads;
    double base_mva = 100.0;
    std::string label;

    bool operator==(const GridCase&) const = default;

    const Bus* find_bus(int id) const {
        for (const auto& b : buses)
            if (b.id == id) return &b;
        return nullptr;
    }

    double static_load_mw(int bus_id, int hour) const {
        for (const auto& s : static_loads)
            if (s.bus_id == bus_id) return s.hourly_load_mw[hour];
        return 0.0;
    }

    double total_static_load_mw(int hour) const {
        double t = 0.0;
        for (const auto& s : static_loads) t += s.hourly_load_mw[hour];
        return t;
    }

    double peak_static_load_mw() const {
        double peak = 0.0;
        for (int h = 0; h < kHoursPerDay; ++h) peak = std::max(peak, total_static_load_mw(h));
        return peak;
    }

    double total_generation_capacity_mw() const {
        double t = 0.0;
        for (const auto& g : generators) t += g.p_max_mw;
        return t;
    }

    void validate() const;
};

namespace detail {

inline void validate_generator(const GridCase& c, const Generator& g) {
    const std::string who = "generator " + std::to_string(g.id);
    if (!c.find_bus(g.bus_id))
        throw ValidationError(who + " references missing bus " + std::to_string(g.bus_id));
    if (!(g.p_min_mw >= 0.0) || !(g.p_min_mw <= g.p_max_mw))
        throw ValidationError(who + ": requires 0 <= p_min_mw <= p_max_mw");
    if (g.cost_curve.empty()) throw ValidationError(who + ": empty cost_curve");
    double prev_bp = 0.0, prev_cost = -1e300;
    for (const auto& seg : g.cost_curve) {
        if (!(seg.breakpoint_mw > prev_bp))
            throw ValidationError(who + ": cost_curve breakpoints must strictly increase");
        if (seg.marginal_cost_per_mwh < prev_cost)
            throw ValidationError(who + ": cost_curve marginal costs must be non-decreasing");
        prev_bp = seg.breakpoint_mw;
        prev_cost = seg.marginal_cost_per_mwh;
    }
    if (prev_bp + 1e-9 < g.p_max_mw)
        throw ValidationError(who + ": cost_curve does not cover p_max_mw");
    for (double a : g.availability)
        if (!(a >= 0.0 && a <= 1.0))
            throw ValidationError(who + ": availability values must lie in [0,1]");
}

inline void check_connected(const GridCase& c) {
    if (c.buses.size() <= 1) return;
    std::map<int, std::vector<int>> adj;
    for (const auto& l : c.lines) {
        adj[l.from_bus].push_back(l.to_bus);
        adj[l.to_bus].push_back(l.from_bus);
    }
    std::set<int> seen;
    std::vector<int> stack{c.buses.front().id};
    seen.insert(c.buses.front().id);
    while (!stack.empty()) {
        int b = stack.back();
        stack.pop_back();
        for (int nb : adj[b])
            if (seen.insert(nb).second) stack.push_back(nb);
    }
    if (seen.size() != c.buses.size())
        throw ValidationError("case '" + c.label + "': network is not a single connected island (" +
                              std::to_string(seen.size()) + " of " + std::to_string(c.buses.size()) +
                              " buses reachable)");
}

} // namespace detail

inline void GridCase::validate() const {
    std::set<int> bus_ids;
    for (const auto& b : buses) {
        if (!bus_ids.insert(b.id).second)
            throw ValidationError("duplicate bus id " + std::to_string(b.id));
        if (!std::isfinite(b.latitude) || !std::isfinite(b.longitude))
            throw ValidationError("bus " + std::to_string(b.id) + ": non-finite coordinates");
    }
    if (buses.empty()) throw ValidationError("case '" + label + "': no buses");
    if (!(base_mva > 0.0)) throw ValidationError("base_mva must be positive");

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const std::string who = "line " + std::to_string(i);
        if (l.from_bus == l.to_bus)
            throw ValidationError(who + ": from_bus equals to_bus (" + std::to_string(l.from_bus) + ")");
        if (!find_bus(l.from_bus))
            throw ValidationError(who + " references missing bus " + std::to_string(l.from_bus));
        if (!find_bus(l.to_bus))
            throw ValidationError(who + " references missing bus " + std::to_string(l.to_bus));
        if (!(l.susceptance > 0.0)) throw ValidationError(who + ": susceptance must be positive");
        if (!(l.flow_limit_mw > 0.0)) throw ValidationError(who + ": flow_limit_mw must be positive");
    }

    std::set<int> gen_ids;
    for (const auto& g : generators) {
        if (!gen_ids.insert(g.id).second)
            throw ValidationError("duplicate generator id " + std::to_string(g.id));
        detail::validate_generator(*this, g);
    }

    std::set<int> storage_ids;
    for (const auto& s : storage_units) {
        const std::string who = "storage " + std::to_string(s.id);
        if (!storage_ids.insert(s.id).second) throw ValidationError("duplicate storage id " + std::to_string(s.id));
        if (!find_bus(s.bus_id))
            throw ValidationError(who + " references missing bus " + std::to_string(s.bus_id));
        if (!(s.power_limit_mw > 0.0)) throw ValidationError(who + ": power_limit_mw must be positive");
        if (!(s.energy_capacity_mwh >= 0.0)) throw ValidationError(who + ": negative energy_capacity_mwh");
        if (!(s.round_trip_efficiency > 0.0 && s.round_trip_efficiency <= 1.0))
            throw ValidationError(who + ": round_trip_efficiency must lie in (0,1]");
        if (!(s.initial_soc_mwh >= 0.0 && s.initial_soc_mwh <= s.energy_capacity_mwh))
            throw ValidationError(who + ": initial_soc_mwh outside [0, energy_capacity_mwh]");
    }

    std::set<int> load_buses;
    for (const auto& s : static_loads) {
        const std::string who = "static_loads for bus " + std::to_string(s.bus_id);
        if (!find_bus(s.bus_id)) throw ValidationError(who + ": missing bus");
        if (!load_buses.insert(s.bus_id).second) throw ValidationError("duplicate " + who);
        for (double v : s.hourly_load_mw)
            if (!(v >= 0.0)) throw ValidationError(who + ": negative load value");
    }

    detail::check_connected(*this);

    const double peak = peak_static_load_mw();
    const double cap = total_generation_capacity_mw();
    if (cap + 1e-9 < peak)
        throw ValidationError("case '" + label + "': total generator capacity " + fmt_double(cap) +
                              " MW cannot serve peak static load " + fmt_double(peak) + " MW");
}

/// Returns a copy with every hourly static load multiplied by factor.
inline GridCase scale_static_load(const GridCase& c, double factor) {
    if (!(factor > 0.0)) throw ValidationError("scale_static_load: factor must be positive");
    GridCase out = c;
    for (auto& s : out.static_loads)
        for (double& v : s.hourly_load_mw) v *= factor;
    return out;
}

} // namespace gridev
