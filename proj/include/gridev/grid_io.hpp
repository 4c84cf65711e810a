#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "gridev/grid_case.hpp"

namespace gridev {

namespace detail {

using nlohmann::json;

template <typename T>
T require(const json& j, const char* field, const std::string& ctx) {
    if (!j.contains(field))
        throw ParseError(ctx + ": missing field '" + field + "'");
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw ParseError(ctx + ": field '" + field + "' has wrong type");
    }
}

inline std::array<double, kHoursPerDay> require_hourly(const json& j, const char* field,
                                                       const std::string& ctx) {
    auto v = require<std::vector<double>>(j, field, ctx);
    if (v.size() != kHoursPerDay)
        throw ParseError(ctx + ": field '" + field + "' must have exactly 24 entries, got " +
                         std::to_string(v.size()));
    std::array<double, kHoursPerDay> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

} // namespace detail

inline GridCase grid_case_from_json(const nlohmann::json& j) {
    using detail::require;
    using detail::require_hourly;
    GridCase c;
    c.base_mva = require<double>(j, "base_mva", "case");
    c.label = require<std::string>(j, "label", "case");

    for (const auto& bj : require<std::vector<nlohmann::json>>(j, "buses", "case")) {
        Bus b;
        b.id = require<int>(bj, "id", "bus");
        const std::string ctx = "bus " + std::to_string(b.id);
        b.name = require<std::string>(bj, "name", ctx);
        b.latitude = require<double>(bj, "latitude", ctx);
        b.longitude = require<double>(bj, "longitude", ctx);
        b.is_substation = require<bool>(bj, "is_substation", ctx);
        c.buses.push_back(b);
    }
    for (const auto& lj : require<std::vector<nlohmann::json>>(j, "lines", "case")) {
        TransmissionLine l;
        l.from_bus = require<int>(lj, "from_bus", "line");
        l.to_bus = require<int>(lj, "to_bus", "line");
        const std::string ctx =
            "line " + std::to_string(l.from_bus) + "-" + std::to_string(l.to_bus);
        l.susceptance = require<double>(lj, "susceptance", ctx);
        l.flow_limit_mw = require<double>(lj, "flow_limit_mw", ctx);
        c.lines.push_back(l);
    }
    for (const auto& gj : require<std::vector<nlohmann::json>>(j, "generators", "case")) {
        Generator g;
        g.id = require<int>(gj, "id", "generator");
        const std::string ctx = "generator " + std::to_string(g.id);
        g.bus_id = require<int>(gj, "bus_id", ctx);
        g.fuel = fuel_from_string(require<std::string>(gj, "fuel", ctx));
        g.p_min_mw = require<double>(gj, "p_min_mw", ctx);
        g.p_max_mw = require<double>(gj, "p_max_mw", ctx);
        for (const auto& sj : require<std::vector<nlohmann::json>>(gj, "cost_curve", ctx)) {
            CostSegment seg;
            seg.breakpoint_mw = require<double>(sj, "breakpoint_mw", ctx + " cost_curve");
            seg.marginal_cost_per_mwh =
                require<double>(sj, "marginal_cost_per_mwh", ctx + " cost_curve");
            g.cost_curve.push_back(seg);
        }
        g.availability = require_hourly(gj, "availability", ctx);
        c.generators.push_back(g);
    }
    for (const auto& sj : require<std::vector<nlohmann::json>>(j, "storage", "case")) {
        StorageUnit s;
        s.id = require<int>(sj, "id", "storage");
        const std::string ctx = "storage " + std::to_string(s.id);
        s.bus_id = require<int>(sj, "bus_id", ctx);
        s.power_limit_mw = require<double>(sj, "power_limit_mw", ctx);
        s.energy_capacity_mwh = require<double>(sj, "energy_capacity_mwh", ctx);
        s.round_trip_efficiency = require<double>(sj, "round_trip_efficiency", ctx);
        s.initial_soc_mwh = require<double>(sj, "initial_soc_mwh", ctx);
        c.storage_units.push_back(s);
    }
    for (const auto& sj : require<std::vector<nlohmann::json>>(j, "static_loads", "case")) {
        StaticLoadSeries s;
        s.bus_id = require<int>(sj, "bus_id", "static_loads");
        s.hourly_load_mw =
            require_hourly(sj, "hourly_load_mw", "static_loads for bus " + std::to_string(s.bus_id));
        c.static_loads.push_back(s);
    }
    return c;
}

inline nlohmann::json grid_case_to_json(const GridCase& c) {
    nlohmann::json j;
    j["base_mva"] = c.base_mva;
    j["label"] = c.label;
    j["buses"] = nlohmann::json::array();
    for (const auto& b : c.buses)
        j["buses"].push_back({{"id", b.id},
                              {"name", b.name},
                              {"latitude", b.latitude},
                              {"longitude", b.longitude},
                              {"is_substation", b.is_substation}});
    j["lines"] = nlohmann::json::array();
    for (const auto& l : c.lines)
        j["lines"].push_back({{"from_bus", l.from_bus},
                              {"to_bus", l.to_bus},
                              {"susceptance", l.susceptance},
                              {"flow_limit_mw", l.flow_limit_mw}});
    j["generators"] = nlohmann::json::array();
    for (const auto& g : c.generators) {
        nlohmann::json gj{{"id", g.id},
                          {"bus_id", g.bus_id},
                          {"fuel", to_string(g.fuel)},
                          {"p_min_mw", g.p_min_mw},
                          {"p_max_mw", g.p_max_mw}};
        gj["cost_curve"] = nlohmann::json::array();
        for (const auto& seg : g.cost_curve)
            gj["cost_curve"].push_back({{"breakpoint_mw", seg.breakpoint_mw},
                                        {"marginal_cost_per_mwh", seg.marginal_cost_per_mwh}});
        gj["availability"] = g.availability;
        j["generators"].push_back(gj);
    }
    j["storage"] = nlohmann::json::array();
    for (const auto& s : c.storage_units)
        j["storage"].push_back({{"id", s.id},
                                {"bus_id", s.bus_id},
                                {"power_limit_mw", s.power_limit_mw},
                                {"energy_capacity_mwh", s.energy_capacity_mwh},
                                {"round_trip_efficiency", s.round_trip_efficiency},
                                {"initial_soc_mwh", s.initial_soc_mwh}});
    j["static_loads"] = nlohmann::json::array();
    for (const auto& s : c.static_loads)
        j["static_loads"].push_back({{"bus_id", s.bus_id}, {"hourly_load_mw", s.hourly_load_mw}});
    return j;
}

/// Parses and fully validates a grid case file.
inline GridCase parse_grid_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    GridCase c = grid_case_from_json(j);
    c.validate();
    return c;
}

inline std::string serialize_grid_case(const GridCase& c) { return grid_case_to_json(c).dump(2) + "\n"; }

inline void write_grid_case(const GridCase& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << serialize_grid_case(c);
    if (!out) throw ParseError("write failed: " + path);
}

} // namespace gridev
