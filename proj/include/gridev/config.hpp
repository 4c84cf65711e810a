#pragma once

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "gridev/grid_io.hpp"
#include "gridev/scenario.hpp"
#include "gridev/transport_synth.hpp"

namespace gridev {

/// Run configuration: input paths, sweep axes, behavior parameters. Loaded
/// from a single JSON file; CLI flags override individual values.
struct RunConfig {
    std::string label = "run";
    std::uint64_t seed = 1;
    int workers = 0;  // 0: hardware concurrency
    std::string out_dir = "out";

    std::map<std::string, std::string> case_paths;  // mix label -> path
    std::string trips_path;
    std::string node_coords_path;
    std::string service_area_override_path;  // optional
    std::string energy_rates_path;
    std::string onroad_rates_path;
    std::string egu_rates_path;

    double ac_aux_kw = 3.0;
    RangeConfig ranges;
    BehaviorParams behavior;
    double hot_load_factor = 1.25;

    std::vector<Weather> weathers{Weather::mild, Weather::hot};
    std::vector<std::string> mixes;
    std::vector<double> penetrations{0.05, 0.10, 0.15, 0.20};
    std::vector<Strategy> strategies{Strategy::trip_end, Strategy::off_peak, Strategy::most_likely};
};

namespace config_detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return p;
    std::filesystem::path path(p);
    if (path.is_absolute()) return path.string();
    return (base / path).lexically_normal().string();
}

} // namespace config_detail

namespace config_detail {
RunConfig extract_run_config(const nlohmann::json& j, const std::string& path);
} // namespace config_detail

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        return config_detail::extract_run_config(j, path);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline RunConfig config_detail::extract_run_config(const nlohmann::json& j,
                                                   const std::string& path) {
    const auto base = std::filesystem::path(path).parent_path();

    RunConfig c;
    c.label = j.value("label", c.label);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.hot_load_factor = j.value("hot_load_factor", c.hot_load_factor);

    if (!j.contains("cases") || !j.at("cases").is_object())
        throw ParseError(path + ": missing object field 'cases'");
    for (const auto& [label, pj] : j.at("cases").items())
        c.case_paths[label] = config_detail::resolve(base, pj.get<std::string>());

    auto path_field = [&](const char* field, bool required) {
        if (!j.contains(field)) {
            if (required) throw ParseError(std::string(path) + ": missing field '" + field + "'");
            return std::string();
        }
        return config_detail::resolve(base, j.at(field).get<std::string>());
    };
    c.trips_path = path_field("trips", true);
    c.node_coords_path = path_field("node_coords", true);
    c.energy_rates_path = path_field("energy_rates", true);
    c.onroad_rates_path = path_field("onroad_rates", true);
    c.egu_rates_path = path_field("egu_rates", true);
    c.service_area_override_path = path_field("service_area_override", false);

    if (j.contains("ev")) {
        const auto& ev = j.at("ev");
        c.ac_aux_kw = ev.value("ac_aux_kw", c.ac_aux_kw);
        if (ev.contains("battery_kwh"))
            for (const auto& [k, v] : ev.at("battery_kwh").items())
                c.ranges.battery_kwh[range_class_from_string(k)] = v.get<double>();
        if (ev.contains("range_shares"))
            for (const auto& [k, v] : ev.at("range_shares").items())
                c.ranges.shares[range_class_from_string(k)] = v.get<double>();
    }
    if (j.contains("behavior")) {
        const auto& b = j.at("behavior");
        c.behavior.anxiety_low_miles = b.value("anxiety_low_miles", c.behavior.anxiety_low_miles);
        c.behavior.anxiety_high_miles = b.value("anxiety_high_miles", c.behavior.anxiety_high_miles);
        c.behavior.home_charger_kw = b.value("home_charger_kw", c.behavior.home_charger_kw);
        c.behavior.public_charger_kw = b.value("public_charger_kw", c.behavior.public_charger_kw);
        c.behavior.peak_start_hour = b.value("peak_start_hour", c.behavior.peak_start_hour);
        c.behavior.peak_end_hour = b.value("peak_end_hour", c.behavior.peak_end_hour);
        c.behavior.offpeak_start_hour = b.value("offpeak_start_hour", c.behavior.offpeak_start_hour);
        c.behavior.offpeak_end_hour = b.value("offpeak_end_hour", c.behavior.offpeak_end_hour);
    }
    if (j.contains("matrix")) {
        const auto& m = j.at("matrix");
        if (m.contains("weathers")) {
            c.weathers.clear();
            for (const auto& w : m.at("weathers")) c.weathers.push_back(weather_from_string(w));
        }
        if (m.contains("mixes")) {
            c.mixes.clear();
            for (const auto& x : m.at("mixes")) c.mixes.push_back(x.get<std::string>());
        }
        if (m.contains("penetrations")) {
            c.penetrations.clear();
            for (const auto& p : m.at("penetrations")) c.penetrations.push_back(p.get<double>());
        }
        if (m.contains("strategies")) {
            c.strategies.clear();
            for (const auto& s : m.at("strategies"))
                c.strategies.push_back(strategy_from_string(s.get<std::string>()));
        }
    }
    if (c.mixes.empty())
        for (const auto& [label, p] : c.case_paths) c.mixes.push_back(label);
    return c;
}

/// Loads and cross-validates every input the config names.
inline SharedData load_shared_data(const RunConfig& config) {
    SharedData d;
    for (const auto& [label, path] : config.case_paths) {
        GridCase c = parse_grid_case(path);
        c.label = label;  // config label wins so mixes and files stay aligned
        d.cases.emplace(label, std::move(c));
    }
    d.trips = parse_trips(config.trips_path);
    d.node_coords = load_node_coords_csv(config.node_coords_path);
    d.energy_rates = load_energy_rates_csv(config.energy_rates_path, config.ac_aux_kw);
    d.energy_rates.require_full_coverage();
    d.onroad_rates = load_onroad_rates_csv(config.onroad_rates_path);
    d.onroad_rates.require_full_coverage();
    d.egu_rates = load_egu_rates_csv(config.egu_rates_path);
    d.behavior = config.behavior;
    d.behavior.validate();
    d.ranges = config.ranges;
    d.ranges.validate();
    d.hot_load_factor = config.hot_load_factor;

    for (const auto& [label, c] : d.cases)
        for (const auto& g : c.generators)
            if (!d.egu_rates.has_fuel(g.fuel))
                throw ValidationError("case '" + label + "': EGU rate table missing fuel row for " +
                                      std::string(to_string(g.fuel)));

    // every trip node needs a mapping target
    for (const auto& t : d.trips)
        if (!d.node_coords.count(t.end_node) &&
            !(config.service_area_override_path.size() > 0))
            throw ValidationError("trips reference node " + std::to_string(t.end_node) +
                                  " with no coordinates");

    if (!config.service_area_override_path.empty()) {
        // the override must target substations of every configured case
        for (const auto& [label, c] : d.cases)
            d.area_override = load_service_area_csv(config.service_area_override_path, c);
    }
    return d;
}

inline std::vector<ScenarioSpec> make_matrix_specs(const RunConfig& config) {
    return make_matrix_specs(config.weathers, config.mixes, config.penetrations, config.strategies,
                             config.seed);
}

} // namespace gridev
