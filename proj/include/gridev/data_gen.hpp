#pragma once

// Bundled demo data: illustrative defaults only. Rate values are plausible
// placeholders for wiring and testing, not authoritative measurements; real
// studies must supply their own tables.

#include <filesystem>
#include <fstream>

#include "gridev/config.hpp"
#include "gridev/emissions.hpp"
#include "gridev/grid_synth.hpp"
#include "gridev/transport_synth.hpp"

namespace gridev {

inline EnergyRateTable default_energy_rates(double ac_aux_kw = 3.0) {
    EnergyRateTable t;
    t.ac_aux_kw = ac_aux_kw;
    const std::map<RangeClass, double> base{
        {RangeClass::R100, 0.28}, {RangeClass::R200, 0.30}, {RangeClass::R300, 0.33}};
    for (RangeClass cls : kAllRangeClasses)
        for (int b = 0; b < EnergyRateTable::kNumBins; ++b) {
            const double mid = b * EnergyRateTable::kBinWidth + 2.5;
            // U-shaped over speed with the minimum near 40 mph
            const double shape = 1.0 + 0.35 * std::pow((mid - 40.0) / 40.0, 2);
            t.set(cls, b * EnergyRateTable::kBinWidth, base.at(cls) * shape);
        }
    return t;
}

inline OnRoadRateTable default_onroad_rates() {
    OnRoadRateTable t;
    struct Row {
        Pollutant pol;
        double ldv_base, hdv_base, speed_coef, hot_factor;
    };
    const Row rows[] = {
        {Pollutant::CO2, 380.0, 1450.0, 0.50, 1.05},
        {Pollutant::NOX, 0.25, 5.5, 0.45, 1.10},
        {Pollutant::PM25, 0.008, 0.09, 0.30, 1.08},
        {Pollutant::VOC, 0.18, 0.45, 0.40, 1.12},
    };
    for (const Row& row : rows)
        for (int b = 0; b < OnRoadRateTable::kNumBins; ++b) {
            const double mid = b * OnRoadRateTable::kBinWidth + 2.5;
            const double shape = 1.0 + row.speed_coef * std::pow((mid - 45.0) / 45.0, 2);
            for (TempRegime regime : {TempRegime::mild, TempRegime::hot}) {
                const double f = regime == TempRegime::hot ? row.hot_factor : 1.0;
                t.set(VehicleClass::LDV, b * OnRoadRateTable::kBinWidth, row.pol, regime,
                      row.ldv_base * shape * f);
                t.set(VehicleClass::HDV, b * OnRoadRateTable::kBinWidth, row.pol, regime,
                      row.hdv_base * shape * f);
            }
        }
    return t;
}

inline EguRateTable default_egu_rates() {
    EguRateTable t;
    // VOC runs higher for gas than for coal; the other pollutants the reverse.
    t.set(FuelType::coal, Pollutant::CO2, 1002000.0);
    t.set(FuelType::coal, Pollutant::NOX, 700.0);
    t.set(FuelType::coal, Pollutant::PM25, 95.0);
    t.set(FuelType::coal, Pollutant::VOC, 12.0);
    t.set(FuelType::natural_gas, Pollutant::CO2, 420000.0);
    t.set(FuelType::natural_gas, Pollutant::NOX, 210.0);
    t.set(FuelType::natural_gas, Pollutant::PM25, 28.0);
    t.set(FuelType::natural_gas, Pollutant::VOC, 38.0);
    t.set(FuelType::other, Pollutant::CO2, 600000.0);
    t.set(FuelType::other, Pollutant::NOX, 400.0);
    t.set(FuelType::other, Pollutant::PM25, 50.0);
    t.set(FuelType::other, Pollutant::VOC, 25.0);
    return t;
}

/// Ten-bus case with a thermal-heavy mix: roughly half gas, a fifth each wind
/// and coal, a tenth nuclear.
inline GridCase make_demo_case_2016() {
    SynthCaseOptions opts;
    opts.label = "2016";
    return generate_synthetic_case(10,
                                   {{FuelType::natural_gas, 200.0},
                                    {FuelType::wind, 80.0},
                                    {FuelType::coal, 80.0},
                                    {FuelType::nuclear, 40.0}},
                                   240.0, 2016, opts);
}

/// Carbon-free-majority follow-up: coal retired, wind overbuilt past the mild
/// peak in every hour, battery storage added, static load grown 25%.
inline GridCase make_demo_case_2030() {
    SynthCaseOptions opts;
    opts.label = "2030";
    return generate_synthetic_case(10,
                                   {{FuelType::wind, 800.0},
                                    {FuelType::natural_gas, 160.0},
                                    {FuelType::nuclear, 40.0},
                                    {FuelType::storage, 30.0}},
                                   300.0, 2030, opts);
}

struct BundleOptions {
    int vehicles = 1000;
    int nodes = 50;
    std::uint64_t seed = 1;
    int target_trips = 0;  // when > 0, trips.csv holds exactly this many trips
    // customization of the thermal-mix case; defaults mirror make_demo_case_2016
    int case_buses = 10;
    double case_peak_mw = 240.0;
    std::map<FuelType, double> case_mix;  // empty: default mix
};

/// Writes a complete runnable bundle: demo cases, synthetic fleet, node
/// coordinates, rate tables, and a config wired to them.
inline void write_demo_bundle(const std::string& dir, const BundleOptions& opts = {}) {
    std::filesystem::create_directories(dir);
    if (opts.case_buses == 10 && opts.case_mix.empty() && opts.case_peak_mw == 240.0) {
        write_grid_case(make_demo_case_2016(), dir + "/demo_case_2016.json");
    } else {
        std::map<FuelType, double> mix = opts.case_mix;
        if (mix.empty())
            mix = {{FuelType::natural_gas, 200.0},
                   {FuelType::wind, 80.0},
                   {FuelType::coal, 80.0},
                   {FuelType::nuclear, 40.0}};
        SynthCaseOptions copts;
        copts.label = "2016";
        write_grid_case(generate_synthetic_case(opts.case_buses, mix, opts.case_peak_mw, 2016, copts),
                        dir + "/demo_case_2016.json");
    }
    write_grid_case(make_demo_case_2030(), dir + "/demo_case_2030.json");

    SynthTripOptions trip_opts;
    trip_opts.target_trips = opts.target_trips;
    auto trips = generate_synthetic_trips(opts.vehicles, opts.nodes, opts.seed, trip_opts);
    write_trips_csv(trips, dir + "/trips.csv");
    write_node_coords_csv(synthetic_node_coords(opts.nodes, opts.seed), dir + "/node_coords.csv");

    write_energy_rates_csv(default_energy_rates(), dir + "/energy_rates.csv");
    write_onroad_rates_csv(default_onroad_rates(), dir + "/onroad_rates.csv");
    write_egu_rates_csv(default_egu_rates(), dir + "/egu_rates.csv");

    nlohmann::json j;
    j["label"] = "demo";
    j["seed"] = opts.seed;
    j["workers"] = 0;
    j["out_dir"] = "out";
    j["cases"] = {{"2016", "demo_case_2016.json"}, {"2030", "demo_case_2030.json"}};
    j["trips"] = "trips.csv";
    j["node_coords"] = "node_coords.csv";
    j["energy_rates"] = "energy_rates.csv";
    j["onroad_rates"] = "onroad_rates.csv";
    j["egu_rates"] = "egu_rates.csv";
    j["hot_load_factor"] = 1.25;
    j["ev"] = {{"ac_aux_kw", 3.0},
               {"battery_kwh", {{"R100", 24.0}, {"R200", 60.0}, {"R300", 90.0}}},
               {"range_shares", {{"R100", 0.25}, {"R200", 0.13}, {"R300", 0.52}}}};
    j["behavior"] = {{"anxiety_low_miles", 20.0}, {"anxiety_high_miles", 60.0},
                     {"home_charger_kw", 7.2},    {"public_charger_kw", 50.0},
                     {"peak_start_hour", 14},     {"peak_end_hour", 20},
                     {"offpeak_start_hour", 22},  {"offpeak_end_hour", 4}};
    j["matrix"] = {{"weathers", {"mild", "hot"}},
                   {"mixes", {"2016", "2030"}},
                   {"penetrations", {0.05, 0.10, 0.15, 0.20}},
                   {"strategies", {"trip-end", "off-peak", "most-likely"}}};
    std::ofstream out(dir + "/config.json");
    if (!out) throw ParseError("cannot open " + dir + "/config.json for writing");
    out << j.dump(2) << "\n";
}

} // namespace gridev
