#pragma once

#include <atomic>
#include <cstdio>
#include <optional>
#include <thread>

#include "gridev/charging.hpp"
#include "gridev/coupling.hpp"
#include "gridev/emissions.hpp"
#include "gridev/grid_case.hpp"
#include "gridev/opf.hpp"
#include "gridev/transport.hpp"

namespace gridev {

enum class Weather { mild, hot };

inline const char* to_string(Weather w) { return w == Weather::mild ? "mild" : "hot"; }

inline Weather weather_from_string(const std::string& s) {
    if (s == "mild") return Weather::mild;
    if (s == "hot") return Weather::hot;
    throw ParseError("unknown weather '" + s + "' (expected mild | hot)");
}

struct ScenarioSpec {
    Weather weather = Weather::mild;
    std::string mix_year;
    double penetration = 0.0;
    Strategy strategy = Strategy::trip_end;
    std::uint64_t seed = 1;

    std::string tag() const {
        char pen[32];
        std::snprintf(pen, sizeof(pen), "%.6g", penetration * 100.0);
        return mix_year + "_" + to_string(weather) + "_p" + pen + "_" + to_string(strategy);
    }
};

/// Everything a scenario run reads; immutable once loaded, shared by workers.
struct SharedData {
    std::map<std::string, GridCase> cases;
    std::vector<TripRecord> trips;
    std::map<int, std::pair<double, double>> node_coords;
    std::optional<ServiceAreaMap> area_override;
    EnergyRateTable energy_rates;
    OnRoadRateTable onroad_rates;
    EguRateTable egu_rates;
    BehaviorParams behavior;
    RangeConfig ranges;
    double hot_load_factor = 1.25;
};

struct Baseline {
    GridCase prepared_case;  // weather-adjusted static loads
    ServiceAreaMap areas;
    DayDispatch dispatch;
    EmissionInventory inventory;
};

struct PollutantDelta {
    double grams = 0.0;
    double pct = 0.0;
};

struct ScenarioResult {
    ScenarioSpec spec;
    DayDispatch day_dispatch;
    double ev_energy_mwh = 0.0;
    FuelDeltas marginal_generation_mwh;
    bool has_marginal_rates = false;
    std::array<double, 4> marginal_egu_rates{};  // g/MWh by pollutant
    EmissionInventory inventory;
    EmissionInventory baseline_inventory;
    std::array<PollutantDelta, 4> deltas;
    NodeChargingProfile profile;
    std::array<double, kHoursPerDay> hourly_static_mw{};
    std::array<double, kHoursPerDay> hourly_ev_mw{};
};

namespace scenario_detail {

inline const GridCase& case_for_mix(const SharedData& shared, const std::string& mix) {
    auto it = shared.cases.find(mix);
    if (it == shared.cases.end())
        throw ValidationError("unknown power-mix label '" + mix + "'");
    return it->second;
}

} // namespace scenario_detail

/// No-EV reference for a (weather, mix) cell; shared across every penetration
/// and strategy in that cell.
inline Baseline compute_baseline(const SharedData& shared, Weather weather, const std::string& mix,
                                 std::uint64_t seed) {
    const GridCase& raw = scenario_detail::case_for_mix(shared, mix);
    Baseline b{
        weather == Weather::hot ? scale_static_load(raw, shared.hot_load_factor) : raw,
        {},
        {},
        {}};
    b.areas = shared.area_override ? *shared.area_override
                                   : build_service_areas(b.prepared_case, shared.node_coords);
    const auto demands = superpose_demand(b.prepared_case, {});
    b.dispatch = solve_day(b.prepared_case, demands);
    const EvAssignment none = assign_evs(shared.trips, 0.0, shared.ranges, seed);
    const TempRegime regime = (weather == Weather::hot) ? TempRegime::hot : TempRegime::mild;
    EmissionInventory onroad = onroad_emissions(shared.trips, none, shared.onroad_rates, regime);
    EmissionInventory egu = egu_emissions(b.dispatch, shared.egu_rates);
    b.inventory = combine_inventories(onroad, egu, mix + "_" + to_string(weather) + "_baseline");
    return b;
}

/// Full pipeline for one scenario: assign EVs, build the charging profile,
/// couple it onto substations, dispatch the day, and account emissions against
/// the supplied baseline.
inline ScenarioResult run_scenario(const ScenarioSpec& spec, const SharedData& shared,
                                   const Baseline& baseline) {
    const bool hot = spec.weather == Weather::hot;
    const TempRegime regime = hot ? TempRegime::hot : TempRegime::mild;

    ScenarioResult r;
    r.spec = spec;

    const EvAssignment assignment = assign_evs(shared.trips, spec.penetration, shared.ranges, spec.seed);
    r.profile = charging_profile(spec.strategy, shared.trips, assignment, shared.energy_rates,
                                 shared.behavior, hot, spec.seed);
    r.ev_energy_mwh = r.profile.total_kwh() / 1000.0;

    const auto ev_load = aggregate_ev_load(r.profile, baseline.areas);
    const auto demands = superpose_demand(baseline.prepared_case, ev_load);
    r.day_dispatch = solve_day(baseline.prepared_case, demands);

    for (int h = 0; h < kHoursPerDay; ++h)
        r.hourly_static_mw[h] = baseline.prepared_case.total_static_load_mw(h);
    for (const auto& [key, mw] : ev_load) r.hourly_ev_mw[key.second] += mw;

    EmissionInventory onroad = onroad_emissions(shared.trips, assignment, shared.onroad_rates, regime);
    EmissionInventory egu = egu_emissions(r.day_dispatch, shared.egu_rates);
    r.inventory = combine_inventories(onroad, egu, spec.tag());
    r.baseline_inventory = baseline.inventory;

    r.marginal_generation_mwh = marginal_generation(baseline.dispatch, r.day_dispatch);
    if (r.ev_energy_mwh > 0.0) {
        r.has_marginal_rates = true;
        for (Pollutant p : kAllPollutants)
            r.marginal_egu_rates[static_cast<int>(p)] =
                marginal_egu_rate(baseline.inventory, r.inventory, r.ev_energy_mwh, p);
    }
    for (Pollutant p : kAllPollutants) {
        const int i = static_cast<int>(p);
        const double base = r.baseline_inventory.total(p);
        r.deltas[i].grams = r.inventory.total(p) - base;
        r.deltas[i].pct = (base > 0.0) ? 100.0 * r.deltas[i].grams / base : 0.0;
    }
    return r;
}

/// Convenience overload computing its own baseline.
inline ScenarioResult run_scenario(const ScenarioSpec& spec, const SharedData& shared) {
    return run_scenario(spec, shared,
                        compute_baseline(shared, spec.weather, spec.mix_year, spec.seed));
}

struct MatrixOutcome {
    ScenarioSpec spec;
    std::optional<ScenarioResult> result;
    std::string error;  // non-empty when the scenario failed
};

struct MatrixResult {
    std::vector<MatrixOutcome> outcomes;
    std::map<std::pair<int, std::string>, Baseline> baselines;  // (weather, mix)

    const Baseline& baseline_for(Weather w, const std::string& mix) const {
        return baselines.at({static_cast<int>(w), mix});
    }
    int failures() const {
        int n = 0;
        for (const auto& o : outcomes)
            if (!o.result) ++n;
        return n;
    }
};

/// Runs every scenario against shared immutable data with a bounded worker pool.
/// Baselines are computed once per (weather, mix) pair. Individual scenario
/// failures are captured, never cascaded.
inline MatrixResult run_matrix(const std::vector<ScenarioSpec>& specs, const SharedData& shared,
                               int workers = 0) {
    if (specs.empty()) throw ValidationError("run_matrix: no scenarios requested");
    MatrixResult out;
    std::map<std::pair<int, std::string>, std::string> baseline_errors;
    for (const auto& s : specs) {
        const auto key = std::make_pair(static_cast<int>(s.weather), s.mix_year);
        if (out.baselines.count(key) || baseline_errors.count(key)) continue;
        try {
            out.baselines.emplace(key, compute_baseline(shared, s.weather, s.mix_year, s.seed));
        } catch (const std::exception& e) {
            baseline_errors[key] = std::string("baseline (") + to_string(s.weather) + ", " +
                                   s.mix_year + "): " + e.what();
            log_info(baseline_errors[key]);
        }
    }

    out.outcomes.resize(specs.size());
    std::atomic<std::size_t> next{0};
    int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::clamp(n_workers, 1, static_cast<int>(specs.size()));

    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            MatrixOutcome& o = out.outcomes[i];
            o.spec = specs[i];
            const auto key = std::make_pair(static_cast<int>(specs[i].weather), specs[i].mix_year);
            if (auto it = baseline_errors.find(key); it != baseline_errors.end()) {
                o.error = std::string("scenario ") + specs[i].tag() + ": " + it->second;
                continue;
            }
            try {
                o.result = run_scenario(specs[i], shared, out.baselines.at(key));
            } catch (const std::exception& e) {
                o.error = std::string("scenario ") + specs[i].tag() + ": " + e.what();
                log_info(o.error);
            }
        }
    };
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

/// Cartesian product of the sweep axes, ordered weather, mix, penetration,
/// strategy.
inline std::vector<ScenarioSpec> make_matrix_specs(const std::vector<Weather>& weathers,
                                                   const std::vector<std::string>& mixes,
                                                   const std::vector<double>& penetrations,
                                                   const std::vector<Strategy>& strategies,
                                                   std::uint64_t seed) {
    std::vector<ScenarioSpec> out;
    for (Weather w : weathers)
        for (const auto& m : mixes)
            for (double p : penetrations)
                for (Strategy s : strategies) out.push_back({w, m, p, s, seed});
    return out;
}

// ---------------------------------------------------------------------------
// sweep outputs

inline void write_summary_csv(const MatrixResult& matrix, const std::string& path) {
    CsvWriter w(path);
    w.row({"weather", "mix_year", "penetration", "strategy", "total_co2_t", "total_nox_t",
           "pct_co2_reduction", "pct_nox_reduction", "marginal_rate_co2_g_per_mwh",
           "marginal_rate_nox_g_per_mwh", "marginal_rate_pm25_g_per_mwh",
           "marginal_rate_voc_g_per_mwh", "ev_energy_mwh", "dispatch_cost_usd"});
    for (const auto& [key, b] : matrix.baselines) {
        w.row({to_string(static_cast<Weather>(key.first)), key.second, "0", "baseline",
               fmt_double(b.inventory.total(Pollutant::CO2) / 1e6),
               fmt_double(b.inventory.total(Pollutant::NOX) / 1e6), "0", "0", "", "", "", "", "0",
               fmt_double(b.dispatch.total_cost)});
    }
    for (const auto& o : matrix.outcomes) {
        if (!o.result) continue;
        const ScenarioResult& r = *o.result;
        auto rate = [&](Pollutant p) {
            return r.has_marginal_rates ? fmt_double(r.marginal_egu_rates[static_cast<int>(p)])
                                        : std::string();
        };
        w.row({to_string(r.spec.weather), r.spec.mix_year, fmt_double(r.spec.penetration),
               to_string(r.spec.strategy), fmt_double(r.inventory.total(Pollutant::CO2) / 1e6),
               fmt_double(r.inventory.total(Pollutant::NOX) / 1e6),
               fmt_double(-r.deltas[static_cast<int>(Pollutant::CO2)].pct),
               fmt_double(-r.deltas[static_cast<int>(Pollutant::NOX)].pct), rate(Pollutant::CO2),
               rate(Pollutant::NOX), rate(Pollutant::PM25), rate(Pollutant::VOC),
               fmt_double(r.ev_energy_mwh), fmt_double(r.day_dispatch.total_cost)});
    }
    w.close();
}

inline void write_failures_csv(const MatrixResult& matrix, const std::string& path) {
    CsvWriter w(path);
    w.row({"scenario", "error"});
    for (const auto& o : matrix.outcomes)
        if (!o.result) w.row({o.spec.tag(), o.error});
    w.close();
}

inline void write_plot_files(const MatrixResult& matrix, const std::string& dir) {
    CsvWriter load(dir + "/plot_load_stack.csv");
    load.row({"scenario", "hour", "static_mw", "ev_mw", "total_mw"});
    CsvWriter marg(dir + "/plot_marginal_generation.csv");
    marg.row({"scenario", "hour", "fuel", "delta_mwh"});
    CsvWriter emis(dir + "/plot_emissions.csv");
    emis.row({"scenario", "pollutant", "onroad_ldv_t", "onroad_hdv_t", "egu_t", "total_t"});
    for (const auto& o : matrix.outcomes) {
        if (!o.result) continue;
        const ScenarioResult& r = *o.result;
        const std::string tag = r.spec.tag();
        for (int h = 0; h < kHoursPerDay; ++h)
            load.row({tag, std::to_string(h), fmt_double(r.hourly_static_mw[h]),
                      fmt_double(r.hourly_ev_mw[h]),
                      fmt_double(r.hourly_static_mw[h] + r.hourly_ev_mw[h])});
        for (const auto& [fuel, hours] : r.marginal_generation_mwh)
            for (int h = 0; h < kHoursPerDay; ++h)
                marg.row({tag, std::to_string(h), to_string(fuel), fmt_double(hours[h])});
        for (Pollutant p : kAllPollutants)
            emis.row({tag, to_string(p), fmt_double(r.inventory.source_total("LDV", p) / 1e6),
                      fmt_double(r.inventory.source_total("HDV", p) / 1e6),
                      fmt_double(r.inventory.egu_total(p) / 1e6),
                      fmt_double(r.inventory.total(p) / 1e6)});
    }
    load.close();
    marg.close();
    emis.close();
}

} // namespace gridev
