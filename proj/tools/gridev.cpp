// gridev: couples a regional EV fleet's charging demand onto a transmission
// grid dispatch and reports generation, marginal rates, and the combined
// on-road + generation emission inventory across scenario sweeps.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridev/config.hpp"
#include "gridev/data_gen.hpp"
#include "gridev/scenario.hpp"

namespace {

using namespace gridev;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitPartial = 4;

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    int workers = -1;
};

RunConfig load_config_with_overrides(const GlobalFlags& g) {
    if (g.config_path.empty()) throw ParseError("--config is required");
    RunConfig c = load_run_config(g.config_path);
    if (!g.out_dir.empty()) c.out_dir = g.out_dir;
    if (g.seed >= 0) c.seed = static_cast<std::uint64_t>(g.seed);
    if (g.workers >= 0) c.workers = g.workers;
    return c;
}

int cmd_validate(const GlobalFlags& g) {
    RunConfig config;
    try {
        config = load_config_with_overrides(g);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "VIOLATION: config: %s\n", e.what());
        return kExitValidation;
    }

    int violations = 0;
    auto check = [&](const std::string& what, auto&& fn) {
        try {
            fn();
            std::printf("OK %s\n", what.c_str());
            return true;
        } catch (const std::exception& e) {
            std::printf("VIOLATION: %s: %s\n", what.c_str(), e.what());
            ++violations;
            return false;
        }
    };

    std::map<std::string, GridCase> cases;
    for (const auto& [label, path] : config.case_paths)
        check("case " + label, [&] { cases.emplace(label, parse_grid_case(path)); });

    std::vector<TripRecord> trips;
    bool trips_ok = check("trips", [&] { trips = parse_trips(config.trips_path); });
    std::map<int, std::pair<double, double>> coords;
    bool coords_ok =
        check("node coordinates", [&] { coords = load_node_coords_csv(config.node_coords_path); });

    check("energy rate table", [&] {
        load_energy_rates_csv(config.energy_rates_path, config.ac_aux_kw).require_full_coverage();
    });
    check("on-road rate table", [&] {
        load_onroad_rates_csv(config.onroad_rates_path).require_full_coverage();
    });
    EguRateTable egu;
    bool egu_ok = check("EGU rate table", [&] { egu = load_egu_rates_csv(config.egu_rates_path); });

    check("behavior parameters", [&] { config.behavior.validate(); });
    check("range classes", [&] { config.ranges.validate(); });

    if (egu_ok)
        for (const auto& [label, c] : cases)
            check("EGU coverage of case " + label, [&] {
                for (const auto& gen : c.generators)
                    if (!egu.has_fuel(gen.fuel))
                        throw ValidationError(std::string("missing fuel row for ") +
                                              to_string(gen.fuel));
            });
    if (trips_ok && coords_ok)
        check("trip-node coordinate coverage", [&] {
            for (const auto& t : trips)
                for (const auto& l : t.links)
                    if (!coords.count(l.node_to) || !coords.count(l.node_from))
                        throw ValidationError("trips reference node without coordinates (trip " +
                                              std::to_string(t.trip_id) + ")");
        });
    if (!config.service_area_override_path.empty())
        for (const auto& [label, c] : cases)
            check("service-area override against case " + label,
                  [&] { load_service_area_csv(config.service_area_override_path, c); });

    if (violations) {
        std::printf("%d violation(s)\n", violations);
        return kExitValidation;
    }
    std::printf("all inputs clean\n");
    return kExitOk;
}

int cmd_synth(const std::string& out_dir, int vehicles, int nodes, long long seed, int target_trips,
              int buses, double peak, const std::vector<std::string>& fuel_specs) {
    BundleOptions opts;
    opts.vehicles = vehicles;
    opts.nodes = nodes;
    opts.seed = static_cast<std::uint64_t>(seed);
    opts.target_trips = target_trips;
    opts.case_buses = buses;
    opts.case_peak_mw = peak;
    for (const auto& spec : fuel_specs) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ParseError("--fuel expects FUEL=MW, got '" + spec + "'");
        opts.case_mix[fuel_from_string(spec.substr(0, eq))] =
            parse_double(spec.substr(eq + 1), "--fuel");
    }
    write_demo_bundle(out_dir, opts);
    std::printf("wrote bundle to %s\n", out_dir.c_str());
    return kExitOk;
}

void write_scenario_outputs(const MatrixResult& matrix, const ScenarioResult& r,
                            const std::string& dir) {
    std::filesystem::create_directories(dir);
    const GridCase& prepared = matrix.baseline_for(r.spec.weather, r.spec.mix_year).prepared_case;
    write_dispatch_csv(prepared, r.day_dispatch, dir + "/dispatch.csv");
    write_profile_csv(r.profile, dir + "/profile.csv");
    write_inventory_csv(r.inventory, dir + "/inventory.csv");
}

int cmd_run(const GlobalFlags& g, const std::string& mix, const std::string& weather,
            double penetration, const std::string& strategy) {
    RunConfig config = load_config_with_overrides(g);
    SharedData shared = load_shared_data(config);

    ScenarioSpec spec;
    spec.mix_year = mix.empty() ? config.mixes.at(0) : mix;
    spec.weather = weather_from_string(weather);
    spec.penetration = penetration;
    spec.strategy = strategy_from_string(strategy);
    spec.seed = config.seed;

    MatrixResult matrix = run_matrix({spec}, shared, 1);
    if (!matrix.outcomes[0].result) throw SimulationError(matrix.outcomes[0].error);

    std::filesystem::create_directories(config.out_dir);
    write_scenario_outputs(matrix, *matrix.outcomes[0].result, config.out_dir);
    write_summary_csv(matrix, config.out_dir + "/summary.csv");
    std::printf("scenario %s done, outputs in %s\n", spec.tag().c_str(), config.out_dir.c_str());
    return kExitOk;
}

int cmd_sweep(const GlobalFlags& g, bool details) {
    RunConfig config = load_config_with_overrides(g);
    if (config.weathers.empty() || config.mixes.empty() || config.penetrations.empty() ||
        config.strategies.empty())
        throw CLI::ValidationError("sweep", "matrix axes must be non-empty");
    SharedData shared = load_shared_data(config);

    const auto specs = make_matrix_specs(config);
    log_info("sweep over " + std::to_string(specs.size()) + " scenarios");
    MatrixResult matrix = run_matrix(specs, shared, config.workers);

    std::filesystem::create_directories(config.out_dir);
    write_summary_csv(matrix, config.out_dir + "/summary.csv");
    write_failures_csv(matrix, config.out_dir + "/failures.csv");
    write_plot_files(matrix, config.out_dir);
    if (details)
        for (const auto& o : matrix.outcomes)
            if (o.result)
                write_scenario_outputs(matrix, *o.result, config.out_dir + "/detail/" + o.spec.tag());

    const int failed = matrix.failures();
    std::printf("sweep: %zu scenarios, %d failed, outputs in %s\n", specs.size(), failed,
                config.out_dir.c_str());
    if (failed == static_cast<int>(specs.size())) return kExitRuntime;
    if (failed > 0) return kExitPartial;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    using namespace gridev;

    CLI::App app{"transportation / grid co-simulation for EV emission studies"};
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--config", g.config_path, "run configuration JSON");
    app.add_option("--out", g.out_dir, "output directory (overrides config)");
    app.add_option("--seed", g.seed, "random seed (overrides config)");
    app.add_option("--workers", g.workers, "worker threads, 0 = auto (overrides config)");

    auto* validate = app.add_subcommand("validate", "load and invariant-check every input");
    validate->fallthrough();

    auto* synth = app.add_subcommand("synth", "generate a synthetic demo bundle");
    synth->fallthrough();
    std::string synth_out = "demo_data";
    int vehicles = 1000, nodes = 50, target_trips = 0, buses = 10;
    long long synth_seed = 1;
    double peak = 240.0;
    std::vector<std::string> fuel_specs;
    synth->add_option("--out", synth_out, "bundle directory");
    synth->add_option("--vehicles", vehicles, "fleet size");
    synth->add_option("--nodes", nodes, "transport node count");
    synth->add_option("--seed", synth_seed, "generation seed");
    synth->add_option("--trips-target", target_trips, "emit exactly this many trips");
    synth->add_option("--buses", buses, "bus count of the thermal-mix case");
    synth->add_option("--peak", peak, "peak static load MW of the thermal-mix case");
    synth->add_option("--fuel", fuel_specs, "fuel capacity FUEL=MW (repeatable)");

    auto* run = app.add_subcommand("run", "run one scenario");
    run->fallthrough();
    std::string mix, weather = "mild", strategy = "trip-end";
    double penetration = 0.1;
    run->add_option("--mix", mix, "power mix label (default: first configured)");
    run->add_option("--weather", weather, "mild | hot");
    run->add_option("--penetration", penetration, "EV share of the LDV fleet, 0..1");
    run->add_option("--strategy", strategy, "trip-end | off-peak | most-likely");

    auto* sweep = app.add_subcommand("sweep", "run the full scenario matrix");
    sweep->fallthrough();
    bool details = false;
    sweep->add_flag("--details", details, "write per-scenario detail directories");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(g);
        if (synth->parsed())
            return cmd_synth(synth_out, vehicles, nodes, synth_seed, target_trips, buses, peak,
                             fuel_specs);
        if (run->parsed()) return cmd_run(g, mix, weather, penetration, strategy);
        if (sweep->parsed()) return cmd_sweep(g, details);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
