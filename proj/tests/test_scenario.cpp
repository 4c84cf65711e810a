#include <doctest.h>

#include "gridev/data_gen.hpp"
#include "gridev/scenario.hpp"

using namespace gridev;

namespace {

// Small shared dataset on the bundled demo grid with a compact fleet.
SharedData small_shared(int vehicles = 250, std::uint64_t seed = 3) {
    SharedData d;
    d.cases.emplace("2016", make_demo_case_2016());
    d.cases.emplace("2030", make_demo_case_2030());
    d.trips = generate_synthetic_trips(vehicles, 40, seed);
    d.node_coords = synthetic_node_coords(40, seed);
    d.energy_rates = default_energy_rates();
    d.onroad_rates = default_onroad_rates();
    d.egu_rates = default_egu_rates();
    return d;
}

ScenarioSpec spec_of(Weather w, const std::string& mix, double pen, Strategy s,
                     std::uint64_t seed = 1) {
    return ScenarioSpec{w, mix, pen, s, seed};
}

bool same_dispatch(const DayDispatch& a, const DayDispatch& b) {
    if (a.total_cost != b.total_cost) return false;
    for (int h = 0; h < kHoursPerDay; ++h)
        if (a.hours[h].p_gen_mw != b.hours[h].p_gen_mw) return false;
    return a.generation_by_fuel_mwh == b.generation_by_fuel_mwh;
}

} // namespace

TEST_CASE("penetration zero gives exactly zero deltas") {
    auto shared = small_shared();
    auto r = run_scenario(spec_of(Weather::mild, "2016", 0.0, Strategy::trip_end), shared);
    CHECK(r.ev_energy_mwh == 0.0);
    CHECK_FALSE(r.has_marginal_rates);
    for (const auto& d : r.deltas) {
        CHECK(d.grams == 0.0);
        CHECK(d.pct == 0.0);
    }
    for (const auto& [fuel, hours] : r.marginal_generation_mwh)
        for (double v : hours) CHECK(v == 0.0);
}

TEST_CASE("scenario runs are deterministic") {
    auto shared = small_shared();
    auto spec = spec_of(Weather::hot, "2016", 0.15, Strategy::most_likely, 11);
    auto a = run_scenario(spec, shared);
    auto b = run_scenario(spec, shared);
    CHECK(a.ev_energy_mwh == b.ev_energy_mwh);
    CHECK(same_dispatch(a.day_dispatch, b.day_dispatch));
    CHECK(a.inventory.grams_by_source == b.inventory.grams_by_source);
    CHECK(a.marginal_egu_rates == b.marginal_egu_rates);
}

TEST_CASE("baseline reuse equals a penetration-zero scenario run") {
    auto shared = small_shared();
    for (Weather w : {Weather::mild, Weather::hot}) {
        auto baseline = compute_baseline(shared, w, "2016", 1);
        auto r = run_scenario(spec_of(w, "2016", 0.0, Strategy::trip_end), shared, baseline);
        CHECK(same_dispatch(baseline.dispatch, r.day_dispatch));
        CHECK(r.inventory.grams_by_source == baseline.inventory.grams_by_source);
    }
}

TEST_CASE("hot weather scales static load by the configured factor") {
    auto shared = small_shared();
    auto mild = compute_baseline(shared, Weather::mild, "2016", 1);
    auto hot = compute_baseline(shared, Weather::hot, "2016", 1);
    for (int h = 0; h < kHoursPerDay; ++h)
        CHECK(hot.prepared_case.total_static_load_mw(h) ==
              doctest::Approx(1.25 * mild.prepared_case.total_static_load_mw(h)).epsilon(1e-12));
}

TEST_CASE("cross-strategy EV energy is identical within a cell") {
    auto shared = small_shared();
    for (Weather w : {Weather::mild, Weather::hot}) {
        auto baseline = compute_baseline(shared, w, "2016", 7);
        double e_te =
            run_scenario(spec_of(w, "2016", 0.2, Strategy::trip_end, 7), shared, baseline).ev_energy_mwh;
        double e_op =
            run_scenario(spec_of(w, "2016", 0.2, Strategy::off_peak, 7), shared, baseline).ev_energy_mwh;
        double e_ml = run_scenario(spec_of(w, "2016", 0.2, Strategy::most_likely, 7), shared, baseline)
                          .ev_energy_mwh;
        CHECK(std::abs(e_te - e_op) < 1e-6);
        CHECK(std::abs(e_te - e_ml) < 1e-6);
    }
}

TEST_CASE("marginal generation balances delivered EV energy on the storage-free case") {
    auto shared = small_shared();
    auto baseline = compute_baseline(shared, Weather::mild, "2016", 3);
    auto r = run_scenario(spec_of(Weather::mild, "2016", 0.2, Strategy::trip_end, 3), shared, baseline);
    REQUIRE(r.ev_energy_mwh > 0.0);
    double total_delta = 0.0;
    for (const auto& [fuel, total] : fuel_delta_totals(r.marginal_generation_mwh)) total_delta += total;
    CHECK(total_delta == doctest::Approx(r.ev_energy_mwh).epsilon(1e-6));
}

TEST_CASE("EV share of total demand sits in the plausibility band") {
    auto shared = small_shared(2000, 5);
    auto baseline = compute_baseline(shared, Weather::hot, "2016", 5);
    auto r = run_scenario(spec_of(Weather::hot, "2016", 0.2, Strategy::trip_end, 5), shared, baseline);
    double static_mwh = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) static_mwh += r.hourly_static_mw[h];
    const double share = r.ev_energy_mwh / (static_mwh + r.ev_energy_mwh);
    // synthetic desk-scale fleet: orders of magnitude, not the study's 1.5-6%
    CHECK(share > 0.0002);
    CHECK(share < 0.05);
}

TEST_CASE("CO2 reduction grows with penetration on the favorable case") {
    auto shared = small_shared(500, 9);
    auto baseline = compute_baseline(shared, Weather::mild, "2016", 9);
    double prev = -1e9;
    for (double p : {0.05, 0.10, 0.15, 0.20}) {
        auto r = run_scenario(spec_of(Weather::mild, "2016", p, Strategy::trip_end, 9), shared,
                              baseline);
        const double reduction = -r.deltas[static_cast<int>(Pollutant::CO2)].pct;
        CHECK(reduction >= prev - 1e-9);
        CHECK(reduction > 0.0);
        prev = reduction;
    }
}

TEST_CASE("total CO2 direction follows the marginal-rate inequality") {
    // one-bus case, flat static load, single thermal fuel at the margin
    auto make_case = [] {
        GridCase c;
        c.label = "dir";
        c.buses.push_back({1, "b", 30.275, -97.75, true});
        Generator g;
        g.id = 1;
        g.bus_id = 1;
        g.fuel = FuelType::natural_gas;
        g.p_max_mw = 400;
        g.cost_curve.push_back({400, 25});
        g.availability.fill(1.0);
        c.generators.push_back(g);
        StaticLoadSeries s;
        s.bus_id = 1;
        s.hourly_load_mw.fill(100.0);
        c.static_loads.push_back(s);
        c.validate();
        return c;
    };
    SharedData shared;
    shared.cases.emplace("dir", make_case());
    shared.trips = generate_synthetic_trips(500, 10, 4, [] {
        SynthTripOptions o;
        o.hdv_share = 0.0;
        return o;
    }());
    shared.node_coords = synthetic_node_coords(10, 4);
    shared.energy_rates = default_energy_rates();
    shared.onroad_rates = default_onroad_rates();  // LDV CO2 ~380-570 g/mi

    // clean margin: ~0.3 kWh/mi x 420 g/kWh ~ 130 g/mi < on-road rate
    shared.egu_rates = default_egu_rates();
    auto base = compute_baseline(shared, Weather::mild, "dir", 4);
    auto clean = run_scenario(spec_of(Weather::mild, "dir", 0.5, Strategy::trip_end, 4), shared, base);
    CHECK(clean.deltas[static_cast<int>(Pollutant::CO2)].grams < 0.0);

    // dirty margin: 2,500,000 g/MWh x 0.3 kWh/mi = 750 g/mi > on-road rate
    EguRateTable dirty;
    dirty.set(FuelType::natural_gas, Pollutant::CO2, 2500000.0);
    shared.egu_rates = dirty;
    auto base2 = compute_baseline(shared, Weather::mild, "dir", 4);
    auto worse = run_scenario(spec_of(Weather::mild, "dir", 0.5, Strategy::trip_end, 4), shared, base2);
    CHECK(worse.deltas[static_cast<int>(Pollutant::CO2)].grams > 0.0);
}

TEST_CASE("run_matrix covers the full default factorial") {
    auto shared = small_shared(150, 2);
    auto specs = make_matrix_specs({Weather::mild, Weather::hot}, {"2016", "2030"},
                                   {0.05, 0.10, 0.15, 0.20},
                                   {Strategy::trip_end, Strategy::off_peak, Strategy::most_likely}, 2);
    REQUIRE(specs.size() == 48);
    auto matrix = run_matrix(specs, shared, 2);
    CHECK(matrix.outcomes.size() == 48);
    CHECK(matrix.baselines.size() == 4);
    CHECK(matrix.failures() == 0);
    // ordering follows request order, not completion order
    for (std::size_t i = 0; i < specs.size(); ++i) CHECK(matrix.outcomes[i].spec.tag() == specs[i].tag());
}

TEST_CASE("run_matrix: singleton list") {
    auto shared = small_shared(100, 6);
    auto matrix = run_matrix({spec_of(Weather::mild, "2016", 0.1, Strategy::off_peak, 6)}, shared, 1);
    CHECK(matrix.outcomes.size() == 1);
    REQUIRE(matrix.outcomes[0].result.has_value());
}

TEST_CASE("run_matrix isolates scenario failures") {
    auto shared = small_shared(100, 6);
    std::vector<ScenarioSpec> specs{spec_of(Weather::mild, "2016", 0.1, Strategy::trip_end, 6),
                                    spec_of(Weather::mild, "nope", 0.1, Strategy::trip_end, 6),
                                    spec_of(Weather::mild, "2030", 0.1, Strategy::trip_end, 6)};
    auto matrix = run_matrix(specs, shared, 2);
    CHECK(matrix.failures() == 1);
    CHECK(matrix.outcomes[0].result.has_value());
    CHECK_FALSE(matrix.outcomes[1].result.has_value());
    CHECK(matrix.outcomes[1].error.find("nope") != std::string::npos);
    CHECK(matrix.outcomes[2].result.has_value());
}

TEST_CASE("worker count does not change results") {
    auto shared = small_shared(120, 8);
    auto specs = make_matrix_specs({Weather::mild}, {"2016"}, {0.1, 0.2},
                                   {Strategy::trip_end, Strategy::most_likely}, 8);
    auto serial = run_matrix(specs, shared, 1);
    auto parallel = run_matrix(specs, shared, 4);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        REQUIRE(serial.outcomes[i].result.has_value());
        REQUIRE(parallel.outcomes[i].result.has_value());
        CHECK(serial.outcomes[i].result->ev_energy_mwh == parallel.outcomes[i].result->ev_energy_mwh);
        CHECK(same_dispatch(serial.outcomes[i].result->day_dispatch,
                            parallel.outcomes[i].result->day_dispatch));
    }
}

TEST_CASE("scenario tags are stable and parseable") {
    auto s = spec_of(Weather::hot, "2030", 0.15, Strategy::most_likely);
    CHECK(s.tag() == "2030_hot_p15_most-likely");
    CHECK(spec_of(Weather::mild, "2016", 0.05, Strategy::trip_end).tag() == "2016_mild_p5_trip-end");
}
