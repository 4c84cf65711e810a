#include <doctest.h>

#include <filesystem>

#include "gridev/grid_io.hpp"
#include "gridev/grid_synth.hpp"
#include "gridev/opf.hpp"
#include "gridev/rng.hpp"
#include "oracle.hpp"

using namespace gridev;

namespace {

Generator make_gen(int id, int bus, FuelType fuel, double p_max, double cost,
                   double p_min = 0.0) {
    Generator g;
    g.id = id;
    g.bus_id = bus;
    g.fuel = fuel;
    g.p_min_mw = p_min;
    g.p_max_mw = p_max;
    g.cost_curve.push_back({p_max > 0 ? p_max : 1.0, cost});
    g.availability.fill(1.0);
    return g;
}

GridCase one_bus(double load, std::vector<Generator> gens) {
    GridCase c;
    c.label = "t";
    c.buses.push_back({1, "b1", 30, -97, true});
    c.generators = std::move(gens);
    StaticLoadSeries s;
    s.bus_id = 1;
    s.hourly_load_mw.fill(load);
    c.static_loads.push_back(s);
    c.validate();
    return c;
}

HourlyDemand demand_at(int hour, std::map<int, double> loads) {
    HourlyDemand d;
    d.hour = hour;
    d.load_mw_by_bus = std::move(loads);
    return d;
}

std::vector<HourlyDemand> static_demands(const GridCase& c) {
    std::vector<HourlyDemand> out;
    for (int h = 0; h < kHoursPerDay; ++h) {
        HourlyDemand d;
        d.hour = h;
        for (const auto& s : c.static_loads) d.load_mw_by_bus[s.bus_id] = s.hourly_load_mw[h];
        out.push_back(d);
    }
    return out;
}

} // namespace

TEST_CASE("single generator balances a single bus") {
    GridCase c = one_bus(50, {make_gen(1, 1, FuelType::natural_gas, 100, 20)});
    auto r = solve_hour(c, demand_at(0, {{1, 50}}));
    CHECK(r.p_gen_mw.at(1) == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(r.objective_cost == doctest::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("two generators dispatch in merit order") {
    GridCase c = one_bus(150, {make_gen(1, 1, FuelType::natural_gas, 100, 30),
                               make_gen(2, 1, FuelType::coal, 100, 25)});
    auto r = solve_hour(c, demand_at(0, {{1, 150}}));
    CHECK(r.p_gen_mw.at(2) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(r.p_gen_mw.at(1) == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(r.objective_cost == doctest::Approx(4000.0).epsilon(1e-9));
    CHECK(r.system_lambda == doctest::Approx(30.0));
}

TEST_CASE("congested line forces expensive local generation") {
    GridCase c;
    c.label = "cong";
    c.buses.push_back({1, "A", 30, -97, true});
    c.buses.push_back({2, "B", 30.2, -97.2, true});
    c.lines.push_back({1, 2, 10.0, 40.0});
    c.generators.push_back(make_gen(1, 1, FuelType::coal, 100, 10));
    c.generators.push_back(make_gen(2, 2, FuelType::natural_gas, 100, 50));
    StaticLoadSeries s;
    s.bus_id = 2;
    s.hourly_load_mw.fill(60.0);
    c.static_loads.push_back(s);
    c.validate();

    auto r = solve_hour(c, demand_at(0, {{2, 60}}));
    CHECK(r.p_gen_mw.at(1) == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(r.p_gen_mw.at(2) == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(r.line_flow_mw.at(0) == doctest::Approx(40.0).epsilon(1e-9));

    // cross-check objective against exhaustive vertex enumeration
    auto oc = oracle::enumerate_lp(oracle::build_opf_problem(c, 0, {{2, 60.0}}));
    REQUIRE(oc.feasible);
    CHECK(r.objective_cost == doctest::Approx(oc.objective).epsilon(1e-6));
}

TEST_CASE("equal-cost tie broken by ascending generator id") {
    GridCase c = one_bus(150, {make_gen(7, 1, FuelType::natural_gas, 100, 20),
                               make_gen(3, 1, FuelType::natural_gas, 100, 20)});
    auto r = solve_hour(c, demand_at(0, {{1, 150}}));
    CHECK(r.p_gen_mw.at(3) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(r.p_gen_mw.at(7) == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("infeasible hour reports shortfall") {
    GridCase c = one_bus(50, {make_gen(1, 1, FuelType::natural_gas, 100, 20)});
    try {
        solve_hour(c, demand_at(5, {{1, 130}}));
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.hour == 5);
        CHECK(e.shortfall_mw == doctest::Approx(30.0).epsilon(1e-6));
    }
}

TEST_CASE("availability caps generation") {
    GridCase c = one_bus(10, {make_gen(1, 1, FuelType::wind, 100, 0),
                              make_gen(2, 1, FuelType::natural_gas, 100, 30)});
    c.generators[0].availability.fill(0.25);
    auto r = solve_hour(c, demand_at(0, {{1, 60}}));
    CHECK(r.p_gen_mw.at(1) == doctest::Approx(25.0).epsilon(1e-9));
    CHECK(r.p_gen_mw.at(2) == doctest::Approx(35.0).epsilon(1e-9));
}

TEST_CASE("forced minimum output respected") {
    GridCase c = one_bus(10, {make_gen(1, 1, FuelType::coal, 100, 40, 30),
                              make_gen(2, 1, FuelType::natural_gas, 100, 10)});
    auto r = solve_hour(c, demand_at(0, {{1, 80}}));
    CHECK(r.p_gen_mw.at(1) == doctest::Approx(30.0).epsilon(1e-9));  // held at p_min
    CHECK(r.p_gen_mw.at(2) == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("solve_day: identical hours give identical results without storage") {
    GridCase c = one_bus(50, {make_gen(1, 1, FuelType::natural_gas, 100, 20)});
    auto day = solve_day(c, static_demands(c));
    REQUIRE(day.hours.size() == 24);
    for (const auto& r : day.hours) {
        CHECK(r.p_gen_mw.at(1) == doctest::Approx(day.hours[0].p_gen_mw.at(1)));
        CHECK(r.objective_cost == doctest::Approx(day.hours[0].objective_cost));
    }
    CHECK(day.total_cost == doctest::Approx(24 * 1000.0));
    CHECK(day.generation_by_fuel_mwh.at(FuelType::natural_gas) == doctest::Approx(24 * 50.0));
}

TEST_CASE("solve_day: zero load dispatches nothing") {
    GridCase c = one_bus(0, {make_gen(1, 1, FuelType::natural_gas, 100, 20)});
    auto day = solve_day(c, static_demands(c));
    CHECK(day.total_cost == doctest::Approx(0.0));
    for (const auto& r : day.hours) CHECK(r.p_gen_mw.at(1) == doctest::Approx(0.0));
}

TEST_CASE("copper plate equals merit-order stacking") {
    SplitMix64 rng(77);
    for (int iter = 0; iter < 25; ++iter) {
        int n_bus = 2 + static_cast<int>(rng.next() % 3);
        GridCase c;
        c.label = "cp";
        for (int i = 0; i < n_bus; ++i) c.buses.push_back({i + 1, "b", 30.0 + 0.01 * i, -97.0, true});
        for (int i = 0; i + 1 < n_bus; ++i)
            c.lines.push_back({i + 1, i + 2, 8.0, lp::kInf});  // uncongested
        int n_gen = 2 + static_cast<int>(rng.next() % 3);
        double cap_total = 0;
        for (int g = 0; g < n_gen; ++g) {
            double cap = std::floor(rng.uniform(20, 120));
            double cost = std::floor(rng.uniform(1, 8)) * 5.0;  // coarse grid to create ties
            int bus = 1 + static_cast<int>(rng.next() % n_bus);
            c.generators.push_back(make_gen(g + 1, bus, FuelType::natural_gas, cap, cost));
            cap_total += cap;
        }
        double load = std::floor(rng.uniform(0.0, cap_total));
        StaticLoadSeries s;
        s.bus_id = 1;
        s.hourly_load_mw.fill(load);
        c.static_loads.push_back(s);
        c.validate();

        auto r = solve_hour(c, demand_at(0, {{1, load}}));
        auto m = oracle::merit_order_dispatch(c, 0, load);
        REQUIRE(m.feasible);
        for (const auto& [gid, p] : m.p_by_gen)
            CHECK(r.p_gen_mw.at(gid) == doctest::Approx(p).epsilon(1e-12).scale(1.0));
        CHECK(r.objective_cost == doctest::Approx(m.cost).epsilon(1e-9));
    }
}

TEST_CASE("random small cases match vertex enumeration") {
    SplitMix64 rng(2024);
    int done = 0;
    for (int iter = 0; iter < 40; ++iter) {
        int n_bus = 1 + static_cast<int>(rng.next() % 3);
        GridCase c;
        c.label = "rand";
        for (int i = 0; i < n_bus; ++i) c.buses.push_back({i + 1, "b", 30.0 + 0.01 * i, -97.0, true});
        for (int i = 0; i + 1 < n_bus; ++i)
            c.lines.push_back({i + 1, i + 2, rng.uniform(5, 15), std::floor(rng.uniform(10, 80))});
        int n_gen = 1 + static_cast<int>(rng.next() % 3);
        std::map<int, double> loads;
        double cap_total = 0;
        for (int g = 0; g < n_gen; ++g) {
            double cap = std::floor(rng.uniform(20, 100));
            c.generators.push_back(make_gen(g + 1, 1 + static_cast<int>(rng.next() % n_bus),
                                            FuelType::natural_gas, cap,
                                            std::floor(rng.uniform(5, 50))));
            cap_total += cap;
        }
        double load = std::floor(rng.uniform(0, cap_total * 0.9));
        loads[1 + static_cast<int>(rng.next() % n_bus)] = load;
        StaticLoadSeries s;
        s.bus_id = 1;
        s.hourly_load_mw.fill(0.0);
        c.static_loads.push_back(s);
        c.validate();

        HourlyDemand d;
        d.hour = 0;
        d.load_mw_by_bus = loads;
        auto ref = oracle::enumerate_lp(oracle::build_opf_problem(c, 0, loads));
        try {
            auto r = solve_hour(c, d);
            REQUIRE(ref.feasible);
            CHECK(std::abs(r.objective_cost - ref.objective) <=
                  1e-6 * std::max(1.0, std::abs(ref.objective)));
            auto res = dispatch_residuals(c, d, r);
            CHECK(res.balance <= 1e-6 * std::max(1.0, load));
            CHECK(res.gen_bounds <= 1e-9);
            CHECK(res.line <= 1e-9);
            ++done;
        } catch (const InfeasibleError&) {
            CHECK_FALSE(ref.feasible);
        }
    }
    CHECK(done > 15);
}

TEST_CASE("demo case dispatches fuels in merit order") {
    GridCase c = parse_grid_case(std::string(GRIDEV_DATA_DIR) + "/demo_case_2016.json");
    auto day = solve_day(c, static_demands(c));
    // the demo grid is uncongested, so each hour must match merit-order
    // stacking: wind ahead of gas, gas ahead of coal wherever slack exists
    std::map<FuelType, double> merit_by_fuel;
    for (int h = 0; h < kHoursPerDay; ++h) {
        auto m = oracle::merit_order_dispatch(c, h, c.total_static_load_mw(h));
        REQUIRE(m.feasible);
        for (const auto& g : c.generators) merit_by_fuel[g.fuel] += m.p_by_gen.at(g.id);
    }
    for (const auto& [fuel, mwh] : merit_by_fuel)
        CHECK(day.generation_by_fuel_mwh.at(fuel) == doctest::Approx(mwh).epsilon(1e-6));
    // nuclear and wind (cheapest) run whenever available; coal beats gas on cost
    CHECK(day.generation_by_fuel_mwh.at(FuelType::wind) > 0);
    CHECK(day.generation_by_fuel_mwh.at(FuelType::coal) > 0);
}

TEST_CASE("generation_by_fuel follows the same arithmetic path as the hourly maps") {
    GridCase c = parse_grid_case(std::string(GRIDEV_DATA_DIR) + "/demo_case_2016.json");
    auto day = solve_day(c, static_demands(c));
    std::map<FuelType, double> recomputed;
    for (const auto& r : day.hours)
        for (const auto& [fuel, mwh] : r.gen_by_fuel_mwh) recomputed[fuel] += mwh;
    CHECK(recomputed == day.generation_by_fuel_mwh);  // bitwise, not approximate
}

TEST_CASE("monotone cost in load") {
    GridCase c = one_bus(10, {make_gen(1, 1, FuelType::coal, 80, 25),
                              make_gen(2, 1, FuelType::natural_gas, 80, 32)});
    double prev = -1;
    for (double load = 0; load <= 150; load += 10) {
        auto r = solve_hour(c, demand_at(0, {{1, load}}));
        CHECK(r.objective_cost >= prev - 1e-9);
        prev = r.objective_cost;
    }
}

TEST_CASE("storage charges off-peak and discharges on-peak") {
    GridCase c;
    c.label = "sto";
    c.buses.push_back({1, "b1", 30, -97, true});
    c.generators.push_back(make_gen(1, 1, FuelType::coal, 60, 10));
    c.generators.push_back(make_gen(2, 1, FuelType::natural_gas, 100, 50));
    StorageUnit u;
    u.id = 1;
    u.bus_id = 1;
    u.power_limit_mw = 10;
    u.energy_capacity_mwh = 40;
    u.round_trip_efficiency = 0.9;
    u.initial_soc_mwh = 0;
    c.storage_units.push_back(u);
    StaticLoadSeries s;
    s.bus_id = 1;
    for (int h = 0; h < 24; ++h) s.hourly_load_mw[h] = (h < 12) ? 50.0 : 100.0;
    c.static_loads.push_back(s);
    c.validate();

    auto day = solve_day(c, static_demands(c));
    double charged = 0, discharged = 0;
    for (int h = 0; h < 24; ++h) {
        const auto& r = day.hours[h];
        if (h < 12) {
            CHECK(r.storage_discharge_mw.at(1) == doctest::Approx(0.0));
            charged += r.storage_charge_mw.at(1);
        } else {
            CHECK(r.storage_charge_mw.at(1) == doctest::Approx(0.0));
            discharged += r.storage_discharge_mw.at(1);
        }
        CHECK(r.storage_soc_mwh.at(1) >= -1e-9);
        CHECK(r.storage_soc_mwh.at(1) <= u.energy_capacity_mwh + 1e-9);
    }
    CHECK(charged > 0);
    CHECK(discharged == doctest::Approx(charged * u.round_trip_efficiency).epsilon(1e-6));

    GridCase no_sto = c;
    no_sto.storage_units.clear();
    auto base = solve_day(no_sto, static_demands(no_sto));
    CHECK(day.total_cost < base.total_cost);
}

TEST_CASE("marginal generation") {
    GridCase c = one_bus(50, {make_gen(1, 1, FuelType::natural_gas, 100, 20)});
    auto base = solve_day(c, static_demands(c));

    SUBCASE("identical dispatches give zero deltas") {
        auto d = marginal_generation(base, base);
        for (const auto& [fuel, hours] : d)
            for (double v : hours) CHECK(v == doctest::Approx(0.0));
    }
    SUBCASE("flat extra load lands on the only fuel") {
        auto demands = static_demands(c);
        for (auto& d : demands) d.load_mw_by_bus[1] += 10.0;
        auto with_ev = solve_day(c, demands);
        auto delta = marginal_generation(base, with_ev);
        for (int h = 0; h < 24; ++h)
            CHECK(delta.at(FuelType::natural_gas)[h] == doctest::Approx(10.0).epsilon(1e-9));
    }
    SUBCASE("mismatched labels rejected") {
        DayDispatch other = base;
        other.case_label = "different";
        CHECK_THROWS_AS(marginal_generation(base, other), ValidationError);
    }
}

TEST_CASE("dispatch export lists every generator and hour") {
    GridCase c = one_bus(50, {make_gen(1, 1, FuelType::natural_gas, 100, 20),
                              make_gen(2, 1, FuelType::coal, 50, 25)});
    auto day = solve_day(c, static_demands(c));
    auto path = (std::filesystem::temp_directory_path() / "gridev_dispatch.csv").string();
    write_dispatch_csv(c, day, path);
    auto table = read_csv(path);
    CHECK(table.rows.size() == 24 * 2);
    CHECK(table.header == std::vector<std::string>{"hour", "generator_id", "fuel", "p_mw"});
    std::remove(path.c_str());
}
