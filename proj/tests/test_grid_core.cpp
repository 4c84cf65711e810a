#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gridev/grid_io.hpp"
#include "gridev/grid_synth.hpp"

using namespace gridev;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

GridCase one_bus_case() {
    GridCase c;
    c.label = "tiny";
    c.buses.push_back({1, "b1", 30.0, -97.0, true});
    Generator g;
    g.id = 1;
    g.bus_id = 1;
    g.fuel = FuelType::natural_gas;
    g.p_max_mw = 100;
    g.cost_curve.push_back({100, 20});
    g.availability.fill(1.0);
    c.generators.push_back(g);
    StaticLoadSeries s;
    s.bus_id = 1;
    s.hourly_load_mw.fill(50.0);
    c.static_loads.push_back(s);
    return c;
}

} // namespace

TEST_CASE("minimal one-bus case parses") {
    auto path = write_temp("gridev_min_case.json", serialize_grid_case(one_bus_case()));
    GridCase c = parse_grid_case(path);
    CHECK(c.buses.size() == 1);
    CHECK(c.lines.empty());
    CHECK(c.generators.size() == 1);
    std::remove(path.c_str());
}

TEST_CASE("generator referencing a missing bus is rejected by name") {
    GridCase c = one_bus_case();
    c.generators[0].bus_id = 99;
    auto path = write_temp("gridev_bad_ref.json", serialize_grid_case(c));
    try {
        parse_grid_case(path);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        CHECK(msg.find("generator 1") != std::string::npos);
        CHECK(msg.find("99") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("schema violation names the offending field") {
    auto path = write_temp("gridev_bad_schema.json",
                           R"({"base_mva":100,"label":"x","buses":[{"id":1}],)"
                           R"("lines":[],"generators":[],"storage":[],"static_loads":[]})");
    try {
        parse_grid_case(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("name") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("bundled 10-bus demo case") {
    GridCase c = parse_grid_case(std::string(GRIDEV_DATA_DIR) + "/demo_case_2016.json");
    CHECK(c.buses.size() == 10);
    CHECK(c.lines.size() == 12);
    CHECK(c.generators.size() == 6);
    CHECK(c.label == "2016");
}

TEST_CASE("synthetic case: degenerate single-bus request") {
    GridCase c = generate_synthetic_case(1, {{FuelType::natural_gas, 100.0}}, 50.0, 7);
    CHECK(c.buses.size() == 1);
    CHECK(c.lines.empty());
    REQUIRE(c.generators.size() == 1);
    CHECK(c.generators[0].fuel == FuelType::natural_gas);
    CHECK(c.generators[0].p_max_mw == doctest::Approx(100.0));
}

TEST_CASE("synthetic case: deterministic in seed") {
    std::map<FuelType, double> mix{{FuelType::natural_gas, 120}, {FuelType::wind, 60}};
    GridCase a = generate_synthetic_case(6, mix, 100, 42);
    GridCase b = generate_synthetic_case(6, mix, 100, 42);
    CHECK(a == b);
    GridCase c = generate_synthetic_case(6, mix, 100, 43);
    CHECK_FALSE(a == c);
}

TEST_CASE("synthetic case: requested fuel shares reproduced") {
    std::map<FuelType, double> mix{{FuelType::natural_gas, 2188},
                                   {FuelType::wind, 875},
                                   {FuelType::coal, 875},
                                   {FuelType::nuclear, 438}};
    GridCase c = generate_synthetic_case(10, mix, 3254, 1);
    std::map<FuelType, double> cap;
    for (const auto& g : c.generators) cap[g.fuel] += g.p_max_mw;
    const double total = c.total_generation_capacity_mw();
    CHECK(cap[FuelType::natural_gas] / total == doctest::Approx(0.50).epsilon(0.02));
    CHECK(cap[FuelType::wind] / total == doctest::Approx(0.20).epsilon(0.02));
    CHECK(cap[FuelType::coal] / total == doctest::Approx(0.20).epsilon(0.02));
    CHECK(cap[FuelType::nuclear] / total == doctest::Approx(0.10).epsilon(0.02));
}

TEST_CASE("synthetic case: infeasible request rejected") {
    CHECK_THROWS_AS(generate_synthetic_case(3, {{FuelType::coal, 10}}, 100, 1), ValidationError);
}

TEST_CASE("synthetic cases are always servable") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::map<FuelType, double> mix{{FuelType::natural_gas, 150}, {FuelType::coal, 80}};
        GridCase c = generate_synthetic_case(4 + seed % 9, mix, 200, seed);
        CHECK(c.peak_static_load_mw() <= c.total_generation_capacity_mw() + 1e-9);
    }
}

TEST_CASE("scale_static_load") {
    GridCase c = one_bus_case();
    SUBCASE("identity") {
        CHECK(scale_static_load(c, 1.0) == c);
    }
    SUBCASE("25 percent growth") {
        GridCase c2 = c;
        for (auto& s : c2.static_loads) s.hourly_load_mw.fill(100.0);
        GridCase scaled = scale_static_load(c2, 1.25);
        for (const auto& s : scaled.static_loads)
            for (double v : s.hourly_load_mw) CHECK(v == doctest::Approx(125.0));
    }
    SUBCASE("inverse composition with dyadic factors is exact") {
        CHECK(scale_static_load(scale_static_load(c, 2.0), 0.5) == c);
    }
    SUBCASE("composition matches product factor") {
        GridCase ab = scale_static_load(scale_static_load(c, 1.3), 0.7);
        GridCase prod = scale_static_load(c, 1.3 * 0.7);
        for (std::size_t i = 0; i < ab.static_loads.size(); ++i)
            for (int h = 0; h < kHoursPerDay; ++h)
                CHECK(ab.static_loads[i].hourly_load_mw[h] ==
                      doctest::Approx(prod.static_loads[i].hourly_load_mw[h]).epsilon(1e-14));
    }
    SUBCASE("non-positive factor rejected") {
        CHECK_THROWS_AS(scale_static_load(c, 0.0), ValidationError);
        CHECK_THROWS_AS(scale_static_load(c, -1.0), ValidationError);
    }
}

TEST_CASE("serialize/parse round trip over synthetic cases") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        std::map<FuelType, double> mix{{FuelType::natural_gas, 200},
                                       {FuelType::wind, 80},
                                       {FuelType::storage, 25}};
        GridCase c = generate_synthetic_case(5 + seed % 7, mix, 150, seed);
        auto path = write_temp("gridev_rt.json", serialize_grid_case(c));
        GridCase back = parse_grid_case(path);
        CHECK(back == c);
        GridCase again = parse_grid_case(write_temp("gridev_rt.json", serialize_grid_case(back)));
        CHECK(again == back);
        std::remove(path.c_str());
    }
}

TEST_CASE("disconnected network rejected") {
    GridCase c = one_bus_case();
    c.buses.push_back({2, "b2", 30.1, -97.1, true});
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("unservable case rejected") {
    GridCase c = one_bus_case();
    c.static_loads[0].hourly_load_mw.fill(200.0);  // capacity is 100
    CHECK_THROWS_AS(c.validate(), ValidationError);
}
