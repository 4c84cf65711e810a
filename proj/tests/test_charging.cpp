#include <doctest.h>

#include <filesystem>
#include <set>

#include "gridev/charging.hpp"
#include "gridev/data_gen.hpp"
#include "gridev/transport_synth.hpp"

using namespace gridev;

namespace {

EnergyRateTable flat_rates(double rate) {
    EnergyRateTable t;
    for (RangeClass cls : kAllRangeClasses)
        for (int b = 0; b < EnergyRateTable::kNumBins; ++b)
            t.set(cls, b * EnergyRateTable::kBinWidth, rate);
    return t;
}

TripRecord one_link_trip(long long trip_id, long long vid, int from, int to, double miles,
                         double mph, double enter_min, bool home = false) {
    TripRecord t;
    t.trip_id = trip_id;
    t.vehicle_id = vid;
    t.vehicle_class = VehicleClass::LDV;
    t.links.push_back({trip_id * 10, from, to, miles, mph, enter_min});
    t.end_node = to;
    t.ends_at_home = home;
    return t;
}

EvAssignment all_ev(const std::vector<TripRecord>& trips, RangeClass cls, double cap_kwh) {
    EvAssignment a;
    a.penetration = 1.0;
    for (const auto& t : trips) {
        bool ldv = t.vehicle_class == VehicleClass::LDV;
        a.by_vehicle[t.vehicle_id] = EvInfo{ldv, cls, ldv ? cap_kwh : 0.0};
    }
    return a;
}

double oracle_fleet_energy(const std::vector<TripRecord>& trips, const EvAssignment& a,
                           const EnergyRateTable& rates, bool hot) {
    // independent accumulation for conservation checks
    double total = 0.0;
    for (const auto& t : trips) {
        if (t.vehicle_class != VehicleClass::LDV || !a.is_ev(t.vehicle_id)) continue;
        for (const auto& l : t.links) {
            total += l.length_miles * rates.rate(a.info(t.vehicle_id).range_class, l.avg_speed_mph);
            if (hot) total += rates.ac_aux_kw * l.length_miles / l.avg_speed_mph;
        }
    }
    return total;
}

} // namespace

TEST_CASE("trip-end: zero EVs give an empty profile") {
    auto trips = generate_synthetic_trips(20, 8, 2);
    EvAssignment none;
    none.penetration = 0.0;
    for (const auto& t : trips) none.by_vehicle[t.vehicle_id] = EvInfo{};
    auto p = trip_end_profile(trips, none, flat_rates(0.3), false);
    CHECK(p.kwh.empty());
    CHECK(p.total_kwh() == 0.0);
}

TEST_CASE("trip-end: single trip lands in its end-hour bucket") {
    // 10 miles at 30 mph entering 17:20 ends 17:40 at node 9
    auto trip = one_link_trip(1, 1, 2, 9, 10.0, 30.0, 17 * 60 + 20);
    auto a = all_ev({trip}, RangeClass::R200, 60.0);
    auto p = trip_end_profile({trip}, a, flat_rates(0.30), false);
    CHECK(p.at(9, 17) == doctest::Approx(3.0));
    CHECK(p.kwh.size() == 1);
}

TEST_CASE("trip-end: bundled fleet profile conserves energy and lands on end hours") {
    auto trips = parse_trips(std::string(GRIDEV_DATA_DIR) + "/trips.csv");
    RangeConfig ranges;
    auto a = assign_evs(trips, 0.20, ranges, 5);
    auto rates = flat_rates(0.31);
    std::set<std::pair<int, int>> end_buckets;
    for (const auto& t : trips)
        if (a.is_ev(t.vehicle_id)) end_buckets.insert({t.end_node, t.end_hour()});
    for (bool hot : {false, true}) {
        auto p = trip_end_profile(trips, a, rates, hot);
        CHECK(std::abs(p.total_kwh() - oracle_fleet_energy(trips, a, rates, hot)) < 1e-9);
        for (const auto& [key, e] : p.kwh) CHECK(end_buckets.count(key) == 1);
    }
}

TEST_CASE("trip-end: assignment must cover every vehicle") {
    auto trip = one_link_trip(1, 42, 0, 1, 5, 30, 600);
    EvAssignment partial;
    CHECK_THROWS_AS(trip_end_profile({trip}, partial, flat_rates(0.3), false), ValidationError);
}

TEST_CASE("off-peak: fixed point when nothing lands in the peak window") {
    NodeChargingProfile p;
    p.add(3, 9, 12.0);
    p.add(4, 22, 5.0);
    auto out = off_peak_profile(p, BehaviorParams{});
    CHECK(out.kwh == p.kwh);
}

TEST_CASE("off-peak: peak energy spreads uniformly over the six off-peak hours") {
    NodeChargingProfile p;
    p.add(4, 15, 60.0);
    auto out = off_peak_profile(p, BehaviorParams{});
    for (int h : {22, 23, 0, 1, 2, 3}) CHECK(out.at(4, h) == doctest::Approx(10.0));
    CHECK(out.at(4, 15) == 0.0);
    CHECK(out.kwh.size() == 6);
}

TEST_CASE("off-peak: conservation and window emptiness") {
    SplitMix64 rng(17);
    for (int iter = 0; iter < 20; ++iter) {
        NodeChargingProfile p;
        for (int i = 0; i < 40; ++i)
            p.add(static_cast<int>(rng.uniform_int(0, 6)), static_cast<int>(rng.uniform_int(0, 23)),
                  rng.uniform(0.0, 30.0));
        auto out = off_peak_profile(p, BehaviorParams{});
        CHECK(out.total_kwh() == doctest::Approx(p.total_kwh()).epsilon(1e-12));
        for (const auto& [key, e] : out.kwh) {
            CHECK((key.second < 14 || key.second >= 20));
            CHECK(e >= 0.0);
        }
    }
}

TEST_CASE("most-likely: single short trip charges only at home from the arrival hour") {
    auto trip = one_link_trip(1, 1, 3, 7, 10.0, 30.0, 18 * 60, true);
    auto a = all_ev({trip}, RangeClass::R300, 90.0);
    NodeChargingProfile profile;
    auto events = simulate_most_likely_events({trip}, a, flat_rates(0.30), BehaviorParams{}, false,
                                              7, &profile);
    REQUIRE(events.size() == 1);
    CHECK(events[0].charger_power_kw == doctest::Approx(7.2));
    CHECK(events[0].node == 7);
    CHECK(events[0].start_hour == 18);
    CHECK(events[0].energy_kwh == doctest::Approx(3.0));
    CHECK(profile.total_kwh() == doctest::Approx(3.0));
    // 18:20 arrival: 3 kWh at 7.2 kW runs 25 min, all inside hour 18
    CHECK(profile.at(7, 18) == doctest::Approx(3.0));
}

TEST_CASE("most-likely: forced low battery triggers exactly one public charge") {
    // R100 (24 kWh): trip one burns 20 kWh, leaving less than any threshold
    // plus the 6 kWh second trip
    auto t1 = one_link_trip(1, 1, 0, 5, 40.0, 40.0, 8 * 60);
    t1.links[0].length_miles = 40.0;
    auto t2 = one_link_trip(2, 1, 5, 0, 12.0, 30.0, 14 * 60, true);
    EnergyRateTable rates = flat_rates(0.50);
    auto a = all_ev({t1, t2}, RangeClass::R100, 24.0);
    NodeChargingProfile profile;
    auto events =
        simulate_most_likely_events({t1, t2}, a, rates, BehaviorParams{}, false, 3, &profile);
    int public_events = 0;
    for (const auto& e : events)
        if (e.charger_power_kw == doctest::Approx(50.0)) {
            ++public_events;
            CHECK(e.node == 5);  // the intermediate stop
        }
    CHECK(public_events == 1);
    // everything consumed comes back within the day
    CHECK(profile.total_kwh() == doctest::Approx(0.5 * 52.0).epsilon(1e-9));
}

TEST_CASE("most-likely: infeasible trip reported with the vehicle id") {
    auto trip = one_link_trip(1, 99, 0, 1, 80.0, 40.0, 600, true);  // 40 kWh > 24 kWh pack
    auto a = all_ev({trip}, RangeClass::R100, 24.0);
    try {
        most_likely_profile({trip}, a, flat_rates(0.50), BehaviorParams{}, false, 1);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("99") != std::string::npos);
    }
}

TEST_CASE("most-likely: home charging wraps past midnight onto the same day") {
    auto trip = one_link_trip(1, 1, 2, 4, 20.0, 40.0, 23 * 60 + 20, true);  // ends 23:50
    auto a = all_ev({trip}, RangeClass::R200, 60.0);
    auto p = most_likely_profile({trip}, a, flat_rates(0.30), BehaviorParams{}, false, 1);
    // 6 kWh at 7.2 kW = 50 min from 23:50: 10 min in hour 23, rest wraps to hour 0
    CHECK(p.at(4, 23) == doctest::Approx(7.2 / 6.0));
    CHECK(p.at(4, 0) == doctest::Approx(6.0 - 7.2 / 6.0));
    CHECK(p.total_kwh() == doctest::Approx(6.0));
}

TEST_CASE("fleet-level conservation across all three strategies") {
    auto trips = generate_synthetic_trips(400, 30, 13);
    RangeConfig ranges;
    auto a = assign_evs(trips, 0.30, ranges, 21);
    auto rates = flat_rates(0.30);
    BehaviorParams params;
    for (bool hot : {false, true}) {
        auto te = trip_end_profile(trips, a, rates, hot);
        auto op = off_peak_profile(te, params);
        auto ml = most_likely_profile(trips, a, rates, params, hot, 21);
        CHECK(std::abs(te.total_kwh() - op.total_kwh()) < 1e-6);
        CHECK(std::abs(te.total_kwh() - ml.total_kwh()) < 1e-6);
    }
}

TEST_CASE("profiles grow monotonically with penetration") {
    auto trips = generate_synthetic_trips(200, 15, 31);
    RangeConfig ranges;
    auto rates = flat_rates(0.30);
    BehaviorParams params;
    for (Strategy s : {Strategy::trip_end, Strategy::off_peak, Strategy::most_likely}) {
        NodeChargingProfile prev;
        for (double pen : {0.1, 0.2, 0.4, 0.8}) {
            auto a = assign_evs(trips, pen, ranges, 77);
            auto p = charging_profile(s, trips, a, rates, params, false, 77);
            for (const auto& [key, e] : prev.kwh) CHECK(p.at(key.first, key.second) >= e - 1e-12);
            prev = std::move(p);
        }
    }
}

TEST_CASE("most-likely peak lands in the evening/overnight window for the default fleet") {
    auto trips = generate_synthetic_trips(800, 40, 5);
    RangeConfig ranges;
    auto a = assign_evs(trips, 0.5, ranges, 5);
    auto p = most_likely_profile(trips, a, default_energy_rates(), BehaviorParams{}, false, 5);
    std::array<double, kHoursPerDay> by_hour{};
    for (const auto& [key, e] : p.kwh) by_hour[key.second] += e;
    int peak_hour = 0;
    for (int h = 0; h < kHoursPerDay; ++h)
        if (by_hour[h] > by_hour[peak_hour]) peak_hour = h;
    CHECK((peak_hour >= 19 || peak_hour <= 4));
}

TEST_CASE("profile_to_mw divides buckets by 1000") {
    NodeChargingProfile p;
    p.add(2, 7, 500.0);
    auto mw = profile_to_mw(p);
    CHECK(mw.at({2, 7}) == doctest::Approx(0.5));
    CHECK(profile_to_mw(NodeChargingProfile{}).empty());
}

TEST_CASE("profile CSV round trip") {
    NodeChargingProfile p;
    p.add(1, 3, 4.25);
    p.add(9, 17, 0.125);
    auto path = (std::filesystem::temp_directory_path() / "gridev_profile.csv").string();
    write_profile_csv(p, path);
    auto back = read_profile_csv(path);
    CHECK(back.kwh == p.kwh);
    std::remove(path.c_str());
}

TEST_CASE("strategy names parse and print") {
    for (Strategy s : {Strategy::trip_end, Strategy::off_peak, Strategy::most_likely})
        CHECK(strategy_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(strategy_from_string("nightly"), ParseError);
}
