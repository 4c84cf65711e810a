#pragma once

#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "gridev/grid_case.hpp"
#include "gridev/rng.hpp"

namespace gridev {

struct SynthCaseOptions {
    std::string label = "synthetic";
    double line_limit_factor = 1.0;  // line limit as a multiple of peak load
    double center_lat = 30.30;       // placement only; any regional extent works
    double center_lon = -97.75;
};

namespace detail {

// Double-peaked daily demand shape, normalized so the max hour equals 1.
inline std::array<double, kHoursPerDay> daily_load_shape() {
    std::array<double, kHoursPerDay> s{};
    double mx = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        double morning = 0.17 * std::exp(-0.5 * std::pow((h - 8.5) / 2.2, 2));
        double evening = 0.42 * std::exp(-0.5 * std::pow((h - 18.5) / 2.8, 2));
        s[h] = 0.58 + morning + evening;
        mx = std::max(mx, s[h]);
    }
    for (double& v : s) v /= mx;
    return s;
}

inline std::array<double, kHoursPerDay> availability_profile(FuelType f) {
    std::array<double, kHoursPerDay> a{};
    for (int h = 0; h < kHoursPerDay; ++h) {
        switch (f) {
            case FuelType::wind:
                // night-peaked, never below 0.35
                a[h] = 0.65 + 0.30 * std::cos(2.0 * 3.141592653589793 * (h - 2) / 24.0);
                break;
            case FuelType::solar:
                a[h] = (h >= 6 && h <= 18) ? 0.9 * std::sin(3.141592653589793 * (h - 6) / 12.0) : 0.0;
                break;
            default:
                a[h] = 1.0;
        }
    }
    return a;
}

inline double base_cost_per_mwh(FuelType f) {
    switch (f) {
        case FuelType::nuclear: return 8.0;
        case FuelType::coal: return 22.0;
        case FuelType::natural_gas: return 30.0;
        case FuelType::other: return 35.0;
        default: return 0.0;  // wind, solar
    }
}

} // namespace detail

/// Deterministic synthetic transmission case: ring-plus-chords topology,
/// generators split per fuel to match the requested capacity shares, and a
/// double-peaked static load profile summing to peak_load_mw at the peak hour.
inline GridCase generate_synthetic_case(int n_buses, const std::map<FuelType, double>& fuel_mix,
                                        double peak_load_mw, std::uint64_t seed,
                                        const SynthCaseOptions& opts = {}) {
    if (n_buses < 1) throw ValidationError("generate_synthetic_case: n_buses must be >= 1");
    if (!(peak_load_mw >= 0.0)) throw ValidationError("generate_synthetic_case: negative peak load");
    double gen_cap = 0.0;
    for (const auto& [fuel, cap] : fuel_mix) {
        if (!(cap >= 0.0)) throw ValidationError("generate_synthetic_case: negative capacity");
        if (fuel != FuelType::storage) gen_cap += cap;
    }
    if (gen_cap + 1e-9 < peak_load_mw)
        throw ValidationError("generate_synthetic_case: infeasible request, generation capacity " +
                              fmt_double(gen_cap) + " MW < peak load " + fmt_double(peak_load_mw) +
                              " MW");

    SplitMix64 rng(hash_mix(seed, 0xca5e));
    GridCase c;
    c.label = opts.label;
    c.base_mva = 100.0;

    const double two_pi = 6.283185307179586;
    for (int i = 0; i < n_buses; ++i) {
        Bus b;
        b.id = i + 1;
        b.name = "bus" + std::to_string(b.id);
        double ang = two_pi * i / n_buses;
        b.latitude = opts.center_lat + 0.15 * std::sin(ang) + rng.uniform(-0.02, 0.02);
        b.longitude = opts.center_lon + 0.15 * std::cos(ang) + rng.uniform(-0.02, 0.02);
        b.is_substation = true;
        c.buses.push_back(b);
    }

    const double line_limit = std::max(10.0, peak_load_mw * opts.line_limit_factor);
    if (n_buses == 2) {
        c.lines.push_back({1, 2, rng.uniform(6.0, 14.0), line_limit});
    } else if (n_buses >= 3) {
        for (int i = 0; i < n_buses; ++i)
            c.lines.push_back({i + 1, (i + 1) % n_buses + 1, rng.uniform(6.0, 14.0), line_limit});
        for (int k = 0; k < n_buses / 5; ++k) {
            int from = 2 * k, to = (2 * k + n_buses / 2) % n_buses;
            c.lines.push_back({from + 1, to + 1, rng.uniform(6.0, 14.0), line_limit});
        }
    }

    // deterministic bus permutation for unit placement
    std::vector<int> order(n_buses);
    std::iota(order.begin(), order.end(), 1);
    for (int i = n_buses - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(0, i)]);

    const int units_target = std::max(1, static_cast<int>(std::llround(0.6 * n_buses)));
    int gen_id = 0, placed = 0;
    for (FuelType fuel : kAllFuels) {
        auto it = fuel_mix.find(fuel);
        if (it == fuel_mix.end() || it->second <= 0.0) continue;
        if (fuel == FuelType::storage) {
            StorageUnit s;
            s.id = 1;
            s.bus_id = order[placed % n_buses];
            s.power_limit_mw = it->second;
            s.energy_capacity_mwh = 4.0 * it->second;
            s.round_trip_efficiency = 0.85;
            s.initial_soc_mwh = s.energy_capacity_mwh / 2.0;
            c.storage_units.push_back(s);
            ++placed;
            continue;
        }
        const double share = it->second / gen_cap;
        const int n_units = std::max(1, static_cast<int>(std::llround(share * units_target)));
        const double unit_cap = it->second / n_units;
        const double base_cost = detail::base_cost_per_mwh(fuel);
        for (int u = 0; u < n_units; ++u) {
            Generator g;
            g.id = ++gen_id;
            g.bus_id = order[placed++ % n_buses];
            g.fuel = fuel;
            g.p_min_mw = 0.0;
            g.p_max_mw = unit_cap;
            const double cost = base_cost * (1.0 + 0.16 * (rng.uniform01() - 0.5));
            if (unit_cap > 20.0 && cost > 0.0) {
                g.cost_curve.push_back({0.6 * unit_cap, 0.95 * cost});
                g.cost_curve.push_back({unit_cap, 1.08 * cost});
            } else {
                g.cost_curve.push_back({unit_cap, cost});
            }
            g.availability = detail::availability_profile(fuel);
            c.generators.push_back(g);
        }
    }

    const auto shape = detail::daily_load_shape();
    std::vector<double> weights(n_buses);
    double wsum = 0.0;
    for (int i = 0; i < n_buses; ++i) {
        weights[i] = 0.5 + rng.uniform01();
        wsum += weights[i];
    }
    for (int i = 0; i < n_buses; ++i) {
        StaticLoadSeries s;
        s.bus_id = c.buses[i].id;
        for (int h = 0; h < kHoursPerDay; ++h)
            s.hourly_load_mw[h] = weights[i] / wsum * peak_load_mw * shape[h];
        c.static_loads.push_back(s);
    }

    c.validate();
    return c;
}

} // namespace gridev
