#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "gridev/opf.hpp"
#include "gridev/transport.hpp"

namespace gridev {

enum class Pollutant { CO2, NOX, PM25, VOC };

inline constexpr std::array<Pollutant, 4> kAllPollutants = {Pollutant::CO2, Pollutant::NOX,
                                                            Pollutant::PM25, Pollutant::VOC};

inline const char* to_string(Pollutant p) {
    switch (p) {
        case Pollutant::CO2: return "CO2";
        case Pollutant::NOX: return "NOX";
        case Pollutant::PM25: return "PM25";
        case Pollutant::VOC: return "VOC";
    }
    return "CO2";
}

inline Pollutant pollutant_from_string(const std::string& s) {
    for (Pollutant p : kAllPollutants)
        if (s == to_string(p)) return p;
    throw ParseError("unknown pollutant '" + s + "'");
}

enum class TempRegime { mild, hot };

inline const char* to_string(TempRegime r) { return r == TempRegime::mild ? "mild" : "hot"; }

inline TempRegime regime_from_string(const std::string& s) {
    if (s == "mild") return TempRegime::mild;
    if (s == "hot") return TempRegime::hot;
    throw ParseError("unknown temperature regime '" + s + "'");
}

/// Running-exhaust grams per mile by vehicle class, 5 mph speed bin,
/// pollutant, and temperature regime.
struct OnRoadRateTable {
    static constexpr int kBinWidth = 5;
    static constexpr int kNumBins = 18;

    // [class][bin][pollutant][regime]
    std::array<std::array<std::array<std::array<double, 2>, 4>, kNumBins>, 2> g_per_mile{};
    std::array<std::array<std::array<std::array<bool, 2>, 4>, kNumBins>, 2> covered{};

    void set(VehicleClass cls, int bin_low_mph, Pollutant pol, TempRegime regime, double rate) {
        if (bin_low_mph % kBinWidth != 0 || bin_low_mph < 0 || bin_low_mph >= kNumBins * kBinWidth)
            throw ValidationError("on-road rate table: bad speed bin " + std::to_string(bin_low_mph));
        if (!(rate >= 0.0)) throw ValidationError("on-road rate table: negative rate");
        g_per_mile[static_cast<int>(cls)][bin_low_mph / kBinWidth][static_cast<int>(pol)]
                  [static_cast<int>(regime)] = rate;
        covered[static_cast<int>(cls)][bin_low_mph / kBinWidth][static_cast<int>(pol)]
               [static_cast<int>(regime)] = true;
    }

    double rate(VehicleClass cls, double speed_mph, Pollutant pol, TempRegime regime) const {
        const int bin = std::min(kNumBins - 1, static_cast<int>(speed_mph / kBinWidth));
        if (!covered[static_cast<int>(cls)][bin][static_cast<int>(pol)][static_cast<int>(regime)])
            throw ValidationError(std::string("on-road rate table: uncovered bin (") +
                                  to_string(cls) + ", " + std::to_string(bin * kBinWidth) + " mph, " +
                                  to_string(pol) + ", " + to_string(regime) + ")");
        return g_per_mile[static_cast<int>(cls)][bin][static_cast<int>(pol)][static_cast<int>(regime)];
    }

    void require_full_coverage() const {
        for (int c = 0; c < 2; ++c)
            for (int b = 0; b < kNumBins; ++b)
                for (int p = 0; p < 4; ++p)
                    for (int r = 0; r < 2; ++r)
                        if (!covered[c][b][p][r])
                            throw ValidationError(
                                std::string("on-road rate table: missing row (") +
                                (c == 0 ? "LDV" : "HDV") + ", " + std::to_string(b * kBinWidth) +
                                " mph, " + to_string(static_cast<Pollutant>(p)) + ", " +
                                to_string(static_cast<TempRegime>(r)) + ")");
    }
};

inline OnRoadRateTable load_onroad_rates_csv(const std::string& path) {
    auto t = read_csv(path);
    const int c_cls = t.column("vehicle_class", path);
    const int c_bin = t.column("speed_bin_low", path);
    const int c_pol = t.column("pollutant", path);
    const int c_reg = t.column("regime", path);
    const int c_rate = t.column("g_per_mile", path);
    OnRoadRateTable out;
    for (const auto& r : t.rows)
        out.set(vehicle_class_from_string(r[c_cls]),
                static_cast<int>(parse_int(r[c_bin], path + " speed_bin_low")),
                pollutant_from_string(r[c_pol]), regime_from_string(r[c_reg]),
                parse_double(r[c_rate], path + " g_per_mile"));
    return out;
}

inline void write_onroad_rates_csv(const OnRoadRateTable& t, const std::string& path) {
    CsvWriter w(path);
    w.row({"vehicle_class", "speed_bin_low", "pollutant", "regime", "g_per_mile"});
    for (int c = 0; c < 2; ++c)
        for (int b = 0; b < OnRoadRateTable::kNumBins; ++b)
            for (int p = 0; p < 4; ++p)
                for (int r = 0; r < 2; ++r)
                    if (t.covered[c][b][p][r])
                        w.row({c == 0 ? "LDV" : "HDV", std::to_string(b * OnRoadRateTable::kBinWidth),
                               to_string(static_cast<Pollutant>(p)),
                               to_string(static_cast<TempRegime>(r)),
                               fmt_double(t.g_per_mile[c][b][p][r])});
    w.close();
}

/// Electricity-generation emission rates, grams per MWh by fuel. Carbon-free
/// fuels always carry zero rows; nonzero entries for them are rejected.
struct EguRateTable {
    std::map<FuelType, std::array<double, 4>> g_per_mwh;

    EguRateTable() {
        for (FuelType f : kAllFuels)
            if (is_carbon_free(f)) g_per_mwh[f] = {0.0, 0.0, 0.0, 0.0};
    }

    void set(FuelType fuel, Pollutant pol, double rate) {
        if (!(rate >= 0.0)) throw ValidationError("EGU rate table: negative rate");
        if (is_carbon_free(fuel) && rate != 0.0)
            throw ValidationError(std::string("EGU rate table: carbon-free fuel ") + to_string(fuel) +
                                  " must have zero rates");
        g_per_mwh[fuel][static_cast<int>(pol)] = rate;
    }

    double rate(FuelType fuel, Pollutant pol) const {
        auto it = g_per_mwh.find(fuel);
        if (it == g_per_mwh.end())
            throw ValidationError(std::string("EGU rate table: missing fuel row for ") +
                                  to_string(fuel));
        return it->second[static_cast<int>(pol)];
    }

    bool has_fuel(FuelType fuel) const { return g_per_mwh.count(fuel) > 0; }
};

inline EguRateTable load_egu_rates_csv(const std::string& path) {
    auto t = read_csv(path);
    const int c_fuel = t.column("fuel", path);
    const int c_pol = t.column("pollutant", path);
    const int c_rate = t.column("g_per_mwh", path);
    EguRateTable out;
    for (const auto& r : t.rows)
        out.set(fuel_from_string(r[c_fuel]), pollutant_from_string(r[c_pol]),
                parse_double(r[c_rate], path + " g_per_mwh"));
    return out;
}

inline void write_egu_rates_csv(const EguRateTable& t, const std::string& path) {
    CsvWriter w(path);
    w.row({"fuel", "pollutant", "g_per_mwh"});
    for (const auto& [fuel, rates] : t.g_per_mwh)
        for (Pollutant p : kAllPollutants)
            w.row({to_string(fuel), to_string(p), fmt_double(rates[static_cast<int>(p)])});
    w.close();
}

/// Mass inventory in grams by source and pollutant. Sources are "LDV", "HDV",
/// and "EGU_<fuel>".
struct EmissionInventory {
    std::map<std::string, std::array<double, 4>> grams_by_source;
    std::string scenario_label;

    void add(const std::string& source, Pollutant pol, double grams) {
        grams_by_source[source][static_cast<int>(pol)] += grams;
    }
    double total(Pollutant pol) const {
        double t = 0.0;
        for (const auto& [src, g] : grams_by_source) t += g[static_cast<int>(pol)];
        return t;
    }
    double source_total(const std::string& source, Pollutant pol) const {
        auto it = grams_by_source.find(source);
        return it == grams_by_source.end() ? 0.0 : it->second[static_cast<int>(pol)];
    }
    double egu_total(Pollutant pol) const {
        double t = 0.0;
        for (const auto& [src, g] : grams_by_source)
            if (src.rfind("EGU_", 0) == 0) t += g[static_cast<int>(pol)];
        return t;
    }
};

inline std::string egu_source(FuelType fuel) { return std::string("EGU_") + to_string(fuel); }

/// On-road running exhaust: VMT x rate for every non-EV link. EV light-duty
/// trips contribute nothing; heavy-duty trips always contribute.
inline EmissionInventory onroad_emissions(const std::vector<TripRecord>& trips,
                                          const EvAssignment& assignment,
                                          const OnRoadRateTable& rates, TempRegime regime) {
    EmissionInventory inv;
    inv.grams_by_source["LDV"] = {0, 0, 0, 0};
    inv.grams_by_source["HDV"] = {0, 0, 0, 0};
    for (const auto& t : trips) {
        if (t.vehicle_class == VehicleClass::LDV && assignment.is_ev(t.vehicle_id)) continue;
        const char* src = to_string(t.vehicle_class);
        for (const auto& l : t.links)
            for (Pollutant p : kAllPollutants)
                inv.add(src, p, l.length_miles * rates.rate(t.vehicle_class, l.avg_speed_mph, p, regime));
    }
    return inv;
}

/// EGU emissions: day-total MWh by fuel times the per-fuel rate.
inline EmissionInventory egu_emissions(const DayDispatch& dispatch, const EguRateTable& rates) {
    EmissionInventory inv;
    for (const auto& [fuel, mwh] : dispatch.generation_by_fuel_mwh) {
        if (!rates.has_fuel(fuel))
            throw ValidationError(std::string("EGU rate table: missing fuel row for ") +
                                  to_string(fuel));
        for (Pollutant p : kAllPollutants) inv.add(egu_source(fuel), p, mwh * rates.rate(fuel, p));
    }
    return inv;
}

/// Emission intensity of the generation dispatched for EV charging:
/// (EGU grams with EVs - EGU grams baseline) / EV energy delivered.
inline double marginal_egu_rate(const EmissionInventory& base, const EmissionInventory& with_ev,
                                double ev_energy_mwh, Pollutant pol) {
    if (!(ev_energy_mwh > 0.0))
        throw ValidationError("marginal_egu_rate: zero EV energy");
    return (with_ev.egu_total(pol) - base.egu_total(pol)) / ev_energy_mwh;
}

/// Union of disjoint-source inventories.
inline EmissionInventory combine_inventories(const EmissionInventory& onroad,
                                             const EmissionInventory& egu,
                                             const std::string& label) {
    EmissionInventory out;
    out.scenario_label = label;
    out.grams_by_source = onroad.grams_by_source;
    for (const auto& [src, g] : egu.grams_by_source) {
        if (out.grams_by_source.count(src))
            throw ValidationError("combine_inventories: duplicate source " + src);
        out.grams_by_source[src] = g;
    }
    return out;
}

inline void write_inventory_csv(const EmissionInventory& inv, const std::string& path) {
    CsvWriter w(path);
    w.row({"scenario", "source", "pollutant", "grams", "metric_tons"});
    for (const auto& [src, g] : inv.grams_by_source)
        for (Pollutant p : kAllPollutants)
            w.row({inv.scenario_label, src, to_string(p), fmt_double(g[static_cast<int>(p)]),
                   fmt_double(g[static_cast<int>(p)] / 1e6)});
    w.close();
}

inline EmissionInventory read_inventory_csv(const std::string& path) {
    auto t = read_csv(path);
    const int c_scn = t.column("scenario", path);
    const int c_src = t.column("source", path);
    const int c_pol = t.column("pollutant", path);
    const int c_g = t.column("grams", path);
    EmissionInventory inv;
    for (const auto& r : t.rows) {
        inv.scenario_label = r[c_scn];
        inv.add(r[c_src], pollutant_from_string(r[c_pol]), parse_double(r[c_g], path + " grams"));
    }
    return inv;
}

} // namespace gridev
