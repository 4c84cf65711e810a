#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "gridev/csv.hpp"
#include "gridev/grid_case.hpp"
#include "gridev/simplex.hpp"

namespace gridev {

struct HourlyDemand {
    int hour = 0;
    std::map<int, double> load_mw_by_bus;  // static + EV, superposed

    double total_mw() const {
        double t = 0.0;
        for (const auto& [bus, mw] : load_mw_by_bus) t += mw;
        return t;
    }
};

struct DispatchResult {
    int hour = 0;
    std::map<int, double> p_gen_mw;                    // generator id -> MW
    std::map<int, double> line_flow_mw;                // line index -> MW
    std::map<int, double> theta;                       // bus id -> radians (reference = 0)
    double objective_cost = 0.0;                       // $, true generation cost
    std::map<int, double> storage_soc_mwh;             // at hour end
    std::map<int, double> storage_charge_mw;
    std::map<int, double> storage_discharge_mw;
    std::map<FuelType, double> gen_by_fuel_mwh;        // storage discharge under `storage`
    double system_lambda = 0.0;                        // $/MWh of the priciest dispatched segment
};

struct DayDispatch {
    std::string case_label;
    std::vector<DispatchResult> hours;  // 24, in hour order
    double total_cost = 0.0;
    std::map<FuelType, double> generation_by_fuel_mwh;
};

namespace opf_detail {

enum class StorageMode { frozen, normal, charge_only, discharge_only };

struct HourPolicy {
    StorageMode mode = StorageMode::normal;
    double charge_reward = 0.0;  // $/MWh credited to charging (charge_only hours)
};

struct ColumnPlan {
    lp::Problem prob;
    // segment columns
    std::vector<int> seg_gen;        // column -> index into sorted generator list
    std::vector<double> seg_cost;    // true marginal cost
    int n_segs = 0;
    std::vector<int> charge_col, discharge_col;  // per sorted storage unit, -1 if none
    int flow_col0 = -1;
    std::vector<int> theta_col;  // per sorted bus index, -1 for reference
};

inline std::vector<int> sorted_indices_by_id(std::size_t n, auto id_of) {
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return id_of(a) < id_of(b); });
    return idx;
}

inline ColumnPlan build_hour_lp(const GridCase& c, const HourlyDemand& demand,
                                const std::map<int, double>& soc_in, const HourPolicy& policy) {
    ColumnPlan plan;
    const int hour = demand.hour;

    auto gen_order = sorted_indices_by_id(c.generators.size(),
                                          [&](int i) { return c.generators[i].id; });
    auto sto_order = sorted_indices_by_id(c.storage_units.size(),
                                          [&](int i) { return c.storage_units[i].id; });
    auto bus_order = sorted_indices_by_id(c.buses.size(), [&](int i) { return c.buses[i].id; });

    std::map<int, int> bus_row;  // bus id -> row
    for (std::size_t k = 0; k < bus_order.size(); ++k) bus_row[c.buses[bus_order[k]].id] = static_cast<int>(k);

    // count columns
    struct Seg {
        int gen_sorted_idx;
        double lb, ub, cost;
    };
    std::vector<Seg> segs;
    for (std::size_t k = 0; k < gen_order.size(); ++k) {
        const Generator& g = c.generators[gen_order[k]];
        const double avail = g.availability[hour];
        double forced = g.p_min_mw * avail;
        double prev_bp = 0.0;
        for (const auto& s : g.cost_curve) {
            const double bp = std::min(s.breakpoint_mw, g.p_max_mw);
            const double width = (bp - prev_bp) * avail;
            prev_bp = bp;
            if (width <= 0.0) continue;
            const double lb = std::min(width, forced);
            forced -= lb;
            segs.push_back({static_cast<int>(k), lb, width, s.marginal_cost_per_mwh});
        }
    }

    const int n_bus = static_cast<int>(c.buses.size());
    const int n_line = static_cast<int>(c.lines.size());
    const int n_sto = static_cast<int>(c.storage_units.size());
    const int n_seg = static_cast<int>(segs.size());
    const int n_cols = n_seg + 2 * n_sto + n_line + (n_bus - 1);
    const int n_rows = n_bus + n_line;

    plan.prob.init(n_rows, n_cols);
    plan.n_segs = n_seg;
    int col = 0;

    for (const auto& s : segs) {
        const Generator& g = c.generators[gen_order[s.gen_sorted_idx]];
        plan.prob.lo[col] = s.lb;
        plan.prob.hi[col] = s.ub;
        plan.prob.c[col] = s.cost;
        plan.prob.at(bus_row[g.bus_id], col) = 1.0;
        plan.seg_gen.push_back(s.gen_sorted_idx);
        plan.seg_cost.push_back(s.cost);
        ++col;
    }

    plan.charge_col.assign(n_sto, -1);
    plan.discharge_col.assign(n_sto, -1);
    for (int k = 0; k < n_sto; ++k) {
        const StorageUnit& u = c.storage_units[sto_order[k]];
        const double soc = soc_in.count(u.id) ? soc_in.at(u.id) : u.initial_soc_mwh;
        double charge_ub =
            std::min(u.power_limit_mw, (u.energy_capacity_mwh - soc) / u.round_trip_efficiency);
        double discharge_ub = std::min(u.power_limit_mw, soc);
        charge_ub = std::max(0.0, charge_ub);
        discharge_ub = std::max(0.0, discharge_ub);
        switch (policy.mode) {
            case StorageMode::frozen: charge_ub = discharge_ub = 0.0; break;
            case StorageMode::charge_only: discharge_ub = 0.0; break;
            case StorageMode::discharge_only: charge_ub = 0.0; break;
            case StorageMode::normal: break;
        }
        plan.charge_col[k] = col;
        plan.prob.lo[col] = 0.0;
        plan.prob.hi[col] = charge_ub;
        plan.prob.c[col] = -policy.charge_reward;
        plan.prob.at(bus_row[u.bus_id], col) = -1.0;  // charging adds load
        ++col;
        plan.discharge_col[k] = col;
        plan.prob.lo[col] = 0.0;
        plan.prob.hi[col] = discharge_ub;
        plan.prob.c[col] = 0.0;
        plan.prob.at(bus_row[u.bus_id], col) = 1.0;
        ++col;
    }

    plan.flow_col0 = col;
    for (int l = 0; l < n_line; ++l) {
        const TransmissionLine& ln = c.lines[l];
        plan.prob.lo[col] = -ln.flow_limit_mw;
        plan.prob.hi[col] = ln.flow_limit_mw;
        plan.prob.at(bus_row[ln.from_bus], col) = -1.0;  // flow leaves from_bus
        plan.prob.at(bus_row[ln.to_bus], col) = 1.0;
        plan.prob.at(n_bus + l, col) = 1.0;
        ++col;
    }

    // voltage angles, reference bus (lowest id) pinned at zero
    plan.theta_col.assign(n_bus, -1);
    for (int k = 1; k < n_bus; ++k) {
        plan.theta_col[k] = col;
        plan.prob.lo[col] = -lp::kInf;
        plan.prob.hi[col] = lp::kInf;
        ++col;
    }
    for (int l = 0; l < n_line; ++l) {
        const TransmissionLine& ln = c.lines[l];
        const double coef = c.base_mva * ln.susceptance;
        int kf = bus_row[ln.from_bus], kt = bus_row[ln.to_bus];
        if (plan.theta_col[kf] >= 0) plan.prob.at(n_bus + l, plan.theta_col[kf]) = -coef;
        if (plan.theta_col[kt] >= 0) plan.prob.at(n_bus + l, plan.theta_col[kt]) = coef;
    }

    for (int k = 0; k < n_bus; ++k) {
        const int bus_id = c.buses[bus_order[k]].id;
        auto it = demand.load_mw_by_bus.find(bus_id);
        plan.prob.b[k] = (it != demand.load_mw_by_bus.end()) ? it->second : 0.0;
    }
    return plan;
}

// Stage 2: among near-optimal dispatches, prefer low generator ids, then
// generators over storage discharge, then minimal charging. Makes equal-cost
// ties deterministic and testable.
inline lp::Problem build_tiebreak_lp(const ColumnPlan& plan, double v1) {
    const lp::Problem& p1 = plan.prob;
    lp::Problem p2;
    p2.init(p1.rows + 1, p1.cols + 1);
    for (int r = 0; r < p1.rows; ++r) {
        for (int j = 0; j < p1.cols; ++j) p2.at(r, j) = p1.at(r, j);
        p2.b[r] = p1.b[r];
    }
    p2.lo.assign(p1.lo.begin(), p1.lo.end());
    p2.hi.assign(p1.hi.begin(), p1.hi.end());
    p2.lo.push_back(0.0);
    p2.hi.push_back(lp::kInf);
    // Budget pinned at the stage-1 optimum: only zero-cost (tied) moves remain.
    for (int j = 0; j < p1.cols; ++j) p2.at(p1.rows, j) = p1.c[j];
    p2.at(p1.rows, p1.cols) = 1.0;  // budget slack
    p2.b[p1.rows] = v1;

    int n_gens = 0;
    for (int g : plan.seg_gen) n_gens = std::max(n_gens, g + 1);
    for (int j = 0; j < plan.n_segs; ++j) p2.c[j] = static_cast<double>(plan.seg_gen[j]);
    for (std::size_t k = 0; k < plan.discharge_col.size(); ++k) {
        p2.c[plan.discharge_col[k]] = static_cast<double>(n_gens + static_cast<int>(k));
        p2.c[plan.charge_col[k]] =
            static_cast<double>(n_gens + static_cast<int>(plan.discharge_col.size()) + static_cast<int>(k) + 1);
    }
    return p2;
}

inline void validate_demand(const GridCase& c, const HourlyDemand& d) {
    if (d.hour < 0 || d.hour >= kHoursPerDay)
        throw ValidationError("demand hour " + std::to_string(d.hour) + " out of range");
    for (const auto& [bus, mw] : d.load_mw_by_bus) {
        if (!c.find_bus(bus))
            throw ValidationError("demand references missing bus " + std::to_string(bus));
        if (!(mw >= 0.0))
            throw ValidationError("negative demand at bus " + std::to_string(bus));
    }
}

inline DispatchResult solve_hour_with_policy(const GridCase& c, const HourlyDemand& demand,
                                             const std::map<int, double>& soc_in,
                                             const HourPolicy& policy) {
    validate_demand(c, demand);
    for (const auto& u : c.storage_units) {
        auto it = soc_in.find(u.id);
        const double soc = (it != soc_in.end()) ? it->second : u.initial_soc_mwh;
        if (soc < -1e-9 || soc > u.energy_capacity_mwh + 1e-9)
            throw ValidationError("storage " + std::to_string(u.id) + ": state of charge " +
                                  fmt_double(soc) + " outside [0, capacity]");
    }

    ColumnPlan plan = build_hour_lp(c, demand, soc_in, policy);
    lp::Solution s1 = lp::solve(plan.prob);
    if (s1.status == lp::Status::infeasible)
        throw InfeasibleError("hour " + std::to_string(demand.hour) +
                                  ": demand exceeds deliverable supply, shortfall " +
                                  fmt_double(s1.infeasibility) + " MW",
                              demand.hour, s1.infeasibility);
    if (s1.status != lp::Status::optimal)
        throw SimulationError("dispatch LP did not converge (internal)");

    lp::Problem p2 = build_tiebreak_lp(plan, s1.objective);
    lp::Solution s2 = lp::solve(p2);
    if (s2.status != lp::Status::optimal)
        throw SimulationError("dispatch tie-break LP did not converge (internal)");
    std::vector<double> x(s2.x.begin(), s2.x.begin() + plan.prob.cols);

    auto gen_order = sorted_indices_by_id(c.generators.size(),
                                          [&](int i) { return c.generators[i].id; });
    auto sto_order = sorted_indices_by_id(c.storage_units.size(),
                                          [&](int i) { return c.storage_units[i].id; });
    auto bus_order = sorted_indices_by_id(c.buses.size(), [&](int i) { return c.buses[i].id; });

    DispatchResult r;
    r.hour = demand.hour;
    for (std::size_t k = 0; k < gen_order.size(); ++k) r.p_gen_mw[c.generators[gen_order[k]].id] = 0.0;
    double true_cost = 0.0;
    double lambda = 0.0;
    for (int j = 0; j < plan.n_segs; ++j) {
        const Generator& g = c.generators[gen_order[plan.seg_gen[j]]];
        r.p_gen_mw[g.id] += x[j];
        true_cost += x[j] * plan.seg_cost[j];
        if (x[j] > 1e-7) lambda = std::max(lambda, plan.seg_cost[j]);
    }
    r.objective_cost = true_cost;
    r.system_lambda = lambda;

    for (std::size_t k = 0; k < sto_order.size(); ++k) {
        const StorageUnit& u = c.storage_units[sto_order[k]];
        const double charge = x[plan.charge_col[k]];
        const double discharge = x[plan.discharge_col[k]];
        const double soc0 = soc_in.count(u.id) ? soc_in.at(u.id) : u.initial_soc_mwh;
        r.storage_charge_mw[u.id] = charge;
        r.storage_discharge_mw[u.id] = discharge;
        double soc = soc0 + u.round_trip_efficiency * charge - discharge;
        soc = std::clamp(soc, 0.0, u.energy_capacity_mwh);
        r.storage_soc_mwh[u.id] = soc;
    }

    for (int l = 0; l < static_cast<int>(c.lines.size()); ++l)
        r.line_flow_mw[l] = x[plan.flow_col0 + l];
    for (std::size_t k = 0; k < bus_order.size(); ++k) {
        const int bus_id = c.buses[bus_order[k]].id;
        r.theta[bus_id] = (plan.theta_col[k] >= 0) ? x[plan.theta_col[k]] : 0.0;
    }

    for (std::size_t k = 0; k < gen_order.size(); ++k) {
        const Generator& g = c.generators[gen_order[k]];
        r.gen_by_fuel_mwh[g.fuel] += r.p_gen_mw[g.id];
    }
    for (const auto& [id, mw] : r.storage_discharge_mw)
        if (mw != 0.0) r.gen_by_fuel_mwh[FuelType::storage] += mw;
    return r;
}

} // namespace opf_detail

/// One-hour DC optimal power flow. Storage may discharge (it never charges
/// without the day-level policy, which supplies a charging incentive).
inline DispatchResult solve_hour(const GridCase& c, const HourlyDemand& demand,
                                 const std::map<int, double>& soc_in = {}) {
    return opf_detail::solve_hour_with_policy(c, demand, soc_in, {});
}

/// Chains 24 hourly solves with storage state carried forward. With storage
/// present this is a two-pass solve: a storage-free pass fixes the hourly
/// marginal costs, then hours below the day's median cost charge greedily and
/// the rest may discharge.
inline DayDispatch solve_day(const GridCase& c, const std::vector<HourlyDemand>& demands) {
    if (demands.size() != kHoursPerDay)
        throw ValidationError("solve_day expects exactly 24 hourly demands, got " +
                              std::to_string(demands.size()));
    for (int h = 0; h < kHoursPerDay; ++h)
        if (demands[h].hour != h)
            throw ValidationError("solve_day demands must be in hour order (index " +
                                  std::to_string(h) + " has hour " +
                                  std::to_string(demands[h].hour) + ")");

    using opf_detail::HourPolicy;
    using opf_detail::StorageMode;

    DayDispatch day;
    day.case_label = c.label;

    std::vector<double> lambda(kHoursPerDay, 0.0);
    std::map<int, double> soc;
    for (const auto& u : c.storage_units) soc[u.id] = u.initial_soc_mwh;

    const bool has_storage = !c.storage_units.empty();
    {
        HourPolicy pass1;
        pass1.mode = has_storage ? StorageMode::frozen : StorageMode::normal;
        std::map<int, double> soc1 = soc;
        for (int h = 0; h < kHoursPerDay; ++h) {
            DispatchResult r = opf_detail::solve_hour_with_policy(c, demands[h], soc1, pass1);
            lambda[h] = r.system_lambda;
            soc1 = r.storage_soc_mwh.empty() ? soc1 : r.storage_soc_mwh;
            if (!has_storage) day.hours.push_back(std::move(r));
        }
    }

    if (has_storage) {
        std::vector<double> sorted_lambda = lambda;
        std::sort(sorted_lambda.begin(), sorted_lambda.end());
        const double median = 0.5 * (sorted_lambda[11] + sorted_lambda[12]);
        double max_cost = 0.0;
        for (const auto& g : c.generators)
            for (const auto& s : g.cost_curve)
                max_cost = std::max(max_cost, s.marginal_cost_per_mwh);
        const double reward = 2.0 * max_cost + 10.0;

        for (int h = 0; h < kHoursPerDay; ++h) {
            HourPolicy pol;
            if (lambda[h] < median) {
                pol.mode = StorageMode::charge_only;
                pol.charge_reward = reward;
            } else {
                pol.mode = StorageMode::discharge_only;
            }
            DispatchResult r = opf_detail::solve_hour_with_policy(c, demands[h], soc, pol);
            soc = r.storage_soc_mwh;
            day.hours.push_back(std::move(r));
        }
    }

    for (const auto& r : day.hours) {
        day.total_cost += r.objective_cost;
        for (const auto& [fuel, mwh] : r.gen_by_fuel_mwh) day.generation_by_fuel_mwh[fuel] += mwh;
    }
    return day;
}

using FuelDeltas = std::map<FuelType, std::array<double, kHoursPerDay>>;

/// Per-fuel, per-hour generation difference between an EV scenario and its
/// no-EV baseline on the same case.
inline FuelDeltas marginal_generation(const DayDispatch& base, const DayDispatch& with_ev) {
    if (base.case_label != with_ev.case_label)
        throw ValidationError("marginal_generation: mismatched case labels '" + base.case_label +
                              "' vs '" + with_ev.case_label + "'");
    FuelDeltas out;
    for (int h = 0; h < kHoursPerDay; ++h) {
        for (const auto& [fuel, mwh] : with_ev.hours[h].gen_by_fuel_mwh) out[fuel][h] += mwh;
        for (const auto& [fuel, mwh] : base.hours[h].gen_by_fuel_mwh) out[fuel][h] -= mwh;
    }
    return out;
}

inline std::map<FuelType, double> fuel_delta_totals(const FuelDeltas& d) {
    std::map<FuelType, double> out;
    for (const auto& [fuel, hours] : d) {
        double t = 0.0;
        for (double v : hours) t += v;
        out[fuel] = t;
    }
    return out;
}

// Worst constraint violations of a dispatch against its inputs; all entries
// should be ~0 for a valid solve.
struct DispatchResiduals {
    double balance = 0.0;    // max |nodal balance residual| MW
    double gen_bounds = 0.0; // max generator bound violation MW
    double line = 0.0;       // max line limit violation MW
    double flow_eq = 0.0;    // max |flow - B*dtheta| MW
};

inline DispatchResiduals dispatch_residuals(const GridCase& c, const HourlyDemand& demand,
                                            const DispatchResult& r) {
    DispatchResiduals res;
    std::map<int, double> injection;  // bus -> gen + discharge - charge - load
    for (const auto& b : c.buses) injection[b.id] = 0.0;
    for (const auto& g : c.generators) injection[g.bus_id] += r.p_gen_mw.at(g.id);
    for (const auto& u : c.storage_units) {
        injection[u.bus_id] += r.storage_discharge_mw.at(u.id);
        injection[u.bus_id] -= r.storage_charge_mw.at(u.id);
    }
    for (const auto& [bus, mw] : demand.load_mw_by_bus) injection[bus] -= mw;
    for (int l = 0; l < static_cast<int>(c.lines.size()); ++l) {
        const auto& ln = c.lines[l];
        const double f = r.line_flow_mw.at(l);
        injection[ln.from_bus] -= f;
        injection[ln.to_bus] += f;
        res.line = std::max(res.line, std::abs(f) - ln.flow_limit_mw);
        const double model = c.base_mva * ln.susceptance * (r.theta.at(ln.from_bus) - r.theta.at(ln.to_bus));
        res.flow_eq = std::max(res.flow_eq, std::abs(f - model));
    }
    res.line = std::max(res.line, 0.0);
    for (const auto& [bus, inj] : injection) res.balance = std::max(res.balance, std::abs(inj));
    for (const auto& g : c.generators) {
        const double avail = g.availability[demand.hour];
        const double p = r.p_gen_mw.at(g.id);
        res.gen_bounds = std::max(res.gen_bounds, g.p_min_mw * avail - p);
        res.gen_bounds = std::max(res.gen_bounds, p - g.p_max_mw * avail);
    }
    res.gen_bounds = std::max(res.gen_bounds, 0.0);
    return res;
}

inline void write_dispatch_csv(const GridCase& c, const DayDispatch& day, const std::string& path) {
    CsvWriter w(path);
    w.row({"hour", "generator_id", "fuel", "p_mw"});
    std::vector<const Generator*> gens;
    for (const auto& g : c.generators) gens.push_back(&g);
    std::sort(gens.begin(), gens.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (const auto& r : day.hours)
        for (const auto* g : gens)
            w.row({std::to_string(r.hour), std::to_string(g->id), to_string(g->fuel),
                   fmt_double(r.p_gen_mw.at(g->id))});
    w.close();
}

} // namespace gridev
