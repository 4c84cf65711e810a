#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gridev/common.hpp"

namespace gridev::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { optimal, infeasible, unbounded, iteration_limit };

/// min c.x  subject to  A x = b,  lo <= x <= hi (bounds may be infinite).
/// Callers encode inequalities with explicit slack columns.
struct Problem {
    int rows = 0, cols = 0;
    std::vector<double> a;  // row-major rows x cols
    std::vector<double> b;
    std::vector<double> c;
    std::vector<double> lo, hi;

    void init(int m, int n) {
        rows = m;
        cols = n;
        a.assign(static_cast<std::size_t>(m) * n, 0.0);
        b.assign(m, 0.0);
        c.assign(n, 0.0);
        lo.assign(n, 0.0);
        hi.assign(n, kInf);
    }
    double& at(int r, int col) { return a[static_cast<std::size_t>(r) * cols + col]; }
    double at(int r, int col) const { return a[static_cast<std::size_t>(r) * cols + col]; }
};

struct Solution {
    Status status = Status::optimal;
    std::vector<double> x;      // structural values
    double objective = 0.0;     // c.x
    double infeasibility = 0.0; // phase-1 residual when infeasible
    int iterations = 0;
};

namespace detail {

constexpr double kDualTol = 1e-9;
constexpr double kPivTol = 1e-10;
constexpr double kRatioTieTol = 1e-9;

enum class NbState : std::int8_t { basic, at_lower, at_upper, free_zero };

class BoundedSimplex {
public:
    explicit BoundedSimplex(const Problem& p)
        : m_(p.rows), n_(p.cols), total_(p.cols + p.rows), prob_(p) {
        lo_ = p.lo;
        hi_ = p.hi;
        lo_.resize(total_, 0.0);
        hi_.resize(total_, kInf);
        state_.assign(total_, NbState::at_lower);
        art_sign_.assign(m_, 1.0);
        basic_.assign(m_, -1);
        xb_.assign(m_, 0.0);
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    }

    Solution solve() {
        Solution sol;
        setup_phase1();

        std::vector<double> phase1_cost(total_, 0.0);
        for (int j = n_; j < total_; ++j) phase1_cost[j] = 1.0;
        Status st = iterate(phase1_cost);
        if (st == Status::iteration_limit) return finish(sol, st);
        double scale = 1.0;
        for (int r = 0; r < m_; ++r) scale = std::max(scale, std::abs(prob_.b[r]));
        const double inf1 = objective_value(phase1_cost);
        if (inf1 > 1e-9 * scale + 1e-9) {
            sol.status = Status::infeasible;
            sol.infeasibility = inf1;
            sol.iterations = iters_;
            return sol;
        }

        transition_to_phase2();
        std::vector<double> phase2_cost(total_, 0.0);
        for (int j = 0; j < n_; ++j) phase2_cost[j] = prob_.c[j];
        st = iterate(phase2_cost);
        return finish(sol, st);
    }

private:
    int m_, n_, total_;
    const Problem& prob_;
    std::vector<double> lo_, hi_;
    std::vector<NbState> state_;
    std::vector<double> art_sign_;
    std::vector<int> basic_;
    std::vector<double> xb_;
    std::vector<double> binv_;
    int iters_ = 0;
    int max_iters_ = 0;

    double aval(int r, int j) const {
        if (j < n_) return prob_.at(r, j);
        return (j - n_ == r) ? art_sign_[r] : 0.0;
    }

    double nb_value(int j) const {
        switch (state_[j]) {
            case NbState::at_lower: return lo_[j];
            case NbState::at_upper: return hi_[j];
            default: return 0.0;
        }
    }

    double value(int j) const {
        if (state_[j] == NbState::basic) {
            for (int r = 0; r < m_; ++r)
                if (basic_[r] == j) return xb_[r];
        }
        return nb_value(j);
    }

    void setup_phase1() {
        for (int j = 0; j < n_; ++j) {
            if (std::isfinite(lo_[j]))
                state_[j] = NbState::at_lower;
            else if (std::isfinite(hi_[j]))
                state_[j] = NbState::at_upper;
            else
                state_[j] = NbState::free_zero;
        }
        for (int r = 0; r < m_; ++r) {
            double resid = prob_.b[r];
            for (int j = 0; j < n_; ++j) {
                double a = prob_.at(r, j);
                if (a != 0.0) resid -= a * nb_value(j);
            }
            art_sign_[r] = (resid >= 0.0) ? 1.0 : -1.0;
            basic_[r] = n_ + r;
            state_[n_ + r] = NbState::basic;
            xb_[r] = std::abs(resid);
            binv_[static_cast<std::size_t>(r) * m_ + r] = art_sign_[r];
        }
        max_iters_ = 2000 + 200 * (m_ + n_);
    }

    double objective_value(const std::vector<double>& cost) const {
        double obj = 0.0;
        for (int r = 0; r < m_; ++r) obj += cost[basic_[r]] * xb_[r];
        for (int j = 0; j < total_; ++j)
            if (state_[j] != NbState::basic && cost[j] != 0.0) obj += cost[j] * nb_value(j);
        return obj;
    }

    void price(const std::vector<double>& cost, std::vector<double>& y) const {
        y.assign(m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            double ck = cost[basic_[k]];
            if (ck == 0.0) continue;
            const double* row = &binv_[static_cast<std::size_t>(k) * m_];
            for (int r = 0; r < m_; ++r) y[r] += ck * row[r];
        }
    }

    double reduced_cost(const std::vector<double>& cost, const std::vector<double>& y, int j) const {
        double d = cost[j];
        if (j < n_) {
            for (int r = 0; r < m_; ++r) {
                double a = prob_.at(r, j);
                if (a != 0.0) d -= y[r] * a;
            }
        } else {
            d -= y[j - n_] * art_sign_[j - n_];
        }
        return d;
    }

    void column(int j, std::vector<double>& w) const {
        w.assign(m_, 0.0);
        if (j < n_) {
            for (int r = 0; r < m_; ++r) {
                double a = prob_.at(r, j);
                if (a == 0.0) continue;
                for (int k = 0; k < m_; ++k) w[k] += binv_[static_cast<std::size_t>(k) * m_ + r] * a;
            }
        } else {
            int r = j - n_;
            for (int k = 0; k < m_; ++k) w[k] = binv_[static_cast<std::size_t>(k) * m_ + r] * art_sign_[r];
        }
    }

    void recompute_xb() {
        std::vector<double> rhs = prob_.b;
        for (int j = 0; j < total_; ++j) {
            if (state_[j] == NbState::basic) continue;
            double v = nb_value(j);
            if (v == 0.0) continue;
            if (j < n_) {
                for (int r = 0; r < m_; ++r) {
                    double a = prob_.at(r, j);
                    if (a != 0.0) rhs[r] -= a * v;
                }
            } else {
                rhs[j - n_] -= art_sign_[j - n_] * v;
            }
        }
        for (int k = 0; k < m_; ++k) {
            double s = 0.0;
            const double* row = &binv_[static_cast<std::size_t>(k) * m_];
            for (int r = 0; r < m_; ++r) s += row[r] * rhs[r];
            xb_[k] = s;
        }
    }

    // Rebuild binv from the current basis via Gauss-Jordan; false if singular.
    bool refactor() {
        std::vector<double> work(static_cast<std::size_t>(m_) * 2 * m_, 0.0);
        auto at = [&](int r, int c) -> double& { return work[static_cast<std::size_t>(r) * 2 * m_ + c]; };
        for (int r = 0; r < m_; ++r) {
            for (int k = 0; k < m_; ++k) at(r, k) = aval(r, basic_[k]);
            at(r, m_ + r) = 1.0;
        }
        for (int col = 0; col < m_; ++col) {
            int piv = -1;
            double best = 1e-12;
            for (int r = col; r < m_; ++r)
                if (std::abs(at(r, col)) > best) {
                    best = std::abs(at(r, col));
                    piv = r;
                }
            if (piv < 0) return false;
            if (piv != col)
                for (int k = 0; k < 2 * m_; ++k) std::swap(at(piv, k), at(col, k));
            double d = at(col, col);
            for (int k = 0; k < 2 * m_; ++k) at(col, k) /= d;
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                double f = at(r, col);
                if (f == 0.0) continue;
                for (int k = 0; k < 2 * m_; ++k) at(r, k) -= f * at(col, k);
            }
        }
        for (int r = 0; r < m_; ++r)
            for (int k = 0; k < m_; ++k) binv_[static_cast<std::size_t>(r) * m_ + k] = at(r, m_ + k);
        // binv maps row space:  x_B = binv * rhs with basis column order = row order
        // of work; our work rows were constraint rows, columns basis members, so the
        // inverse above is (A_B)^-1 already in the right orientation.
        recompute_xb();
        return true;
    }

    Status iterate(const std::vector<double>& cost) {
        bool bland = false;
        int stall = 0;
        const int stall_limit = 2 * (m_ + n_) + 50;
        double last_obj = objective_value(cost);
        int refreshes = 0;
        std::vector<double> y, w;

        while (true) {
            if (++iters_ > max_iters_) return Status::iteration_limit;
            if (iters_ % 64 == 0) recompute_xb();

            price(cost, y);
            int enter = -1;
            double best_viol = 0.0;
            int sigma = +1;
            for (int j = 0; j < total_; ++j) {
                if (state_[j] == NbState::basic) continue;
                if (lo_[j] == hi_[j]) continue;  // fixed (includes sealed artificials)
                double d = reduced_cost(cost, y, j);
                int s = 0;
                if ((state_[j] == NbState::at_lower || state_[j] == NbState::free_zero) && d < -kDualTol)
                    s = +1;
                else if ((state_[j] == NbState::at_upper || state_[j] == NbState::free_zero) && d > kDualTol)
                    s = -1;
                if (!s) continue;
                if (bland) {
                    enter = j;
                    sigma = s;
                    break;
                }
                if (std::abs(d) > best_viol) {
                    best_viol = std::abs(d);
                    enter = j;
                    sigma = s;
                }
            }

            if (enter < 0) {
                // verify optimality on a freshly factorized basis
                if (refreshes < 3) {
                    ++refreshes;
                    if (refactor()) {
                        price(cost, y);
                        bool improvable = false;
                        for (int j = 0; j < total_ && !improvable; ++j) {
                            if (state_[j] == NbState::basic || lo_[j] == hi_[j]) continue;
                            double d = reduced_cost(cost, y, j);
                            if ((state_[j] == NbState::at_lower || state_[j] == NbState::free_zero) &&
                                d < -kDualTol)
                                improvable = true;
                            else if ((state_[j] == NbState::at_upper || state_[j] == NbState::free_zero) &&
                                     d > kDualTol)
                                improvable = true;
                        }
                        if (improvable) continue;
                    }
                }
                return Status::optimal;
            }

            column(enter, w);

            // ratio test
            double t_best = kInf;
            int leave = -1;
            bool leave_to_upper = false;
            for (int k = 0; k < m_; ++k) {
                double delta = -sigma * w[k];
                double t;
                bool to_upper;
                int bj = basic_[k];
                if (delta < -kPivTol) {
                    if (!std::isfinite(lo_[bj])) continue;
                    t = (xb_[k] - lo_[bj]) / (-delta);
                    to_upper = false;
                } else if (delta > kPivTol) {
                    if (!std::isfinite(hi_[bj])) continue;
                    t = (hi_[bj] - xb_[k]) / delta;
                    to_upper = true;
                } else {
                    continue;
                }
                if (t < 0.0) t = 0.0;
                if (t < t_best - kRatioTieTol) {
                    t_best = t;
                    leave = k;
                    leave_to_upper = to_upper;
                } else if (t <= t_best + kRatioTieTol && leave >= 0) {
                    // prefer larger pivot magnitude, then lower column index
                    if (std::abs(w[k]) > std::abs(w[leave]) + 1e-12 ||
                        (std::abs(std::abs(w[k]) - std::abs(w[leave])) <= 1e-12 && basic_[k] < basic_[leave])) {
                        t_best = std::min(t_best, t);
                        leave = k;
                        leave_to_upper = to_upper;
                    }
                }
            }

            // entering variable's own opposite bound
            double t_self = kInf;
            if (std::isfinite(lo_[enter]) && std::isfinite(hi_[enter])) t_self = hi_[enter] - lo_[enter];

            if (t_self < t_best - 1e-12) {
                for (int k = 0; k < m_; ++k) xb_[k] -= sigma * t_self * w[k];
                state_[enter] =
                    (state_[enter] == NbState::at_lower) ? NbState::at_upper : NbState::at_lower;
            } else if (leave < 0) {
                return Status::unbounded;
            } else {
                double enter_val = nb_value(enter) + sigma * t_best;
                for (int k = 0; k < m_; ++k) xb_[k] -= sigma * t_best * w[k];
                int out = basic_[leave];
                state_[out] = leave_to_upper ? NbState::at_upper : NbState::at_lower;
                basic_[leave] = enter;
                state_[enter] = NbState::basic;
                xb_[leave] = enter_val;

                double piv = w[leave];
                double* prow = &binv_[static_cast<std::size_t>(leave) * m_];
                for (int r = 0; r < m_; ++r) prow[r] /= piv;
                for (int k = 0; k < m_; ++k) {
                    if (k == leave) continue;
                    double f = w[k];
                    if (f == 0.0) continue;
                    double* krow = &binv_[static_cast<std::size_t>(k) * m_];
                    for (int r = 0; r < m_; ++r) krow[r] -= f * prow[r];
                }
            }

            double obj = objective_value(cost);
            if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
                stall = 0;
                last_obj = obj;
            } else if (++stall > stall_limit) {
                bland = true;
            }
        }
    }

    void transition_to_phase2() {
        for (int j = n_; j < total_; ++j) {
            if (state_[j] != NbState::basic) {
                lo_[j] = hi_[j] = 0.0;
                state_[j] = NbState::at_lower;
            }
        }
        std::vector<double> w;
        for (int r = 0; r < m_; ++r) {
            if (basic_[r] < n_) continue;
            // drive the artificial out with a zero-length pivot if possible
            int pivot_col = -1;
            for (int j = 0; j < n_; ++j) {
                if (state_[j] == NbState::basic || lo_[j] == hi_[j]) continue;
                double alpha = 0.0;
                const double* brow = &binv_[static_cast<std::size_t>(r) * m_];
                for (int rr = 0; rr < m_; ++rr) {
                    double a = prob_.at(rr, j);
                    if (a != 0.0) alpha += brow[rr] * a;
                }
                if (std::abs(alpha) > 1e-7) {
                    pivot_col = j;
                    break;
                }
            }
            int art = basic_[r];
            if (pivot_col < 0) {
                // redundant row; pin the artificial at zero inside the basis
                lo_[art] = hi_[art] = 0.0;
                continue;
            }
            column(pivot_col, w);
            double piv = w[r];
            double enter_val = nb_value(pivot_col);
            basic_[r] = pivot_col;
            state_[pivot_col] = NbState::basic;
            state_[art] = NbState::at_lower;
            lo_[art] = hi_[art] = 0.0;
            xb_[r] = enter_val;
            double* prow = &binv_[static_cast<std::size_t>(r) * m_];
            for (int k = 0; k < m_; ++k) prow[k] /= piv;
            for (int k = 0; k < m_; ++k) {
                if (k == r) continue;
                double f = w[k];
                if (f == 0.0) continue;
                double* krow = &binv_[static_cast<std::size_t>(k) * m_];
                for (int rr = 0; rr < m_; ++rr) krow[rr] -= f * prow[rr];
            }
        }
    }

    Solution finish(Solution& sol, Status st) {
        if (st == Status::optimal) {
            refactor();
        }
        sol.status = st;
        sol.iterations = iters_;
        sol.x.assign(n_, 0.0);
        for (int j = 0; j < n_; ++j) sol.x[j] = value(j);
        sol.objective = 0.0;
        for (int j = 0; j < n_; ++j) sol.objective += prob_.c[j] * sol.x[j];
        return sol;
    }
};

} // namespace detail

inline Solution solve(const Problem& p) {
    detail::BoundedSimplex s(p);
    return s.solve();
}

} // namespace gridev::lp
