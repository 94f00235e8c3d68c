#ifndef ATLAS_INTEGRATE_HPP
#define ATLAS_INTEGRATE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "atlas/models.hpp"

namespace atlas {

struct IntegratorConfig {
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_step = 1.0;
    double max_time = 1e7;   // largest span a single call may cover
    bool dense = true;       // retain dense-output coefficients in the Trajectory
    std::int64_t max_steps = 200'000'000;

    void validate() const {
        if (!(rtol > 0.0 && rtol <= 1e-2) || !(atol > 0.0 && atol <= 1e-2))
            throw std::invalid_argument("integrator tolerances must lie in (0, 1e-2]");
        if (!(max_step > 0.0)) throw std::invalid_argument("max_step must be > 0");
        if (!(max_time > 0.0)) throw std::invalid_argument("max_time must be > 0");
    }
};

enum class TrajStatus { ok, blow_up, stiff_failure };

struct IntegratorStats {
    std::int64_t accepted = 0;
    std::int64_t rejected = 0;
    std::int64_t rhs_evals = 0;
    double final_tolerance = 0.0;  // rtol actually used
};

// Dense-output coefficients of one accepted Dormand-Prince 5(4) step,
// in the Hairer contd5 form. Valid for t in [t0, t0+h].
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    State3 r1, r2, r3, r4, r5;

    State3 eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State3 out;
        for (int i = 0; i < 3; ++i)
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return out;
    }
};

struct Trajectory {
    std::vector<double> t;      // t[0] is the initial time
    std::vector<State3> y;      // y[i] at t[i]
    std::vector<DenseStep> dense;
    TrajStatus status = TrajStatus::ok;
    double t_final = 0.0;       // last valid time reached
    IntegratorStats stats;

    bool has_dense() const { return !dense.empty(); }

    // Dense-output evaluation; t must lie inside the integrated span.
    State3 sample(double time) const;
};

namespace detail {

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner).
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                            a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    // b - bhat
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    // contd5 dense-output weights
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
};

inline double initial_step(const State3& y0, const State3& f0, double rtol, double atol,
                           double span, double max_step) {
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double sk = atol + rtol * std::abs(y0[i]);
        const double a = f0[i] / sk, b = y0[i] / sk;
        dnf += a * a;
        dny += b * b;
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, std::min(span, max_step));
    return h;
}

}  // namespace detail

// Drives the adaptive 5(4) pair from t0 to t1, invoking `sink` once per
// accepted step with the step's dense coefficients and the new state.
// Deterministic for identical inputs. Sink signature:
//   void sink(const DenseStep&, const State3& y_new, const State3& f_new)
template <class F, class Sink>
TrajStatus dopri5_drive(F&& rhs, State3 y, double t0, double t1, const IntegratorConfig& cfg,
                        IntegratorStats& st, Sink&& sink) {
    using T = detail::Dopri5;
    cfg.validate();
    if (!finite(y)) throw std::invalid_argument("initial state must be finite");
    if (!(t1 > t0)) throw std::invalid_argument("integration span must be forward");
    if (t1 - t0 > cfg.max_time) throw std::invalid_argument("span exceeds cfg.max_time");

    constexpr double blow_up_bound = 1e6;
    constexpr double safe = 0.9, beta = 0.04;
    constexpr double expo1 = 0.2 - beta * 0.75;
    constexpr double fac_min = 0.2, fac_max_normal = 10.0;
    const double uround = 2.220446049250313e-16;

    double t = t0;
    State3 k1 = rhs(y);
    ++st.rhs_evals;
    st.final_tolerance = cfg.rtol;
    double h = detail::initial_step(y, k1, cfg.rtol, cfg.atol, t1 - t0, cfg.max_step);
    double err_old = 1e-4;
    bool rejected_last = false;

    while (t < t1) {
        if (st.accepted + st.rejected >= cfg.max_steps) return TrajStatus::stiff_failure;
        if (h < 32.0 * uround * std::max(1.0, std::abs(t))) return TrajStatus::stiff_failure;
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        State3 k2, k3, k4, k5, k6, k7, yt, y1;
        for (int i = 0; i < 3; ++i) yt[i] = y[i] + h * T::a21 * k1[i];
        k2 = rhs(yt);
        for (int i = 0; i < 3; ++i) yt[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
        k3 = rhs(yt);
        for (int i = 0; i < 3; ++i)
            yt[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
        k4 = rhs(yt);
        for (int i = 0; i < 3; ++i)
            yt[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
        k5 = rhs(yt);
        for (int i = 0; i < 3; ++i)
            yt[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] +
                                T::a64 * k4[i] + T::a65 * k5[i]);
        k6 = rhs(yt);
        for (int i = 0; i < 3; ++i)
            y1[i] = y[i] + h * (T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] +
                                T::a75 * k5[i] + T::a76 * k6[i]);
        k7 = rhs(y1);  // FSAL
        st.rhs_evals += 6;

        double err = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double ei = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] +
                                   T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
            const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err = std::max(err, std::abs(ei) / sc);
        }
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            // accept
            ++st.accepted;
            DenseStep ds;
            ds.t0 = t;
            ds.h = h;
            for (int i = 0; i < 3; ++i) {
                const double ydiff = y1[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                ds.r1[i] = y[i];
                ds.r2[i] = ydiff;
                ds.r3[i] = bspl;
                ds.r4[i] = ydiff - h * k7[i] - bspl;
                ds.r5[i] = h * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] + T::d5 * k5[i] +
                                T::d6 * k6[i] + T::d7 * k7[i]);
            }
            t = last ? t1 : t + h;
            y = y1;
            k1 = k7;
            sink(ds, y, k7);
            if (!finite(y) || norm_inf(y) > blow_up_bound) return TrajStatus::blow_up;

            const double err_safe = std::max(err, 1e-16);
            double fac = std::pow(err_safe, expo1) / std::pow(err_old, beta) / safe;
            fac = std::min(1.0 / fac_min, std::max(1.0 / fac_max_normal, fac));
            double h_new = h / fac;
            if (rejected_last) h_new = std::min(h_new, h);
            h = std::min(h_new, cfg.max_step);
            err_old = err_safe;
            rejected_last = false;
        } else {
            ++st.rejected;
            const double fac = std::max(fac_min, safe * std::pow(err, -0.2));
            h *= fac;
            rejected_last = true;
        }
    }
    return TrajStatus::ok;
}

// Integrates an arbitrary autonomous field and records the trajectory.
template <class F>
Trajectory integrate_field(F&& rhs, const State3& y0, double t_end, const IntegratorConfig& cfg) {
    Trajectory traj;
    traj.t.push_back(0.0);
    traj.y.push_back(y0);
    traj.status = dopri5_drive(
        rhs, y0, 0.0, t_end, cfg, traj.stats,
        [&](const DenseStep& ds, const State3& y, const State3&) {
            traj.t.push_back(ds.t0 + ds.h);
            traj.y.push_back(y);
            if (cfg.dense) traj.dense.push_back(ds);
        });
    traj.stats.final_tolerance = cfg.rtol;
    traj.t_final = traj.t.back();
    if (traj.status == TrajStatus::blow_up && traj.t.size() > 1) {
        // drop the non-finite/escaped sample; report the last valid time
        traj.t.pop_back();
        traj.y.pop_back();
        if (cfg.dense && !traj.dense.empty()) traj.dense.pop_back();
        traj.t_final = traj.t.back();
    }
    return traj;
}

Trajectory integrate(const ModelParams& params, const State3& y0, double t_end,
                     const IntegratorConfig& cfg);
Trajectory integrate_hr(const HRParams& p, const State3& y0, double t_end,
                        const IntegratorConfig& cfg);
Trajectory integrate_fhn(const FHNParams& p, const State3& y0, double t_end,
                         const IntegratorConfig& cfg);

enum class EventDirection { up, down, both };

struct Event {
    double t;
    State3 state;
};

// Locates zero crossings of `g(state)` on a trajectory carrying dense output.
// Each crossing is bracketed on an accepted step (with interior sub-sampling)
// and refined by bisection to a time tolerance of 1e-10 * span.
std::vector<Event> locate_events(const Trajectory& traj,
                                 const std::function<double(const State3&)>& g,
                                 EventDirection dir = EventDirection::both);

}  // namespace atlas

#endif
