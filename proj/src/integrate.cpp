#include "atlas/integrate.hpp"

#include <algorithm>
#include <stdexcept>

namespace atlas {

State3 Trajectory::sample(double time) const {
    if (dense.empty()) throw std::logic_error("trajectory has no dense output");
    if (time <= dense.front().t0) return dense.front().eval(dense.front().t0);
    // binary search the covering step
    auto it = std::upper_bound(dense.begin(), dense.end(), time,
                               [](double v, const DenseStep& d) { return v < d.t0; });
    if (it != dense.begin()) --it;
    const double t_hi = it->t0 + it->h;
    if (time > t_hi + 1e-12 * std::max(1.0, std::abs(t_hi)) && std::next(it) == dense.end())
        throw std::out_of_range("sample time beyond trajectory span");
    return it->eval(std::min(time, t_hi));
}

Trajectory integrate(const ModelParams& params, const State3& y0, double t_end,
                     const IntegratorConfig& cfg) {
    model_validate(params, /*dynamical=*/true);
    if (const auto* hr = std::get_if<HRParams>(&params)) return integrate_hr(*hr, y0, t_end, cfg);
    return integrate_fhn(std::get<FHNParams>(params), y0, t_end, cfg);
}

Trajectory integrate_hr(const HRParams& p, const State3& y0, double t_end,
                        const IntegratorConfig& cfg) {
    p.validate(/*dynamical=*/true);
    return integrate_field([&p](const State3& u) { return hr_rhs(u, p); }, y0, t_end, cfg);
}

Trajectory integrate_fhn(const FHNParams& p, const State3& y0, double t_end,
                         const IntegratorConfig& cfg) {
    p.validate();
    return integrate_field([&p](const State3& u) { return fhn_rhs(u, p); }, y0, t_end, cfg);
}

namespace {

bool crossing(double g0, double g1, EventDirection dir) {
    switch (dir) {
        case EventDirection::up: return g0 < 0.0 && g1 > 0.0;
        case EventDirection::down: return g0 > 0.0 && g1 < 0.0;
        case EventDirection::both: return (g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0);
    }
    return false;
}

}  // namespace

std::vector<Event> locate_events(const Trajectory& traj,
                                 const std::function<double(const State3&)>& g,
                                 EventDirection dir) {
    if (!traj.has_dense()) throw std::invalid_argument("locate_events requires dense output");
    std::vector<Event> events;
    const double span = traj.t_final - traj.t.front();
    const double t_tol = 1e-10 * std::max(span, 1e-300);

    for (const DenseStep& ds : traj.dense) {
        // sub-sample each step so that double crossings inside one step are
        // still bracketed
        constexpr int kSub = 4;
        double ta = ds.t0;
        double ga = g(ds.eval(ta));
        for (int s = 1; s <= kSub; ++s) {
            const double tb = ds.t0 + ds.h * (static_cast<double>(s) / kSub);
            const double gb = g(ds.eval(tb));
            if (crossing(ga, gb, dir) && ga != gb) {
                double lo = ta, hi = tb, glo = ga;
                while (hi - lo > t_tol) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = g(ds.eval(mid));
                    if (glo * gm <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                }
                const double tev = 0.5 * (lo + hi);
                events.push_back({tev, ds.eval(tev)});
            }
            ta = tb;
            ga = gb;
        }
    }
    return events;
}

}  // namespace atlas
