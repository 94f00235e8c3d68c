#include "atlas/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace atlas {

void SCConfig::validate() const {
    if (!(t_transient > 0.0) || !(t_observe > 0.0))
        throw std::invalid_argument("transient and observation windows must be > 0");
    if (max_spikes < 1) throw std::invalid_argument("max_spikes must be >= 1");
    if (!(return_tol > 0.0)) throw std::invalid_argument("return_tol must be > 0");
    integ.validate();
}

std::string sc_class_token(SCClass c) {
    switch (c) {
        case SCClass::equilibrium: return "equilibrium";
        case SCClass::periodic: return "periodic";
        case SCClass::chaotic_unresolved: return "chaotic/unresolved";
        case SCClass::blow_up: return "blow-up";
    }
    return "chaotic/unresolved";
}

SCClass parse_sc_class(const std::string& token) {
    if (token == "equilibrium") return SCClass::equilibrium;
    if (token == "periodic") return SCClass::periodic;
    if (token == "chaotic/unresolved") return SCClass::chaotic_unresolved;
    if (token == "blow-up") return SCClass::blow_up;
    throw std::invalid_argument("unknown spike-count class '" + token + "'");
}

namespace {

struct Crossing {
    double t;
    State3 state;
};

// scaled sup-norm distance used for Poincare near-returns
double return_distance(const State3& a, const State3& ref) {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
        d = std::max(d, std::abs(a[i] - ref[i]) / (1.0 + std::abs(ref[i])));
    return d;
}

// Collects up-crossings of state[0] - threshold on the fly; each accepted
// step is sub-sampled on dense output so double crossings are not lost.
template <class F>
class SpikeCollector {
  public:
    SpikeCollector(F rhs, double threshold, double t_tol)
        : rhs_(rhs), threshold_(threshold), t_tol_(t_tol) {}

    void operator()(const DenseStep& ds, const State3& y_new, const State3&) {
        constexpr int kSub = 4;
        double ta = ds.t0;
        double ga = prev_g_;
        for (int s = 1; s <= kSub; ++s) {
            const double tb = ds.t0 + ds.h * (static_cast<double>(s) / kSub);
            const State3 yb = (s == kSub) ? y_new : ds.eval(tb);
            const double gb = yb.x - threshold_;
            if (ga < 0.0 && gb > 0.0) {
                double lo = ta, hi = tb, glo = ga;
                while (hi - lo > t_tol_) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = ds.eval(mid).x - threshold_;
                    if (glo * gm <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                }
                const double tc = 0.5 * (lo + hi);
                crossings_.push_back({tc, ds.eval(tc)});
            }
            ta = tb;
            ga = gb;
        }
        prev_g_ = y_new.x - threshold_;
        final_state_ = y_new;
        has_state_ = true;
    }

    void prime(const State3& y0) {
        prev_g_ = y0.x - threshold_;
        final_state_ = y0;
        has_state_ = true;
    }

    const std::vector<Crossing>& crossings() const { return crossings_; }
    const State3& final_state() const { return final_state_; }

  private:
    F rhs_;
    double threshold_;
    double t_tol_;
    double prev_g_ = 0.0;
    std::vector<Crossing> crossings_;
    State3 final_state_{};
    bool has_state_ = false;
};

SpikeCountResult classify(const std::vector<Crossing>& cr, const State3& final_state,
                          const ModelParams& params, const SCConfig& cfg) {
    SpikeCountResult res;
    if (cr.empty()) {
        const double v = norm_inf(model_rhs(params, final_state));
        res.cls = v < 1e-8 ? SCClass::equilibrium : SCClass::chaotic_unresolved;
        return res;
    }
    const int n = static_cast<int>(cr.size()) - 1;  // index of the last crossing
    const State3& ref = cr[n].state;
    for (int j = n - 1; j >= 0; --j) {
        if (return_distance(cr[j].state, ref) >= cfg.return_tol) continue;
        const int k = n - j;
        if (j < k) break;  // not enough history to confirm a full cycle
        bool verified = true;
        for (int i = 1; i <= k && verified; ++i)
            if (return_distance(cr[j - i].state, cr[n - i].state) >= cfg.return_tol)
                verified = false;
        if (!verified) continue;
        if (k > cfg.max_spikes) break;  // beyond the cap: report unresolved
        res.cls = SCClass::periodic;
        res.spikes = k;
        res.period = cr[n].t - cr[j].t;
        return res;
    }
    res.cls = SCClass::chaotic_unresolved;
    return res;
}

SpikeCountResult count_spikes_from(const ModelParams& params, const SCConfig& cfg,
                                   const State3& start, State3* final_out) {
    auto rhs = [&params](const State3& u) { return model_rhs(params, u); };

    // settle
    State3 y = start;
    IntegratorStats st;
    TrajStatus status = dopri5_drive(rhs, y, 0.0, cfg.t_transient, cfg.integ, st,
                                     [&y](const DenseStep&, const State3& yn, const State3&) {
                                         y = yn;
                                     });
    if (status != TrajStatus::ok) {
        if (final_out) *final_out = y;
        return {SCClass::blow_up, 0, 0.0};
    }

    // observe
    SpikeCollector collector(rhs, cfg.x_threshold, 1e-10 * cfg.t_observe);
    collector.prime(y);
    status = dopri5_drive(rhs, y, cfg.t_transient, cfg.t_transient + cfg.t_observe, cfg.integ, st,
                          collector);
    if (final_out) *final_out = collector.final_state();
    if (status != TrajStatus::ok) return {SCClass::blow_up, 0, 0.0};
    return classify(collector.crossings(), collector.final_state(), params, cfg);
}

}  // namespace

SpikeCountResult count_spikes(const ModelParams& params, const SCConfig& cfg) {
    cfg.validate();
    model_validate(params, /*dynamical=*/true);
    return count_spikes_from(params, cfg, cfg.initial_state, nullptr);
}

int SpikeGrid::distinct_positive_spike_counts() const {
    std::vector<int> counts;
    for (const auto& c : cells)
        if (c.cls == SCClass::periodic && c.spikes > 0) counts.push_back(c.spikes);
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    return static_cast<int>(counts.size());
}

SpikeGrid sc_sweep(const SliceSpec& slice, int nx, int ny, const SCConfig& cfg, int workers) {
    cfg.validate();
    if (nx < 2 || ny < 2) throw std::invalid_argument("grid dimensions must be >= 2x2");
    if (!(slice.axis1.lo < slice.axis1.hi) || !(slice.axis2.lo < slice.axis2.hi))
        throw std::invalid_argument("axis ranges must be increasing and finite");
    if (workers < 1) workers = 1;

    SpikeGrid grid;
    grid.slice = slice;
    grid.nx = nx;
    grid.ny = ny;
    grid.cells.assign(static_cast<size_t>(nx) * ny, {});

    // Rows are independent tasks; the reduction is positional, so results are
    // identical no matter how rows are scheduled across workers.
    std::atomic<int> next_row{0};
    auto run_rows = [&]() {
        for (;;) {
            const int j = next_row.fetch_add(1);
            if (j >= ny) return;
            const double p2 = grid.coord2(j);
            State3 carry = cfg.initial_state;
            for (int i = 0; i < nx; ++i) {
                ModelParams params = slice.base;
                set_param(params, slice.axis1.name, grid.coord1(i));
                set_param(params, slice.axis2.name, p2);
                const State3 start =
                    cfg.policy == InitialStatePolicy::fixed ? cfg.initial_state : carry;
                State3 final_state;
                grid.cells[static_cast<size_t>(j) * nx + i] =
                    count_spikes_from(params, cfg, start, &final_state);
                if (cfg.policy == InitialStatePolicy::previous_cell &&
                    grid.cells[static_cast<size_t>(j) * nx + i].cls != SCClass::blow_up)
                    carry = final_state;
            }
        }
    };

    if (workers == 1) {
        run_rows();
    } else {
        std::vector<std::thread> pool;
        const int n_threads = std::min(workers, ny);
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(run_rows);
        for (auto& t : pool) t.join();
    }
    return grid;
}

namespace {

// edge of the node grid: horizontal (between (i,j)-(i+1,j)) or vertical
struct EdgeKey {
    int orient;  // 0 horizontal, 1 vertical
    int i, j;
    auto operator<=>(const EdgeKey&) const = default;
};

}  // namespace

std::vector<Polyline3> find_sc_boundary(const SpikeGrid& grid, int n) {
    if (n < 0) throw std::invalid_argument("band index must be >= 0");
    const int nx = grid.nx, ny = grid.ny;
    double eps_fixed = 0.0;
    try {
        eps_fixed = get_param(grid.slice.base, "eps");
    } catch (const std::invalid_argument&) {
        eps_fixed = 0.0;
    }

    auto masked = [&](int i, int j) {
        const SpikeCountResult& c = grid.at(i, j);
        return c.cls == SCClass::periodic && (c.spikes == n || c.spikes == n + 1);
    };
    auto hot = [&](int i, int j) { return grid.at(i, j).spikes == n + 1; };

    auto node_pos = [&](int i, int j) {
        return Vec3{grid.coord1(i), grid.coord2(j), eps_fixed};
    };
    auto edge_midpoint = [&](const EdgeKey& e) {
        const Vec3 a = node_pos(e.i, e.j);
        const Vec3 b = e.orient == 0 ? node_pos(e.i + 1, e.j) : node_pos(e.i, e.j + 1);
        return (a + b) * 0.5;
    };

    // collect segments as pairs of crossed edges, square by square
    std::map<EdgeKey, std::vector<EdgeKey>> adjacency;
    auto add_segment = [&](const EdgeKey& a, const EdgeKey& b) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    };

    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            if (!masked(i, j) || !masked(i + 1, j) || !masked(i + 1, j + 1) || !masked(i, j + 1))
                continue;
            const int code = (hot(i, j) ? 1 : 0) | (hot(i + 1, j) ? 2 : 0) |
                             (hot(i + 1, j + 1) ? 4 : 0) | (hot(i, j + 1) ? 8 : 0);
            const EdgeKey bottom{0, i, j}, right{1, i + 1, j}, top{0, i, j + 1}, left{1, i, j};
            switch (code) {
                case 0: case 15: break;
                case 1: case 14: add_segment(left, bottom); break;
                case 2: case 13: add_segment(bottom, right); break;
                case 3: case 12: add_segment(left, right); break;
                case 4: case 11: add_segment(right, top); break;
                case 6: case 9: add_segment(bottom, top); break;
                case 7: case 8: add_segment(left, top); break;
                case 5:  // diagonal: keep the two value-1 corners separated
                    add_segment(left, bottom);
                    add_segment(right, top);
                    break;
                case 10:
                    add_segment(bottom, right);
                    add_segment(left, top);
                    break;
                default: break;
            }
        }
    }

    // chain edges: every node has degree <= 2, so components are paths or loops
    std::vector<Polyline3> out;
    std::map<EdgeKey, bool> used;
    for (const auto& [k, nb] : adjacency) used[k] = false;

    auto walk = [&](const EdgeKey& start) {
        std::vector<EdgeKey> chain{start};
        used[start] = true;
        EdgeKey prev = start, cur = start;
        bool loop = false;
        for (;;) {
            const auto& nb = adjacency.at(cur);
            EdgeKey nxt{};
            bool found = false;
            for (const auto& cand : nb) {
                if (cand == prev && !(nb.size() == 1)) continue;
                if (used.at(cand)) {
                    if (cand == start && chain.size() > 2) loop = true;
                    continue;
                }
                nxt = cand;
                found = true;
                break;
            }
            if (!found) break;
            chain.push_back(nxt);
            used[nxt] = true;
            prev = cur;
            cur = nxt;
        }
        Polyline3 line;
        line.role = PolylineRole::sc_boundary;
        line.closed = loop;
        for (const auto& e : chain) line.points.push_back(edge_midpoint(e));
        return line;
    };

    // open chains first (start at degree-1 edges), then leftover loops
    for (const auto& [k, nb] : adjacency) {
        if (!used.at(k) && nb.size() == 1) {
            Polyline3 line = walk(k);
            if (line.points.size() >= 2) out.push_back(std::move(line));
        }
    }
    for (const auto& [k, nb] : adjacency) {
        if (!used.at(k)) {
            Polyline3 line = walk(k);
            if (line.points.size() >= 2) out.push_back(std::move(line));
        }
    }
    return out;
}

}  // namespace atlas
