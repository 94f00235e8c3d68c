// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. The slow spike-count sweeps run with progress notes on
// stderr.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "atlas/gallery.hpp"
#include "atlas/geom.hpp"
#include "atlas/localbif.hpp"
#include "atlas/sweep.hpp"
#include "oracles.hpp"

using namespace atlas;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("%s  %2d. %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

// ---------------------------------------------------------------------------

void criterion_1_normal_form_morse() {
    bool ok = true;
    std::string detail;

    auto check_surface = [&](SurfaceKind kind, MorseKind want_kind, const char* want_class) {
        const auto t0 = std::chrono::steady_clock::now();
        const SurfaceMesh mesh = sample_mesh(make_surface(kind), 64);
        const MorseReport rep = pl_critical_points(mesh, 2);
        const double dt = seconds_since(t0);
        bool good = rep.points.size() == 1 && rep.multisaddles.empty();
        if (good) {
            const CriticalPoint& cp = rep.points[0];
            good = cp.kind == want_kind && cp.geometric_class() == want_class &&
                   norm(cp.location) <= 2.0 * mesh.median_edge_length();
        }
        good = good && dt < 5.0;
        if (!good) ok = false;
        char buf[160];
        std::snprintf(buf, sizeof(buf), " [%s: %zu pts, %.1fs]", surface_kind_name(kind).c_str(),
                      rep.points.size(), dt);
        detail += buf;
    };
    check_surface(SurfaceKind::isola_plus, MorseKind::maximum, "isola-type");
    check_surface(SurfaceKind::saddle, MorseKind::saddle, "saddle-type");
    report(1, ok, "normal-form Morse analysis: isola max + saddle, within 2 edge-lengths" + detail);
}

void criterion_2_cusp_discriminant() {
    const auto t0 = std::chrono::steady_clock::now();
    const AnalyticSurface cusp = make_surface(SurfaceKind::cusp);
    const ScalarField3 field = [cusp](const Vec3& p) { return cusp.eval(p); };

    const FoldSet set = fold_set_implicit(field, cusp.box, 32);
    bool ok = !set.folds.empty();

    // box-scaled: max |27 e1^2 + 4 e2^3| over [-1,1]^2 is 31
    const double scale = 31.0;
    int n_points = 0;
    double worst = 0.0;
    for (const Polyline3& proj : set.projections) {
        for (const Vec3& p : proj.points) {
            worst = std::max(worst, std::abs(27.0 * p.x * p.x + 4.0 * p.y * p.y * p.y));
            ++n_points;
        }
    }
    ok = ok && n_points > 0 && worst < 1e-6 * scale;

    ok = ok && set.cusps.size() == 1 && norm(set.cusps[0].location) < 1e-4;

    // root counts: 3 inside / 1 outside at 200 points >= 1e-3 from the curve
    auto curve_distance = [](double e1, double e2) {
        double best = 1e300;
        for (int i = 0; i <= 4800; ++i) {
            const double t = -1.2 + 2.4 * i / 4800;
            best = std::min(best, std::hypot(e1 - 2.0 * t * t * t, e2 + 3.0 * t * t));
        }
        return best;
    };
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    int tested = 0, correct = 0;
    while (tested < 200) {
        const double e1 = dist(gen), e2 = dist(gen);
        if (curve_distance(e1, e2) < 1e-3) continue;
        ++tested;
        const LineRoots r = count_roots_line(field, e1, e2, -2.0, 2.0);
        const bool inside = 27.0 * e1 * e1 + 4.0 * e2 * e2 * e2 < 0.0;
        if (r.count == (inside ? 3 : 1)) ++correct;
    }
    ok = ok && correct == 200;
    const double dt = seconds_since(t0);
    ok = ok && dt < 10.0;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "cusp discriminant: |27e1^2+4e2^3| worst %.2e, cusp |loc| %.2e, "
                  "roots %d/200, %.1fs",
                  worst, set.cusps.empty() ? 1.0 : norm(set.cusps[0].location), correct, dt);
    report(2, ok, buf);
}

void criterion_3_reeb_topology() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    {  // two-well: births and merge, CaseII
        const SurfaceMesh mesh = sample_mesh(make_surface(SurfaceKind::two_well), 48);
        const ReebGraph g = build_reeb(mesh, 2, linspace(-0.34, 0.199, 23));
        int births = 0, merges = 0;
        bool heights_ok = true;
        for (const ReebNode& n : g.nodes) {
            if (n.type == ReebEventType::birth) {
                ++births;
                heights_ok = heights_ok && std::abs(n.eps + 0.25) < 0.02;
            }
            if (n.type == ReebEventType::merge) {
                ++merges;
                heights_ok = heights_ok && std::abs(n.eps) < 0.02;
            }
        }
        const TopologyClass cls = classify_topology(g);
        const bool good = births == 2 && merges == 1 && heights_ok &&
                          cls.c == TopologyCase::case_ii;
        detail += std::string(" [two-well->") + topology_case_name(cls.c) + "]";
        ok = ok && good;
    }
    {  // thin tube: CaseI
        const SurfaceMesh mesh = sample_mesh(make_surface(SurfaceKind::thin_tube), 16);
        const Box3 b = mesh.bounds();
        const ReebGraph g = build_reeb(mesh, 2, linspace(b.lo.z + 1e-6, b.hi.z - 1e-6, 9));
        const TopologyClass cls = classify_topology(g);
        detail += std::string(" [tube->") + topology_case_name(cls.c) + "]";
        ok = ok && cls.c == TopologyCase::case_i;
    }
    {  // two caps: CaseIII
        const SurfaceMesh mesh = sample_mesh(make_surface(SurfaceKind::two_caps), 40);
        const ReebGraph g = build_reeb(mesh, 2, linspace(-0.08, 0.53, 22));
        const TopologyClass cls = classify_topology(g);
        detail += std::string(" [caps->") + topology_case_name(cls.c) + "]";
        ok = ok && cls.c == TopologyCase::case_iii;
    }
    {  // pants plus disc with the shared boundary curve: CaseIIb
        const SurfaceMesh mesh = sample_mesh(make_surface(SurfaceKind::pants_plus_disc), 40);
        const ReebGraph g = build_reeb(mesh, 2, linspace(-0.185, 0.185, 25));
        const std::vector<Polyline3> codim2 = {pants_plus_disc_shared_curve()};
        const TopologyClass cls = classify_topology(g, &codim2);
        detail += std::string(" [duck-foot->") + topology_case_name(cls.c) + "]";
        ok = ok && cls.c == TopologyCase::case_iib;
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 30.0;
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %.1fs", dt);
    report(3, ok, "Reeb/topology cases" + detail + buf);
}

void criterion_4_torus_morse() {
    const SurfaceMesh mesh = sample_mesh(make_surface(SurfaceKind::torus), 48);
    const MorseReport rep = pl_critical_points(mesh, 2);
    int mins = 0, maxs = 0, saddles = 0;
    for (const CriticalPoint& cp : rep.points) {
        if (cp.kind == MorseKind::minimum) ++mins;
        else if (cp.kind == MorseKind::maximum) ++maxs;
        else ++saddles;
    }
    const bool ok = rep.multisaddles.empty() && mins == 1 && maxs == 1 && saddles == 2 &&
                    (mins - saddles + maxs) == 0;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "torus Morse identity: %d min + %d max + %d saddles, chi = %d",
                  mins, maxs, saddles, mins - saddles + maxs);
    report(4, ok, buf);
}

void criterion_5_hr_equilibria_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> db(2.0, 3.5), di(0.0, 6.0);
    bool ok = true;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        HRParams p;
        p.b = db(gen);
        p.I = di(gen);
        p.eps = 0.018;
        const auto eqs = hr_equilibria(p);
        auto cubic = [&](double x) {
            return p.a * x * x * x + (p.d - p.b) * x * x + p.s * x - (p.c + p.s * p.x0 + p.I);
        };
        const double bound =
            1.0 + std::max({std::abs(p.d - p.b), std::abs(p.s), std::abs(p.c + p.s * p.x0 + p.I)});
        const auto oracle = oracles::scan_bisect_roots(cubic, -bound, bound);
        if (eqs.size() != oracle.size()) {
            ok = false;
            break;
        }
        for (size_t i = 0; i < eqs.size(); ++i)
            if (std::abs(eqs[i].state.x - oracle[i]) >= 1e-10) ok = false;

        // exact eps-independence
        std::vector<State3> reference;
        for (const auto& e : eqs) reference.push_back(e.state);
        for (double eps : {1e-3, 0.1}) {
            p.eps = eps;
            const auto again = hr_equilibria(p);
            if (again.size() != reference.size()) ok = false;
            for (size_t i = 0; i < again.size() && ok; ++i) {
                if (again[i].state.x != reference[i].x || again[i].state.y != reference[i].y ||
                    again[i].state.z != reference[i].z)
                    ok = false;
            }
            p.eps = 0.018;
        }
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 2.0;
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "HR equilibria vs bisection oracle (1000 draws), eps-invariant, %.2fs", dt);
    report(5, ok, buf);
}

void criterion_6_test_functions() {
    Mat3 companion;  // of lambda^3 + lambda^2 + lambda + 1: eigenvalues i, -i, -1
    companion(0, 1) = 1.0;
    companion(1, 2) = 1.0;
    companion(2, 0) = -1.0;
    companion(2, 1) = -1.0;
    companion(2, 2) = -1.0;
    const TestFunctionValues hopf_case = test_functions(companion);

    Mat3 singular;
    singular(0, 0) = 1.0;
    singular(0, 1) = 2.0;
    singular(1, 1) = 3.0;  // zero third row
    const TestFunctionValues fold_case = test_functions(singular);

    const bool ok = std::abs(hopf_case.hopf) < 1e-12 && hopf_case.hopf_admissible &&
                    fold_case.fold == 0.0;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "test functions: hopf residual %.1e, singular fold %.1f",
                  hopf_case.hopf, fold_case.fold);
    report(6, ok, buf);
}

void criterion_7_continuation_circle() {
    const auto t0 = std::chrono::steady_clock::now();
    ContinuationMap F = [](const std::vector<double>& u, std::vector<double>& f) {
        f[0] = u[0] * u[0] + u[1] * u[1] - 1.0;
    };
    ContinuationConfig cfg;
    cfg.step = 0.05;
    const ContinuationCurve curve = continue_curve(F, 1, {1.0, 0.0}, cfg);
    double worst = 0.0;
    for (const auto& p : curve.points)
        worst = std::max(worst, std::abs(std::hypot(p[0], p[1]) - 1.0));
    const double dt = seconds_since(t0);
    const bool ok =
        curve.termination == ContinuationStop::closed_loop && worst < 1e-8 && dt < 1.0;
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "continuation closes the unit circle: radial deviation %.1e, %.2fs", worst, dt);
    report(7, ok, buf);
}

struct SweepResults {
    SpikeGrid g8;       // eps = 0.018 at rtol 1e-8 (serial)
    SpikeGrid g8_eps08; // eps = 0.08 at rtol 1e-8
};

SweepResults criterion_8_sweep() {
    SliceSpec slice;
    HRParams base;
    base.eps = 0.018;
    slice.base = base;
    slice.axis1 = {"b", 2.5, 3.5};
    slice.axis2 = {"I", 1.0, 6.0};
    SCConfig cfg;

    // smoke: 21x21 under 60 s
    const auto t_smoke = std::chrono::steady_clock::now();
    const SpikeGrid smoke = sc_sweep(slice, 21, 21, cfg, 1);
    const double dt_smoke = seconds_since(t_smoke);
    bool ok = dt_smoke < 60.0 && smoke.distinct_positive_spike_counts() >= 3;

    std::fprintf(stderr, "[acceptance] smoke 21x21 done in %.1fs; starting 101x101 serial\n",
                 dt_smoke);

    const auto t_big = std::chrono::steady_clock::now();
    SpikeGrid serial = sc_sweep(slice, 101, 101, cfg, 1);
    std::fprintf(stderr, "[acceptance] serial done in %.0fs; parallel\n", seconds_since(t_big));
    const SpikeGrid parallel = sc_sweep(slice, 101, 101, cfg, 8);

    bool identical = serial.cells.size() == parallel.cells.size();
    for (size_t i = 0; i < serial.cells.size() && identical; ++i) {
        identical = serial.cells[i].cls == parallel.cells[i].cls &&
                    serial.cells[i].spikes == parallel.cells[i].spikes &&
                    serial.cells[i].period == parallel.cells[i].period;
    }
    ok = ok && identical;

    std::fprintf(stderr, "[acceptance] parallel matched=%d; rtol 1e-10 sweep\n",
                 identical ? 1 : 0);
    SCConfig tight = cfg;
    tight.integ.rtol = 1e-10;
    tight.integ.atol = 1e-12;
    const SpikeGrid g10 = sc_sweep(slice, 101, 101, tight, 8);
    int periodic = 0, preserved = 0;
    for (size_t i = 0; i < serial.cells.size(); ++i) {
        if (serial.cells[i].cls != SCClass::periodic) continue;
        ++periodic;
        if (g10.cells[i].cls == SCClass::periodic &&
            g10.cells[i].spikes == serial.cells[i].spikes)
            ++preserved;
    }
    const double frac = periodic ? static_cast<double>(preserved) / periodic : 0.0;
    ok = ok && frac >= 0.95;

    const int distinct = serial.distinct_positive_spike_counts();
    ok = ok && distinct >= 3;

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "101x101 sweep: serial==parallel %s, (class,count) preserved %.1f%% "
                  "(%d/%d), distinct counts %d, smoke %.1fs",
                  identical ? "yes" : "NO", 100.0 * frac, preserved, periodic, distinct,
                  dt_smoke);
    report(8, ok, buf);

    std::fprintf(stderr, "[acceptance] eps=0.08 sweep for criterion 9\n");
    SweepResults out;
    set_param(slice.base, "eps", 0.08);
    out.g8_eps08 = sc_sweep(slice, 101, 101, cfg, 8);
    out.g8 = std::move(serial);
    return out;
}

void criterion_9_band_evolution(const SweepResults& sweeps) {
    auto component_count = [](const SpikeGrid& g) {
        int max_spikes = 0;
        for (const auto& c : g.cells)
            if (c.cls == SCClass::periodic) max_spikes = std::max(max_spikes, c.spikes);
        int total = 0;
        for (int n = 0; n < max_spikes; ++n)
            total += static_cast<int>(find_sc_boundary(g, n).size());
        return total;
    };
    const int low_eps = component_count(sweeps.g8);
    const int high_eps = component_count(sweeps.g8_eps08);
    const bool ok = low_eps > high_eps;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "band evolution: boundary components %d at eps=0.018 vs %d at eps=0.08",
                  low_eps, high_eps);
    report(9, ok, buf);
}

void criterion_10_invisible_folds() {
    const SurfaceMesh tube = sample_mesh(make_surface(SurfaceKind::thin_tube), 32);
    int correct = 0, total = 0;
    for (int k = 0; k < 10; ++k) {
        Codim2Params prm;
        prm.eps_center = -0.5 + 0.1 * k;
        prm.side = (k % 2 == 0) ? +1 : -1;
        {
            const Polyline3 c = synthetic_codim2(Codim2Kind::on_sharp_fold, prm);
            const auto folds = curve_folds(c, 2);
            ++total;
            if (folds.size() == 1 &&
                fold_visibility(folds[0], tube) == FoldVisibility::invisible)
                ++correct;
        }
        {
            const Polyline3 c = synthetic_codim2(Codim2Kind::mid_leaf, prm);
            const auto folds = curve_folds(c, 2);
            ++total;
            if (folds.size() == 1 && fold_visibility(folds[0], tube) == FoldVisibility::visible)
                ++correct;
        }
    }
    const bool ok = total == 20 && correct == 20;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "invisible-fold classification: %d/%d constructed cases",
                  correct, total);
    report(10, ok, buf);
}

}  // namespace

int main() {
    std::printf("atlas acceptance suite\n");
    criterion_1_normal_form_morse();
    criterion_2_cusp_discriminant();
    criterion_3_reeb_topology();
    criterion_4_torus_morse();
    criterion_5_hr_equilibria_oracle();
    criterion_6_test_functions();
    criterion_7_continuation_circle();
    const SweepResults sweeps = criterion_8_sweep();
    criterion_9_band_evolution(sweeps);
    criterion_10_invisible_folds();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", g_failures);
    return 1;
}
