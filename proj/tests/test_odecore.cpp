#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "atlas/integrate.hpp"
#include "atlas/models.hpp"
#include "oracles.hpp"

using namespace atlas;

TEST_CASE("hr_rhs matches the written-out formulas") {
    HRParams p;
    p.b = 3.0;
    p.I = 2.0;
    p.eps = 0.01;
    const State3 f = hr_rhs({0, 0, 0}, p);
    CHECK(f.x == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(f.y == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.z == doctest::Approx(0.064).epsilon(1e-15));
}

TEST_CASE("hr_rhs vanishes at the unique equilibrium forced by algebra") {
    HRParams p;
    p.b = 3.0;
    p.I = 5.4;
    for (double eps : {1e-3, 0.018, 0.3}) {
        p.eps = eps;
        const State3 f = hr_rhs({0.0, 1.0, 6.4}, p);
        CHECK(std::abs(f.x) < 1e-14);
        CHECK(std::abs(f.y) < 1e-14);
        CHECK(std::abs(f.z) < 1e-14);
    }
}

TEST_CASE("hr_rhs agrees with an independently coded evaluator") {
    auto gen = oracles::rng();
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        HRParams p;
        p.b = 2.0 + 0.5 * dist(gen);
        p.I = 3.0 + dist(gen);
        p.eps = 0.01 + 0.01 * std::abs(dist(gen));
        const State3 u{dist(gen), dist(gen), dist(gen)};
        const State3 a = hr_rhs(u, p);
        const State3 b = oracles::hr_rhs_dup(u, p);
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(a[c] - b[c]) <= 1e-13 * (1.0 + std::abs(a[c])));
    }
}

TEST_CASE("fhn_rhs origin and displaced equilibria") {
    FHNParams p;
    p.p = 0.0;
    CHECK(norm_inf(fhn_rhs({0, 0, 0}, p)) == 0.0);
    p.p = 0.7;
    CHECK(norm_inf(fhn_rhs({0, 0, 0.7}, p)) == 0.0);
}

TEST_CASE("fhn_rhs rejects invalid parameters") {
    FHNParams p;
    p.delta = 0.0;
    CHECK_THROWS_AS(fhn_rhs({0, 0, 0}, p), std::invalid_argument);
    p.delta = 1.0;
    p.s = 0.0;
    CHECK_THROWS_AS(fhn_rhs({0, 0, 0}, p), std::invalid_argument);
}

TEST_CASE("fhn_rhs duplicate-evaluator agreement") {
    auto gen = oracles::rng(7);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        FHNParams p;
        p.alpha = dist(gen);
        p.s = 0.5 + std::abs(dist(gen));
        p.eps = 0.05 + 0.02 * std::abs(dist(gen));
        p.gamma = 0.3 * dist(gen);
        p.p = dist(gen);
        const State3 u{dist(gen), dist(gen), dist(gen)};
        const State3 a = fhn_rhs(u, p);
        const State3 b = oracles::fhn_rhs_dup(u, p);
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(a[c] - b[c]) <= 1e-13 * (1.0 + std::abs(a[c])));
    }
}

TEST_CASE("analytic Jacobians: fixed entries") {
    HRParams hp;
    auto gen = oracles::rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const State3 u{dist(gen), dist(gen), dist(gen)};
        const Mat3 j = hr_jacobian(u, hp);
        CHECK(j(0, 1) == 1.0);
        CHECK(j(2, 2) == -hp.eps);
    }
    CHECK(hr_jacobian({0, 1, 2}, hp)(1, 0) == 0.0);
    FHNParams fp;
    CHECK(fhn_jacobian({0.3, -1, 0.5}, fp)(0, 1) == 1.0);
}

TEST_CASE("analytic Jacobians match central finite differences") {
    auto gen = oracles::rng(13);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        HRParams hp;
        hp.b = 2.5 + 0.5 * dist(gen);
        hp.I = 2.0 + dist(gen);
        hp.eps = 0.02 + 0.01 * std::abs(dist(gen));
        const State3 u{dist(gen), dist(gen), dist(gen)};
        const Mat3 ja = hr_jacobian(u, hp);
        const Mat3 jf = oracles::fd_jacobian([&](const State3& v) { return hr_rhs(v, hp); }, u);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(ja(r, c) - jf(r, c)) <= 1e-6 * (1.0 + std::abs(ja(r, c))));
    }
    for (int i = 0; i < 100; ++i) {
        FHNParams fp;
        fp.alpha = dist(gen);
        fp.s = 0.7 + std::abs(dist(gen));
        fp.gamma = 0.4 * dist(gen);
        const State3 u{dist(gen), dist(gen), dist(gen)};
        const Mat3 ja = fhn_jacobian(u, fp);
        const Mat3 jf = oracles::fd_jacobian([&](const State3& v) { return fhn_rhs(v, fp); }, u);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(ja(r, c) - jf(r, c)) <= 1e-6 * (1.0 + std::abs(ja(r, c))));
    }
}

TEST_CASE("integrator: exponential decay hits e^-1") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-10;
    auto decay = [](const State3& u) { return State3{0.0, 0.0, -u.z}; };
    const Trajectory tr = integrate_field(decay, {0, 0, 1}, 1.0, cfg);
    REQUIRE(tr.status == TrajStatus::ok);
    CHECK(std::abs(tr.y.back().z - std::exp(-1.0)) < 10.0 * cfg.rtol);
}

TEST_CASE("integrator: HR stays put at an equilibrium") {
    HRParams p;
    p.b = 3.0;
    p.I = 5.4;
    p.eps = 0.018;
    IntegratorConfig cfg;
    cfg.dense = false;
    const State3 eq{0.0, 1.0, 6.4};
    const Trajectory tr = integrate_hr(p, eq, 100.0, cfg);
    REQUIRE(tr.status == TrajStatus::ok);
    for (const State3& s : tr.y) CHECK(norm_inf(s - eq) < 1e-6);
}

TEST_CASE("integrator: determinism is bit-exact") {
    HRParams p;
    p.eps = 0.018;
    IntegratorConfig cfg;
    const Trajectory a = integrate_hr(p, {0, 0, 0}, 200.0, cfg);
    const Trajectory b = integrate_hr(p, {0, 0, 0}, 200.0, cfg);
    REQUIRE(a.t.size() == b.t.size());
    for (size_t i = 0; i < a.t.size(); ++i) {
        CHECK(a.t[i] == b.t[i]);
        CHECK(a.y[i].x == b.y[i].x);
        CHECK(a.y[i].y == b.y[i].y);
        CHECK(a.y[i].z == b.y[i].z);
    }
}

TEST_CASE("integrator: blow-up reports last valid time") {
    auto grow = [](const State3& u) { return State3{u.x * u.x + 1.0, 0.0, 0.0}; };
    IntegratorConfig cfg;
    const Trajectory tr = integrate_field(grow, {1, 0, 0}, 10.0, cfg);
    CHECK(tr.status == TrajStatus::blow_up);
    CHECK(tr.t_final < 10.0);
    for (const State3& s : tr.y) CHECK(norm_inf(s) <= 1e6);
}

TEST_CASE("integrator: convergence is monotone toward the tight reference") {
    HRParams p;
    p.b = 3.0;
    p.I = 2.0;
    p.eps = 0.018;
    IntegratorConfig ref_cfg;
    ref_cfg.rtol = 1e-12;
    ref_cfg.atol = 1e-14;
    ref_cfg.dense = false;
    const double t_end = 200.0;
    const State3 ref = integrate_hr(p, {0, 0, 0}, t_end, ref_cfg).y.back();

    double prev_err = std::numeric_limits<double>::infinity();
    for (double rtol : {1e-5, 5e-6, 2.5e-6, 1.25e-6, 6.25e-7}) {
        IntegratorConfig cfg;
        cfg.rtol = rtol;
        cfg.atol = rtol * 1e-2;
        cfg.dense = false;
        const State3 yf = integrate_hr(p, {0, 0, 0}, t_end, cfg).y.back();
        const double err = norm_inf(yf - ref);
        CHECK(err <= prev_err);
        prev_err = err;
    }
}

TEST_CASE("integrator: pinned final state of the long HR reference orbit") {
    // frozen from a rtol 1e-12 reference run (tests/pin_oracles); the default
    // tolerance lands ~6e-8 away
    const State3 reference{-1.4455207763708586, -9.4994413742376356, 1.7848142251688097};
    HRParams p;
    p.b = 3.0;
    p.I = 2.0;
    p.eps = 0.018;
    IntegratorConfig cfg;
    cfg.dense = false;
    const Trajectory tr = integrate_hr(p, {0, 0, 0}, 2000.0, cfg);
    REQUIRE(tr.status == TrajStatus::ok);
    CHECK(norm_inf(tr.y.back() - reference) < 1e-6);
}

TEST_CASE("locate_events: HR spike count equals the visual spike count") {
    // settle, then compare threshold up-crossings against counted maxima of
    // the fast variable above the threshold on the same reference run
    HRParams p;
    p.b = 3.0;
    p.I = 2.0;
    p.eps = 0.018;
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    cfg.dense = false;
    const Trajectory settle = integrate_hr(p, {-1.6, 4.0, 0.0}, 1000.0, cfg);
    IntegratorConfig obs = cfg;
    obs.dense = true;
    const Trajectory tr = integrate_hr(p, settle.y.back(), 500.0, obs);
    const auto ups = locate_events(tr, [](const State3& u) { return u.x; }, EventDirection::up);
    int maxima_above = 0;
    for (size_t i = 1; i + 1 < tr.y.size(); ++i)
        if (tr.y[i].x > tr.y[i - 1].x && tr.y[i].x > tr.y[i + 1].x && tr.y[i].x > 0.0)
            ++maxima_above;
    CHECK(ups.size() == static_cast<size_t>(maxima_above));
    CHECK(ups.size() >= 5);  // several bursts fit in the window (period ~68)
}

TEST_CASE("integrator config validation") {
    IntegratorConfig cfg;
    cfg.rtol = 0.5;  // above the (0, 1e-2] cap
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = IntegratorConfig{};
    cfg.max_step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("locate_events: harmonic oscillator zero crossings") {
    // x'' = -x as a first-order system; x(t) = sin t.
    auto osc = [](const State3& u) { return State3{u.y, -u.x, 0.0}; };
    IntegratorConfig cfg;
    const double t_end = 25.0;
    const Trajectory tr = integrate_field(osc, {0, 1, 0}, t_end, cfg);
    REQUIRE(tr.status == TrajStatus::ok);
    const auto ups = locate_events(tr, [](const State3& u) { return u.x; }, EventDirection::up);
    // up-crossings at 2*pi*k, k >= 1 (the initial point t=0 starts the first step)
    std::vector<double> expected;
    for (double t = 2.0 * M_PI; t < t_end; t += 2.0 * M_PI) expected.push_back(t);
    REQUIRE(ups.size() == expected.size());
    for (size_t i = 0; i < ups.size(); ++i) CHECK(std::abs(ups[i].t - expected[i]) < 1e-8);

    const auto all = locate_events(tr, [](const State3& u) { return u.x; }, EventDirection::both);
    std::vector<double> expected_all;
    for (double t = M_PI; t < t_end; t += M_PI) expected_all.push_back(t);
    REQUIRE(all.size() == expected_all.size());
    for (size_t i = 0; i < all.size(); ++i) CHECK(std::abs(all[i].t - expected_all[i]) < 1e-8);
}

TEST_CASE("locate_events: constant trajectory yields nothing") {
    auto still = [](const State3&) { return State3{0, 0, 0}; };
    IntegratorConfig cfg;
    const Trajectory tr = integrate_field(still, {1, 1, 1}, 5.0, cfg);
    CHECK(locate_events(tr, [](const State3& u) { return u.x - 2.0; }).empty());
}

TEST_CASE("dense output is consistent with step endpoints") {
    HRParams p;
    p.eps = 0.018;
    IntegratorConfig cfg;
    const Trajectory tr = integrate_hr(p, {0, 0, 0}, 50.0, cfg);
    REQUIRE(tr.has_dense());
    for (size_t i = 1; i + 1 < tr.t.size(); i += 7) {
        const State3 s = tr.sample(tr.t[i]);
        CHECK(norm_inf(s - tr.y[i]) < 1e-9 * (1.0 + norm_inf(tr.y[i])));
    }
}
