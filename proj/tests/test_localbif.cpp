#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "atlas/localbif.hpp"
#include "oracles.hpp"

using namespace atlas;

TEST_CASE("hr_equilibria: the factored cubic gives (0, 1, 6.4)") {
    HRParams p;
    p.b = 3.0;
    p.I = 5.4;
    p.eps = 0.018;
    const auto eq = hr_equilibria(p);
    REQUIRE(eq.size() == 1);
    CHECK(std::abs(eq[0].state.x - 0.0) < 1e-12);
    CHECK(std::abs(eq[0].state.y - 1.0) < 1e-12);
    CHECK(std::abs(eq[0].state.z - 6.4) < 1e-12);
}

TEST_CASE("hr_equilibria: exactly independent of eps") {
    HRParams p;
    p.b = 2.8;
    p.I = 1.7;
    std::vector<std::vector<State3>> runs;
    for (double eps : {1e-3, 0.018, 0.1}) {
        p.eps = eps;
        const auto eq = hr_equilibria(p);
        std::vector<State3> states;
        for (const auto& e : eq) states.push_back(e.state);
        runs.push_back(states);
    }
    for (size_t r = 1; r < runs.size(); ++r) {
        REQUIRE(runs[r].size() == runs[0].size());
        for (size_t i = 0; i < runs[r].size(); ++i) {
            CHECK(runs[r][i].x == runs[0][i].x);
            CHECK(runs[r][i].y == runs[0][i].y);
            CHECK(runs[r][i].z == runs[0][i].z);
        }
    }
}

TEST_CASE("hr_equilibria residuals and root counts vs bisection oracle") {
    auto gen = oracles::rng(101);
    std::uniform_real_distribution<double> db(2.0, 3.5), di(0.0, 6.0);
    for (int trial = 0; trial < 1000; ++trial) {
        HRParams p;
        p.b = db(gen);
        p.I = di(gen);
        p.eps = 0.018;
        const auto eq = hr_equilibria(p);
        REQUIRE(eq.size() >= 1);
        REQUIRE(eq.size() <= 3);
        for (const auto& e : eq) {
            const State3 r = hr_rhs(e.state, p);
            CHECK(norm_inf(r) < 1e-10);
        }
        auto cubic = [&](double x) {
            return p.a * x * x * x + (p.d - p.b) * x * x + p.s * x - (p.c + p.s * p.x0 + p.I);
        };
        // Cauchy bound on root magnitude
        const double bound =
            1.0 + std::max({std::abs(p.d - p.b), std::abs(p.s), std::abs(p.c + p.s * p.x0 + p.I)});
        const auto oracle_roots = oracles::scan_bisect_roots(cubic, -bound, bound);
        REQUIRE(eq.size() == oracle_roots.size());
        for (size_t i = 0; i < eq.size(); ++i)
            CHECK(std::abs(eq[i].state.x - oracle_roots[i]) < 1e-10);
    }
}

TEST_CASE("root count is discriminant-consistent") {
    auto gen = oracles::rng(102);
    std::uniform_real_distribution<double> db(0.8, 3.5), di(0.0, 8.0);
    int three_count = 0;
    for (int trial = 0; trial < 500; ++trial) {
        HRParams p;
        p.b = db(gen);
        p.I = di(gen);
        const double c3 = p.a, c2 = p.d - p.b, c1 = p.s, c0 = -(p.c + p.s * p.x0 + p.I);
        const double disc = 18.0 * c3 * c2 * c1 * c0 - 4.0 * c2 * c2 * c2 * c0 +
                            c2 * c2 * c1 * c1 - 4.0 * c3 * c1 * c1 * c1 -
                            27.0 * c3 * c3 * c0 * c0;
        const auto eq = hr_equilibria(p);
        const double guard = 1e-12 * std::max(1.0, std::abs(disc));
        if (disc > guard) {
            CHECK(eq.size() == 3);
            ++three_count;
        } else if (disc < -guard) {
            CHECK(eq.size() == 1);
        }
    }
    // the fold wedge below b ~ 1.536 must be hit by some samples
    CHECK(three_count > 0);
}

TEST_CASE("fhn_equilibria") {
    FHNParams p;
    SUBCASE("gamma = 0, p = 0") {
        const auto eq = fhn_equilibria(p);
        REQUIRE(eq.size() == 1);
        CHECK(eq[0].state.x == 0.0);
        CHECK(eq[0].state.y == 0.0);
        CHECK(eq[0].state.z == 0.0);
    }
    SUBCASE("gamma = 0, p = 0.3") {
        p.p = 0.3;
        const auto eq = fhn_equilibria(p);
        REQUIRE(eq.size() == 1);
        CHECK(eq[0].state.z == 0.3);
    }
    SUBCASE("gamma != 0 vs bisection oracle") {
        auto gen = oracles::rng(103);
        std::uniform_real_distribution<double> dp(-1.0, 1.0);
        p.gamma = 0.5;
        p.alpha = 0.1;
        for (int trial = 0; trial < 200; ++trial) {
            p.p = dp(gen);
            const auto eq = fhn_equilibria(p);
            auto cubic = [&](double U) {
                return U * U * U - (p.alpha + 1.0) * U * U + (p.alpha + 1.0 / p.gamma) * U - p.p;
            };
            const auto oracle_roots = oracles::scan_bisect_roots(cubic, -6.0, 6.0);
            REQUIRE(eq.size() == oracle_roots.size());
            for (size_t i = 0; i < eq.size(); ++i) {
                CHECK(std::abs(eq[i].state.x - oracle_roots[i]) < 1e-10);
                CHECK(norm_inf(fhn_rhs(eq[i].state, p)) < 1e-10);
            }
        }
    }
}

TEST_CASE("eigen3: diagonal and rotation-like matrices") {
    Mat3 d;
    d(0, 0) = -1.0;
    d(1, 1) = -2.0;
    d(2, 2) = -3.0;
    auto ev = eigen3(d);
    CHECK(ev[0] == std::complex<double>(-1.0, 0.0));
    CHECK(ev[1] == std::complex<double>(-2.0, 0.0));
    CHECK(ev[2] == std::complex<double>(-3.0, 0.0));

    // block diag(rotation by 90 degrees, -1): eigenvalues i, -i, -1
    Mat3 r;
    r(0, 1) = -1.0;
    r(1, 0) = 1.0;
    r(2, 2) = -1.0;
    ev = eigen3(r);
    CHECK(std::abs(ev[0] - std::complex<double>(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(ev[1] - std::complex<double>(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(ev[2] - std::complex<double>(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("eigen3: random matrices vs Durand-Kerner oracle, conjugate symmetry, residuals") {
    auto gen = oracles::rng(104);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 300; ++trial) {
        Mat3 j;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) j(r, c) = dist(gen);
        const auto ev = eigen3(j);

        // conjugate pairing is exact
        for (int i = 0; i < 3; ++i) {
            if (ev[i].imag() != 0.0) {
                bool paired = false;
                for (int k = 0; k < 3; ++k)
                    if (k != i && ev[k].real() == ev[i].real() && ev[k].imag() == -ev[i].imag())
                        paired = true;
                CHECK(paired);
            }
        }

        // residual |det(J - lambda I)| via the characteristic polynomial
        const CharPoly3 cp = char_poly(j);
        const double scale = std::max(1.0, std::pow(frobenius_norm(j), 3));
        for (const auto& l : ev) {
            const std::complex<double> res = ((l + cp.a2) * l + cp.a1) * l + cp.a0;
            CHECK(std::abs(res) < 1e-8 * scale);
        }

        // oracle agreement (match each DK root to the closest eigen3 root)
        const auto dk = oracles::cubic_roots_dk(cp.a2, cp.a1, cp.a0);
        for (const auto& root : dk) {
            double best = 1e300;
            for (const auto& l : ev) best = std::min(best, std::abs(l - root));
            CHECK(best < 1e-7 * std::max(1.0, std::abs(root)));
        }
    }
}

TEST_CASE("test_functions: constructed hopf and fold cases") {
    // companion matrix of lambda^3 + lambda^2 + lambda + 1 (eigenvalues i, -i, -1)
    Mat3 c;
    c(0, 1) = 1.0;
    c(1, 2) = 1.0;
    c(2, 0) = -1.0;
    c(2, 1) = -1.0;
    c(2, 2) = -1.0;
    const TestFunctionValues v = test_functions(c);
    CHECK(std::abs(v.hopf) < 1e-12);
    CHECK(v.hopf_admissible);

    Mat3 sing;
    sing(0, 0) = 1.0;
    sing(0, 1) = 2.0;
    sing(1, 1) = 3.0;
    // third row all zero
    CHECK(test_functions(sing).fold == 0.0);
}

TEST_CASE("test_functions agree with explicit eigenvalue evaluation") {
    auto gen = oracles::rng(105);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        Mat3 j;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) j(r, c) = dist(gen);
        const auto ev = eigen3(j);
        const TestFunctionValues v = test_functions(j);
        const std::complex<double> prod = ev[0] * ev[1] * ev[2];
        CHECK(std::abs(v.fold - prod.real()) < 1e-9 * std::max(1.0, std::abs(prod)));
        // hopf = -(l1+l2)(l1+l3)(l2+l3) for the char poly of J
        const std::complex<double> hopf_ev =
            -(ev[0] + ev[1]) * (ev[0] + ev[2]) * (ev[1] + ev[2]);
        CHECK(std::abs(v.hopf - hopf_ev.real()) < 1e-8 * std::max(1.0, std::abs(hopf_ev)));
    }
}

TEST_CASE("continue_curve: unit circle closes") {
    ContinuationMap F = [](const std::vector<double>& u, std::vector<double>& f) {
        f[0] = u[0] * u[0] + u[1] * u[1] - 1.0;
    };
    ContinuationConfig cfg;
    cfg.step = 0.05;
    const ContinuationCurve curve = continue_curve(F, 1, {1.0, 0.0}, cfg);
    CHECK(curve.termination == ContinuationStop::closed_loop);
    CHECK(curve.points.size() > 100);
    for (const auto& p : curve.points) {
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1]);
        CHECK(std::abs(r - 1.0) < 1e-8);
    }
    for (double s : curve.step_lengths) {
        CHECK(s <= 2.0 * cfg.step);
        CHECK(s >= 0.25 * cfg.step);
    }
}

TEST_CASE("continue_curve: parabola traced to the box edge") {
    ContinuationMap F = [](const std::vector<double>& u, std::vector<double>& f) {
        f[0] = u[1] - u[0] * u[0];
    };
    ContinuationConfig cfg;
    cfg.step = 0.05;
    cfg.box_lo = {-1.0, -0.5};
    cfg.box_hi = {1.0, 1.5};
    const ContinuationCurve curve = continue_curve(F, 1, {0.0, 0.0}, cfg);
    CHECK(curve.termination == ContinuationStop::boundary);
    // after the initial direction choice x moves monotonically
    REQUIRE(curve.points.size() > 3);
    const double dir = curve.points[1][0] - curve.points[0][0] > 0 ? 1.0 : -1.0;
    for (size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(dir * (curve.points[i][0] - curve.points[i - 1][0]) > 0.0);
        CHECK(std::abs(curve.points[i][1] - curve.points[i][0] * curve.points[i][0]) < 1e-8);
    }
}

TEST_CASE("continue_curve: HR fold curve re-verified by equilibria and test functions") {
    // unknowns (x, b, I) at fixed eps: equilibrium cubic = 0 and det J = 0
    const double eps = 0.018;
    HRParams base;
    base.eps = eps;
    ContinuationMap F = [&](const std::vector<double>& u, std::vector<double>& f) {
        HRParams p = base;
        const double x = u[0];
        p.b = u[1];
        p.I = u[2];
        f[0] = p.a * x * x * x + (p.d - p.b) * x * x + p.s * x - (p.c + p.s * p.x0 + p.I);
        const State3 st{x, p.c - p.d * x * x, p.s * (x - p.x0)};
        f[1] = det(hr_jacobian(st, p));
    };
    // folds require |b - d| >= sqrt(3 a s) = sqrt(12); (x, b, I) = (-2, 1, 5.4)
    // solves both equations exactly
    ContinuationConfig cfg;
    cfg.step = 0.02;
    cfg.max_points = 400;
    cfg.box_lo = {-5.0, 0.5, -1.0};
    cfg.box_hi = {5.0, 1.5, 8.0};
    const ContinuationCurve curve = continue_curve(F, 2, {-2.01, 1.0, 5.38}, cfg);
    REQUIRE(curve.points.size() > 10);
    for (const auto& u : curve.points) {
        HRParams p = base;
        p.b = u[1];
        p.I = u[2];
        const State3 st{u[0], p.c - p.d * u[0] * u[0], p.s * (u[0] - p.x0)};
        CHECK(norm_inf(hr_rhs(st, p)) < 1e-8);
        CHECK(std::abs(test_functions(hr_jacobian(st, p)).fold) < 1e-8);
        // hr_equilibria sees the fold as a double root; its position is only
        // sqrt(residual)-accurate and may sit just on the complex side
        const double c3 = p.a, c2 = p.d - p.b, c1 = p.s, c0 = -(p.c + p.s * p.x0 + p.I);
        const double disc = 18.0 * c3 * c2 * c1 * c0 - 4.0 * c2 * c2 * c2 * c0 +
                            c2 * c2 * c1 * c1 - 4.0 * c3 * c1 * c1 * c1 -
                            27.0 * c3 * c3 * c0 * c0;
        const auto eq = hr_equilibria(p);
        double best_dx = 1e300;
        for (const auto& e : eq) best_dx = std::min(best_dx, std::abs(e.state.x - u[0]));
        if (disc > 1e-6)
            CHECK(best_dx < 5e-4);
        else
            CHECK(std::abs(disc) < 1e-6);
    }
}

TEST_CASE("continuation points satisfy the defining system everywhere") {
    ContinuationMap F = [](const std::vector<double>& u, std::vector<double>& f) {
        f[0] = u[0] * u[0] + u[1] * u[1] - 1.0;
    };
    ContinuationConfig cfg;
    cfg.step = 0.03;
    const ContinuationCurve curve = continue_curve(F, 1, {0.6, 0.9}, cfg);
    std::vector<double> f(1);
    for (const auto& p : curve.points) {
        F(p, f);
        CHECK(std::abs(f[0]) < 1e-8);
    }
}

TEST_CASE("solve_cubic_real handles degenerate leading coefficients") {
    auto r = solve_cubic_real(0.0, 1.0, -3.0, 2.0);  // x^2 - 3x + 2
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(2.0));
    r = solve_cubic_real(0.0, 0.0, 2.0, -4.0);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(2.0));
}
