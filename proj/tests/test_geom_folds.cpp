#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "atlas/gallery.hpp"
#include "atlas/geom.hpp"
#include "oracles.hpp"

using namespace atlas;

namespace {

ScalarField3 cusp_field() {
    const AnalyticSurface s = make_surface(SurfaceKind::cusp);
    return [s](const Vec3& p) { return s.eval(p); };
}

// distance from (e1, e2) to the discriminant curve (2t^3, -3t^2)
double discriminant_distance(double e1, double e2) {
    double best = 1e300;
    for (int i = 0; i <= 4800; ++i) {
        const double t = -1.2 + 2.4 * i / 4800;
        const double dx = e1 - 2.0 * t * t * t;
        const double dy = e2 + 3.0 * t * t;
        best = std::min(best, std::hypot(dx, dy));
    }
    return best;
}

}  // namespace

TEST_CASE("curve_folds: parabolic dip has one minimum at t = 0") {
    Polyline3 c;
    for (int i = 0; i <= 200; ++i) {
        const double t = -1.0 + 2.0 * i / 200;
        c.points.push_back({std::cos(t), std::sin(t), t * t});
    }
    const auto folds = curve_folds(c, 2);
    REQUIRE(folds.size() == 1);
    CHECK(folds[0].kind == MorseKind::minimum);
    CHECK(std::abs(folds[0].location.x - 1.0) < 1e-3);
    CHECK(std::abs(folds[0].location.y) < 1e-3);
    CHECK(std::abs(folds[0].eps_value) < 1e-3);
    CHECK(folds[0].quad_coeff > 0.0);
    CHECK(!folds[0].low_confidence);
}

TEST_CASE("curve_folds: monotone helix has none") {
    Codim2Params prm;
    const Polyline3 helix = synthetic_codim2(Codim2Kind::monotone, prm);
    CHECK(curve_folds(helix, 2).empty());
}

TEST_CASE("curve_folds: constructed two-extrema loop recovers both heights") {
    Codim2Params prm;
    prm.eps_center = 0.1;
    prm.amplitude = 0.3;
    const Polyline3 loop = synthetic_codim2(Codim2Kind::two_extrema, prm);
    const auto folds = curve_folds(loop, 2);
    REQUIRE(folds.size() == 2);
    const Codim2Truth truth = codim2_truth(Codim2Kind::two_extrema, prm);
    for (double expected : truth.fold_eps) {
        double best = 1e300;
        for (const auto& f : folds) best = std::min(best, std::abs(f.eps_value - expected));
        CHECK(best < 1e-3);
    }
    int maxima = 0, minima = 0;
    for (const auto& f : folds) (f.kind == MorseKind::maximum ? maxima : minima)++;
    CHECK(maxima == 1);
    CHECK(minima == 1);
}

TEST_CASE("curve_folds rejects too-short curves") {
    Polyline3 c;
    c.points = {{0, 0, 0}, {1, 0, 1}, {2, 0, 0}};
    CHECK_THROWS_AS(curve_folds(c, 2), std::invalid_argument);
}

TEST_CASE("fold refinement convergence under densified sampling") {
    // halving the sampling density changes the refined eps by less than 4x
    // the previous change (quadratic-fit consistency)
    auto make_curve = [](int n) {
        Polyline3 c;
        for (int i = 0; i <= n; ++i) {
            const double t = -1.0 + 2.0 * i / n;
            // extremum deliberately off any sample point
            c.points.push_back({t, 0.1 * t, 0.37 - 0.8 * (t - 0.1037) * (t - 0.1037)});
        }
        return c;
    };
    const double e1 = curve_folds(make_curve(25), 2).at(0).eps_value;
    const double e2 = curve_folds(make_curve(50), 2).at(0).eps_value;
    const double e3 = curve_folds(make_curve(100), 2).at(0).eps_value;
    const double d12 = std::abs(e1 - e2), d23 = std::abs(e2 - e3);
    CHECK(d23 <= 4.0 * std::max(d12, 1e-15));
    CHECK(std::abs(e3 - 0.37) < 1e-6);
}

TEST_CASE("fold_visibility on the thin tube") {
    const SurfaceMesh tube = sample_mesh(make_surface(SurfaceKind::thin_tube), 32);
    const double delta_vis = 3.0 * tube.median_edge_length();

    Codim2Params prm;
    prm.eps_center = 0.2;
    SUBCASE("fold on the sharp-fold line is invisible") {
        const Polyline3 c = synthetic_codim2(Codim2Kind::on_sharp_fold, prm);
        const auto folds = curve_folds(c, 2);
        REQUIRE(folds.size() == 1);
        CHECK(fold_visibility(folds[0], tube) == FoldVisibility::invisible);
    }
    SUBCASE("fold mid-leaf is visible") {
        const Polyline3 c = synthetic_codim2(Codim2Kind::mid_leaf, prm);
        const auto folds = curve_folds(c, 2);
        REQUIRE(folds.size() == 1);
        CHECK(fold_visibility(folds[0], tube) == FoldVisibility::visible);
    }
    SUBCASE("threshold semantics: exactly 10x delta_vis away is visible") {
        FoldPoint f;
        f.location = {0.5, 10.0 * delta_vis, 0.0};  // offset from the +A fold line in y
        CHECK(fold_visibility(f, tube, delta_vis) == FoldVisibility::visible);
    }
    SUBCASE("no sharp-fold data means unclassified") {
        const SurfaceMesh sphere = sample_mesh(make_surface(SurfaceKind::sphere), 16);
        FoldPoint f;
        f.location = {1, 0, 0};
        CHECK(fold_visibility(f, sphere) == FoldVisibility::unclassified);
    }
}

TEST_CASE("fold_set_implicit: cusp normal form satisfies the discriminant identity") {
    const FoldSet set = fold_set_implicit(cusp_field(), {{-1, -1, -1}, {1, 1, 1}}, 32);
    REQUIRE(!set.folds.empty());
    REQUIRE(set.projections.size() == set.folds.size());
    // box-scaled bound: max of |27 e1^2 + 4 e2^3| over the box is 31
    const double scale = 31.0;
    int checked = 0;
    for (const Polyline3& proj : set.projections) {
        for (const Vec3& p : proj.points) {
            const double disc = 27.0 * p.x * p.x + 4.0 * p.y * p.y * p.y;
            CHECK(std::abs(disc) < 1e-6 * scale);
            ++checked;
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("fold_set_implicit: unique cusp at the origin with tangent branches") {
    const FoldSet set = fold_set_implicit(cusp_field(), {{-1, -1, -1}, {1, 1, 1}}, 32);
    REQUIRE(set.cusps.size() == 1);
    const CuspPoint& c = set.cusps[0];
    CHECK(norm(c.location) < 1e-4);
    CHECK(c.branch_a >= 0);
    CHECK(c.branch_b >= 0);
    CHECK(c.branch_a != c.branch_b);
    CHECK(c.tangency_residual < 1e-3);
    // both branches terminate at the cusp
    for (int id : {c.branch_a, c.branch_b}) {
        const auto& pts = set.folds[id].points;
        const double d = std::min(norm(pts.front() - c.location), norm(pts.back() - c.location));
        CHECK(d < 1e-6);
    }
}

TEST_CASE("fold_set_implicit: fold points at (eps1, eps2) = (+-2, -3) in a wide box") {
    const FoldSet set =
        fold_set_implicit(cusp_field(), {{-1.6, -2.6, -3.2}, {1.6, 2.6, 0.5}}, 40);
    REQUIRE(!set.projections.empty());
    for (double sign : {1.0, -1.0}) {
        double best = 1e300;
        for (const Polyline3& proj : set.projections)
            best = std::min(best, distance_to_polyline(Vec3{sign * 2.0, -3.0, 0.0}, proj));
        CHECK(best < 0.05);
    }
}

TEST_CASE("count_roots_line: pinned cusp sections") {
    const ScalarField3 f = cusp_field();
    SUBCASE("(0, -3): three roots at -sqrt(3), 0, sqrt(3)") {
        const LineRoots r = count_roots_line(f, 0.0, -3.0, -2.5, 2.5);
        REQUIRE(r.count == 3);
        CHECK(std::abs(r.roots[0] + std::sqrt(3.0)) < 1e-9);
        CHECK(std::abs(r.roots[1]) < 1e-9);
        CHECK(std::abs(r.roots[2] - std::sqrt(3.0)) < 1e-9);
        for (bool t : r.tangential) CHECK(!t);
    }
    SUBCASE("(0, 3): a single root at 0") {
        const LineRoots r = count_roots_line(f, 0.0, 3.0, -2.5, 2.5);
        REQUIRE(r.count == 1);
        CHECK(std::abs(r.roots[0]) < 1e-9);
    }
    SUBCASE("(2, -3): on the discriminant, double root flagged at 1") {
        const LineRoots r = count_roots_line(f, 2.0, -3.0, -2.5, 2.5);
        REQUIRE(r.count == 2);
        CHECK(std::abs(r.roots[0] + 2.0) < 1e-9);
        CHECK(std::abs(r.roots[1] - 1.0) < 1e-6);
        CHECK(!r.tangential[0]);
        CHECK(r.tangential[1]);
    }
}

TEST_CASE("Z-to-C transition: 3 roots inside the discriminant region, 1 outside") {
    const ScalarField3 f = cusp_field();
    auto gen = oracles::rng(401);
    std::uniform_real_distribution<double> d1(-1.0, 1.0), d2(-1.0, 1.0);
    int tested = 0;
    while (tested < 60) {
        const double e1 = d1(gen), e2 = d2(gen);
        if (discriminant_distance(e1, e2) < 1e-3) continue;
        ++tested;
        const LineRoots r = count_roots_line(f, e1, e2, -2.0, 2.0);
        const bool inside = 27.0 * e1 * e1 + 4.0 * e2 * e2 * e2 < 0.0;
        CHECK(r.count == (inside ? 3 : 1));
    }
}
