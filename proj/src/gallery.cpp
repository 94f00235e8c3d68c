#include "atlas/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tet_grid.hpp"

namespace atlas {

SurfaceKind parse_surface_kind(const std::string& name) {
    if (name == "isola-plus") return SurfaceKind::isola_plus;
    if (name == "isola-minus") return SurfaceKind::isola_minus;
    if (name == "saddle") return SurfaceKind::saddle;
    if (name == "cusp") return SurfaceKind::cusp;
    if (name == "two-well") return SurfaceKind::two_well;
    if (name == "two-caps") return SurfaceKind::two_caps;
    if (name == "sphere") return SurfaceKind::sphere;
    if (name == "torus") return SurfaceKind::torus;
    if (name == "thin-tube") return SurfaceKind::thin_tube;
    if (name == "pants-plus-disc") return SurfaceKind::pants_plus_disc;
    throw std::invalid_argument("unknown gallery surface '" + name + "'");
}

std::string surface_kind_name(SurfaceKind kind) {
    switch (kind) {
        case SurfaceKind::isola_plus: return "isola-plus";
        case SurfaceKind::isola_minus: return "isola-minus";
        case SurfaceKind::saddle: return "saddle";
        case SurfaceKind::cusp: return "cusp";
        case SurfaceKind::two_well: return "two-well";
        case SurfaceKind::two_caps: return "two-caps";
        case SurfaceKind::sphere: return "sphere";
        case SurfaceKind::torus: return "torus";
        case SurfaceKind::thin_tube: return "thin-tube";
        case SurfaceKind::pants_plus_disc: return "pants-plus-disc";
    }
    throw std::invalid_argument("bad surface kind");
}

namespace {

// two_caps: steep downward paraboloids, apexes at 0.25 and 0.4; the slope
// keeps them disjoint above z = -0.1
constexpr double kCapSlope = 4.0;
constexpr double kCapX = 0.45;
constexpr double kCapH1 = 0.25;
constexpr double kCapH2 = 0.4;

// pants_plus_disc: two-well times a cap displaced to (0, 0.5)
constexpr double kDiscY = 0.5;
constexpr double kDiscTop = -0.05;
constexpr double kDiscSlope = 2.0;

constexpr double kTorusRing = 0.55;
constexpr double kTorusTube = 0.25;
constexpr double kTubeHalfWidth = 0.5;  // ellipse major semi-axis of thin_tube

double cap1(const Vec3& p) {
    return (p.z - kCapH1) + kCapSlope * ((p.x + kCapX) * (p.x + kCapX) + p.y * p.y);
}
double cap2(const Vec3& p) {
    return (p.z - kCapH2) + kCapSlope * ((p.x - kCapX) * (p.x - kCapX) + p.y * p.y);
}
double two_well_f(const Vec3& p) {
    return p.z - p.x * p.x * p.x * p.x + p.x * p.x - p.y * p.y;
}
double disc_f(const Vec3& p) {
    return (p.z - kDiscTop) + kDiscSlope * (p.x * p.x + (p.y - kDiscY) * (p.y - kDiscY));
}

Box3 default_box(SurfaceKind kind) {
    switch (kind) {
        case SurfaceKind::isola_plus:
        case SurfaceKind::isola_minus:
        case SurfaceKind::saddle:
        case SurfaceKind::cusp: return {{-1, -1, -1}, {1, 1, 1}};
        case SurfaceKind::two_well: return {{-1.2, -0.7, -0.35}, {1.2, 0.7, 0.2}};
        case SurfaceKind::two_caps: return {{-1.2, -0.8, -0.1}, {1.2, 0.8, 0.55}};
        case SurfaceKind::sphere: return {{-1.3, -1.3, -1.3}, {1.3, 1.3, 1.3}};
        case SurfaceKind::torus: return {{-0.9, -0.35, -0.9}, {0.9, 0.35, 0.9}};
        case SurfaceKind::thin_tube: return {{-1, -1, -1}, {1, 1, 1}};
        case SurfaceKind::pants_plus_disc: return {{-1.25, -0.8, -0.2}, {1.25, 1.0, 0.2}};
    }
    throw std::invalid_argument("bad surface kind");
}

}  // namespace

double AnalyticSurface::eval(const Vec3& p) const {
    switch (kind) {
        case SurfaceKind::isola_plus: return p.z + p.x * p.x + p.y * p.y;
        case SurfaceKind::isola_minus: return p.z - p.x * p.x - p.y * p.y;
        case SurfaceKind::saddle: return p.z - p.x * p.x + p.y * p.y;
        case SurfaceKind::cusp: return p.x * p.x * p.x + p.x * p.z + p.y;
        case SurfaceKind::two_well: return two_well_f(p);
        case SurfaceKind::two_caps: return cap1(p) * cap2(p);
        case SurfaceKind::sphere: return dot(p, p) - 1.0;
        case SurfaceKind::torus: {
            const double s = std::sqrt(p.x * p.x + p.z * p.z);
            return (s - kTorusRing) * (s - kTorusRing) + p.y * p.y - kTorusTube * kTorusTube;
        }
        case SurfaceKind::thin_tube: {
            const double ax = p.x / kTubeHalfWidth;
            const double ay = p.y / (0.5 * tube_width);
            return ax * ax + ay * ay - 1.0;
        }
        case SurfaceKind::pants_plus_disc: return two_well_f(p) * disc_f(p);
    }
    throw std::invalid_argument("bad surface kind");
}

Vec3 AnalyticSurface::gradient(const Vec3& p) const {
    switch (kind) {
        case SurfaceKind::isola_plus: return {2.0 * p.x, 2.0 * p.y, 1.0};
        case SurfaceKind::isola_minus: return {-2.0 * p.x, -2.0 * p.y, 1.0};
        case SurfaceKind::saddle: return {-2.0 * p.x, 2.0 * p.y, 1.0};
        case SurfaceKind::cusp: return {3.0 * p.x * p.x + p.z, 1.0, p.x};
        case SurfaceKind::two_well:
            return {-4.0 * p.x * p.x * p.x + 2.0 * p.x, -2.0 * p.y, 1.0};
        case SurfaceKind::two_caps: {
            const double g1 = cap1(p), g2 = cap2(p);
            const Vec3 d1{2.0 * kCapSlope * (p.x + kCapX), 2.0 * kCapSlope * p.y, 1.0};
            const Vec3 d2{2.0 * kCapSlope * (p.x - kCapX), 2.0 * kCapSlope * p.y, 1.0};
            return d1 * g2 + d2 * g1;
        }
        case SurfaceKind::sphere: return p * 2.0;
        case SurfaceKind::torus: {
            const double s = std::sqrt(p.x * p.x + p.z * p.z);
            if (s == 0.0) return {0.0, 2.0 * p.y, 0.0};
            const double f = 2.0 * (s - kTorusRing) / s;
            return {f * p.x, 2.0 * p.y, f * p.z};
        }
        case SurfaceKind::thin_tube: {
            const double hw = 0.5 * tube_width;
            return {2.0 * p.x / (kTubeHalfWidth * kTubeHalfWidth), 2.0 * p.y / (hw * hw), 0.0};
        }
        case SurfaceKind::pants_plus_disc: {
            const double f = two_well_f(p), g = disc_f(p);
            const Vec3 df{-4.0 * p.x * p.x * p.x + 2.0 * p.x, -2.0 * p.y, 1.0};
            const Vec3 dg{2.0 * kDiscSlope * p.x, 2.0 * kDiscSlope * (p.y - kDiscY), 1.0};
            return df * g + dg * f;
        }
    }
    throw std::invalid_argument("bad surface kind");
}

AnalyticSurface make_surface(SurfaceKind kind) { return {kind, default_box(kind), 1e-4}; }

AnalyticSurface make_surface(SurfaceKind kind, const Box3& box, double tube_width) {
    if (!(tube_width > 0.0)) throw std::invalid_argument("tube width must be > 0");
    return {kind, box, tube_width};
}

SurfaceTruth surface_truth(SurfaceKind kind) {
    SurfaceTruth t;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    switch (kind) {
        case SurfaceKind::isola_plus:
            t.critical_points = {{{0, 0, 0}, "max"}};
            t.event_eps = {0.0};
            break;
        case SurfaceKind::isola_minus:
            t.critical_points = {{{0, 0, 0}, "min"}};
            t.event_eps = {0.0};
            break;
        case SurfaceKind::saddle:
            t.critical_points = {{{0, 0, 0}, "saddle"}};
            t.event_eps = {0.0};
            break;
        case SurfaceKind::two_well:
            t.critical_points = {{{-inv_sqrt2, 0, -0.25}, "min"},
                                 {{inv_sqrt2, 0, -0.25}, "min"},
                                 {{0, 0, 0}, "saddle"}};
            t.event_eps = {-0.25, -0.25, 0.0};
            break;
        case SurfaceKind::two_caps:
            t.critical_points = {{{-kCapX, 0, kCapH1}, "max"}, {{kCapX, 0, kCapH2}, "max"}};
            t.event_eps = {kCapH1, kCapH2};
            break;
        case SurfaceKind::sphere:
            t.critical_points = {{{0, 0, -1}, "min"}, {{0, 0, 1}, "max"}};
            t.event_eps = {-1.0, 1.0};
            t.euler_characteristic = 2;
            t.analytic_area = 4.0 * M_PI;
            break;
        case SurfaceKind::torus:
            t.critical_points = {{{0, 0, -(kTorusRing + kTorusTube)}, "min"},
                                 {{0, 0, -(kTorusRing - kTorusTube)}, "saddle"},
                                 {{0, 0, kTorusRing - kTorusTube}, "saddle"},
                                 {{0, 0, kTorusRing + kTorusTube}, "max"}};
            t.event_eps = {-(kTorusRing + kTorusTube), -(kTorusRing - kTorusTube),
                           kTorusRing - kTorusTube, kTorusRing + kTorusTube};
            t.euler_characteristic = 0;
            t.analytic_area = 4.0 * M_PI * M_PI * kTorusRing * kTorusTube;
            break;
        case SurfaceKind::cusp:
        case SurfaceKind::thin_tube:
            break;  // no interior height-critical points
        case SurfaceKind::pants_plus_disc:
            // the pants minima sit below the box floor; inside the box: the
            // pants saddle and the disc maximum
            t.critical_points = {{{0, 0, 0}, "saddle"}, {{0, kDiscY, kDiscTop}, "max"}};
            t.event_eps = {kDiscTop, 0.0};
            break;
    }
    return t;
}

// ---------------------------------------------------------------------------
// marching tetrahedra

namespace {

struct EdgeVertexCache {
    std::map<std::pair<size_t, size_t>, int> map;

    int get(std::vector<Vec3>& verts, size_t a, size_t b, const Vec3& pa, const Vec3& pb,
            double fa, double fb) {
        const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        auto it = map.find(key);
        if (it != map.end()) return it->second;
        const double t = fa / (fa - fb);
        const Vec3 p = pa + (pb - pa) * t;
        const int id = static_cast<int>(verts.size());
        verts.push_back(p);
        map.emplace(key, id);
        return id;
    }
};

SurfaceMesh polygonize(const std::function<double(const Vec3&)>& field, const Box3& box, int nx,
                       int ny, int nz) {
    detail::TetGrid grid(field, box, nx, ny, nz);

    // Push node values away from zero so edge crossings stay clear of the
    // nodes; without this, near-node crossings produce sliver triangles whose
    // removal punches holes at extrema. The projection step restores the
    // geometric accuracy lost to the snap.
    double scale = 0.0;
    for (double v : grid.values) scale = std::max(scale, std::abs(v));
    const double snap = std::max(scale, 1.0) * 1e-4;
    for (double& v : grid.values)
        if (std::abs(v) < snap) v = v < 0.0 ? -snap : snap;

    SurfaceMesh mesh;
    EdgeVertexCache cache;

    size_t ids[8];
    Vec3 pos[8];
    double val[8];
    for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                bool any_neg = false, any_pos = false;
                for (int c = 0; c < 8; ++c) {
                    int ci, cj, ck;
                    grid.corner(i, j, k, c, ci, cj, ck);
                    ids[c] = grid.node_id(ci, cj, ck);
                    val[c] = grid.values[ids[c]];
                    (val[c] < 0.0 ? any_neg : any_pos) = true;
                }
                if (!any_neg || !any_pos) continue;
                for (int c = 0; c < 8; ++c) {
                    int ci, cj, ck;
                    grid.corner(i, j, k, c, ci, cj, ck);
                    pos[c] = grid.node_pos(ci, cj, ck);
                }

                for (const auto& tet : detail::kCubeTets) {
                    int neg[4], posi[4];
                    int nn = 0, np = 0;
                    for (int c : tet) (val[c] < 0.0 ? neg[nn++] : posi[np++]) = c;
                    auto vtx = [&](int a, int b) {
                        return cache.get(mesh.vertices, ids[a], ids[b], pos[a], pos[b], val[a],
                                         val[b]);
                    };
                    if (nn == 1 && np == 3) {
                        mesh.triangles.push_back(
                            {vtx(neg[0], posi[0]), vtx(neg[0], posi[1]), vtx(neg[0], posi[2])});
                    } else if (nn == 3 && np == 1) {
                        mesh.triangles.push_back(
                            {vtx(posi[0], neg[0]), vtx(posi[0], neg[1]), vtx(posi[0], neg[2])});
                    } else if (nn == 2 && np == 2) {
                        const int v00 = vtx(neg[0], posi[0]);
                        const int v01 = vtx(neg[0], posi[1]);
                        const int v10 = vtx(neg[1], posi[0]);
                        const int v11 = vtx(neg[1], posi[1]);
                        mesh.triangles.push_back({v00, v01, v11});
                        mesh.triangles.push_back({v00, v11, v10});
                    }
                }
            }
        }
    }
    return mesh;
}

void drop_degenerate(SurfaceMesh& mesh, double min_area = 1e-13) {
    std::vector<std::array<int, 3>> kept;
    kept.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
        const double area = 0.5 * norm(cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                                             mesh.vertices[t[2]] - mesh.vertices[t[0]]));
        if (area > min_area) kept.push_back(t);
    }
    mesh.triangles = std::move(kept);
}

SurfaceMesh thin_tube_mesh(const AnalyticSurface& surface, int resolution) {
    const double a = kTubeHalfWidth;
    const double b = 0.5 * surface.tube_width;
    const double z0 = surface.box.lo.z, z1 = surface.box.hi.z;
    const int n_theta = 8 * resolution;
    const int n_z = std::max(resolution / 2, 8);

    SurfaceMesh mesh;
    mesh.vertices.reserve(static_cast<size_t>(n_theta) * (n_z + 1));
    for (int kz = 0; kz <= n_z; ++kz) {
        const double z = z0 + (z1 - z0) * kz / n_z;
        for (int it = 0; it < n_theta; ++it) {
            const double th = 2.0 * M_PI * it / n_theta;
            mesh.vertices.push_back({a * std::cos(th), b * std::sin(th), z});
        }
    }
    auto vid = [&](int kz, int it) { return kz * n_theta + (it % n_theta); };
    for (int kz = 0; kz < n_z; ++kz) {
        for (int it = 0; it < n_theta; ++it) {
            const int v00 = vid(kz, it), v01 = vid(kz, it + 1);
            const int v10 = vid(kz + 1, it), v11 = vid(kz + 1, it + 1);
            mesh.triangles.push_back({v00, v01, v11});
            mesh.triangles.push_back({v00, v11, v10});
        }
    }

    // the two sharp-fold lines run along theta = 0 and theta = pi
    for (int side = 0; side < 2; ++side) {
        Polyline3 fold;
        fold.role = PolylineRole::codim2_curve;
        const int it = side == 0 ? 0 : n_theta / 2;
        for (int kz = 0; kz <= n_z; ++kz) fold.points.push_back(mesh.vertices[vid(kz, it)]);
        mesh.sharp_folds.push_back(std::move(fold));
    }
    return mesh;
}

}  // namespace

SurfaceMesh polygonize_field(const std::function<double(const Vec3&)>& field, const Box3& box,
                             int resolution) {
    if (resolution < 8) throw std::invalid_argument("resolution must be >= 8 per axis");
    return polygonize(field, box, resolution, resolution, resolution);
}

SurfaceMesh sample_mesh(const AnalyticSurface& surface, int resolution) {
    if (resolution < 8) throw std::invalid_argument("resolution must be >= 8 per axis");
    if (surface.kind == SurfaceKind::thin_tube) return thin_tube_mesh(surface, resolution);

    SurfaceMesh mesh = polygonize([&surface](const Vec3& p) { return surface.eval(p); },
                                  surface.box, resolution, resolution, resolution);

    // Newton projection along the analytic gradient to |F| < 1e-9
    for (Vec3& v : mesh.vertices) {
        for (int it = 0; it < 8; ++it) {
            const double f = surface.eval(v);
            if (std::abs(f) < 1e-9) break;
            const Vec3 g = surface.gradient(v);
            const double g2 = dot(g, g);
            if (g2 == 0.0) break;
            v -= g * (f / g2);
        }
    }
    drop_degenerate(mesh);
    return mesh;
}

Polyline3 pants_plus_disc_shared_curve() {
    // ellipse in the bottom plane through the pants' outer rim point and the
    // disc rim point nearest to it
    const double z = -0.2;
    const double x_rim = std::sqrt((1.0 + std::sqrt(1.0 - 0.8)) / 2.0);  // two-well rim, z=-0.2
    const Vec3 p1{x_rim, 0.0, z};
    const double r_disc = std::sqrt((kDiscTop - z) / kDiscSlope);
    Vec3 dir{p1.x, p1.y - kDiscY, 0.0};
    dir = dir / norm(dir);
    const Vec3 p2 = Vec3{0.0, kDiscY, z} + dir * r_disc;

    const Vec3 mid = (p1 + p2) * 0.5;
    const Vec3 u = (p1 - p2) / norm(p1 - p2);
    const Vec3 v{-u.y, u.x, 0.0};
    const double ae = 0.5 * norm(p1 - p2);
    const double be = 0.08;

    Polyline3 curve;
    curve.role = PolylineRole::codim2_curve;
    curve.closed = true;
    const int n = 128;
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        curve.points.push_back(mid + u * (ae * std::cos(th)) + v * (be * std::sin(th)));
    }
    return curve;
}

// ---------------------------------------------------------------------------

Polyline3 synthetic_codim2(Codim2Kind kind, const Codim2Params& prm) {
    Polyline3 curve;
    curve.role = PolylineRole::codim2_curve;
    const int n = std::max(prm.samples, 5);
    const double c = prm.eps_center, a = prm.amplitude, s = prm.span;

    switch (kind) {
        case Codim2Kind::single_max:
            for (int i = 0; i < n; ++i) {
                const double t = -s + 2.0 * s * i / (n - 1);
                curve.points.push_back({t, 0.0, c - a * t * t});
            }
            break;
        case Codim2Kind::single_min:
            for (int i = 0; i < n; ++i) {
                const double t = -s + 2.0 * s * i / (n - 1);
                curve.points.push_back({t, 0.0, c + a * t * t});
            }
            break;
        case Codim2Kind::monotone:
            for (int i = 0; i < n; ++i) {
                const double t = 4.0 * M_PI * i / (n - 1);
                curve.points.push_back({0.5 * std::cos(t), 0.5 * std::sin(t), c + a * t});
            }
            break;
        case Codim2Kind::two_extrema: {
            curve.closed = true;
            for (int i = 0; i < n; ++i) {
                const double t = 2.0 * M_PI * i / n;
                curve.points.push_back(
                    {0.5 * std::cos(t), 0.5 * std::sin(t), c + a * std::cos(t)});
            }
            break;
        }
        case Codim2Kind::on_sharp_fold:
        case Codim2Kind::mid_leaf: {
            const double theta0 =
                kind == Codim2Kind::on_sharp_fold ? (prm.side >= 0 ? 0.0 : M_PI) : 0.5 * M_PI;
            const double b = 0.5 * prm.tube_width;
            for (int i = 0; i < n; ++i) {
                const double t = -s + 2.0 * s * i / (n - 1);
                const double th = theta0 + t;
                curve.points.push_back(
                    {prm.tube_half_width * std::cos(th), b * std::sin(th), c - a * t * t});
            }
            break;
        }
    }
    return curve;
}

Codim2Truth codim2_truth(Codim2Kind kind, const Codim2Params& prm) {
    Codim2Truth t;
    switch (kind) {
        case Codim2Kind::single_max:
        case Codim2Kind::single_min:
        case Codim2Kind::on_sharp_fold:
        case Codim2Kind::mid_leaf:
            t.fold_count = 1;
            t.fold_eps = {prm.eps_center};
            break;
        case Codim2Kind::monotone: t.fold_count = 0; break;
        case Codim2Kind::two_extrema:
            t.fold_count = 2;
            t.fold_eps = {prm.eps_center - prm.amplitude, prm.eps_center + prm.amplitude};
            break;
    }
    return t;
}

}  // namespace atlas
