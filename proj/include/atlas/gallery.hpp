#ifndef ATLAS_GALLERY_HPP
#define ATLAS_GALLERY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atlas/mesh.hpp"

namespace atlas {

// Built-in implicit surfaces with known ground truth. Coordinates are
// (lambda1, lambda2, eps) with eps the height axis, except for the cusp
// family which lives in (lambda, eps1, eps2).
enum class SurfaceKind {
    isola_plus,      // eps + l1^2 + l2^2        (max at the origin)
    isola_minus,     // eps - l1^2 - l2^2        (min at the origin)
    saddle,          // eps - l1^2 + l2^2        (saddle at the origin)
    cusp,            // l^3 + l*eps2 + eps1
    two_well,        // eps - l1^4 + l1^2 - l2^2 (two minima and a saddle)
    two_caps,        // product of two downward caps
    sphere,          // |p|^2 - 1
    torus,           // upright torus, ring in the (l1, eps) plane
    thin_tube,       // flattened elliptic cylinder of width d (parametric mesh)
    pants_plus_disc, // two-well times a displaced cap
};

SurfaceKind parse_surface_kind(const std::string& name);
std::string surface_kind_name(SurfaceKind kind);

struct AnalyticSurface {
    SurfaceKind kind;
    Box3 box;
    double tube_width = 1e-4;  // thin_tube only

    double eval(const Vec3& p) const;
    Vec3 gradient(const Vec3& p) const;
};

AnalyticSurface make_surface(SurfaceKind kind);
AnalyticSurface make_surface(SurfaceKind kind, const Box3& box, double tube_width = 1e-4);

// Ground truth stored beside the generators and asserted by the geom suites.
struct SurfaceTruth {
    struct Critical {
        Vec3 location;
        std::string kind;  // "min" | "max" | "saddle"
    };
    std::vector<Critical> critical_points;
    std::vector<double> event_eps;  // interior Reeb event heights, ascending
    int euler_characteristic = 0;   // meaningful for closed surfaces
    std::optional<double> analytic_area;
};

SurfaceTruth surface_truth(SurfaceKind kind);

// Polygonizes the implicit surface on a tetrahedralized grid (resolution
// cells per axis, >= 8) and Newton-projects every vertex onto the surface to
// |F| < 1e-9. thin_tube and pants_plus_disc get constructed meshes with
// sharp-fold polylines attached where applicable.
SurfaceMesh sample_mesh(const AnalyticSurface& surface, int resolution);

// Marching-tetrahedra polygonization of an arbitrary scalar field (no
// projection); exposed for the geom fold-set machinery and tests.
SurfaceMesh polygonize_field(const std::function<double(const Vec3&)>& field, const Box3& box,
                             int resolution);

// The codim-2 curve shared by the pants and disc components of the
// pants_plus_disc gallery surface.
Polyline3 pants_plus_disc_shared_curve();

// ---------------------------------------------------------------------------
// Synthetic codimension-two curves with constructed eps extrema.

enum class Codim2Kind {
    single_max,     // one fold, kind max
    single_min,     // one fold, kind min
    monotone,       // no folds
    two_extrema,    // closed loop, one max and one min
    on_sharp_fold,  // fold placed exactly on a thin tube's sharp-fold line
    mid_leaf,       // fold placed mid-leaf on a thin tube
};

struct Codim2Params {
    double eps_center = 0.0;     // eps value at the constructed extremum
    double amplitude = 0.25;     // curvature scale of the fold
    double span = 0.5;           // parameter half-width
    // thin-tube attachment (on_sharp_fold / mid_leaf)
    double tube_half_width = 0.5;     // ellipse major semi-axis A
    double tube_width = 1e-4;         // ellipse minor full width d
    int side = +1;               // which sharp-fold line (+A or -A)
    int samples = 201;
};

struct Codim2Truth {
    int fold_count = 0;
    std::vector<double> fold_eps;  // constructed extremum heights
};

Polyline3 synthetic_codim2(Codim2Kind kind, const Codim2Params& params);
Codim2Truth codim2_truth(Codim2Kind kind, const Codim2Params& params);

}  // namespace atlas

#endif
