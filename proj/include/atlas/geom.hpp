#ifndef ATLAS_GEOM_HPP
#define ATLAS_GEOM_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atlas/mesh.hpp"

namespace atlas {

// ---------------------------------------------------------------------------
// transversality (slice vs surface)

enum class Transversality { transversal, degenerate, boundary_vertex };

struct TransversalityOptions {
    double angle_tol = 1e-3;  // radians between the vertex normal and the axis
};

// Degenerate iff the area-weighted vertex normal is within angle_tol of the
// slicing axis, i.e. the tangent plane is a fixed-eps plane.
Transversality transversality_check(const SurfaceMesh& mesh, const MeshAdjacency& adj,
                                    int vertex_id, int axis,
                                    const TransversalityOptions& opt = {});

// ---------------------------------------------------------------------------
// PL Morse critical points

enum class MorseKind { minimum, maximum, saddle };

struct CriticalPoint {
    Vec3 location;          // quadratic-fit refinement of the critical vertex
    int vertex_id = -1;
    MorseKind kind = MorseKind::minimum;
    double fit_residual = 0.0;  // RMS residual of the local quadratic fit

    // min/max <=> isola-type, saddle <=> saddle-type
    bool isola_type() const { return kind != MorseKind::saddle; }
    std::string geometric_class() const { return isola_type() ? "isola-type" : "saddle-type"; }
};

struct MultiSaddle {
    int vertex_id = -1;
    int sign_changes = 0;  // > 4: not a simple Morse vertex
    Vec3 location;
};

struct MorseReport {
    std::vector<CriticalPoint> points;
    std::vector<MultiSaddle> multisaddles;
    int interior_vertices = 0;
    int cancelled_pairs = 0;  // low-persistence noise pairs removed
};

struct MorseOptions {
    // saddle-extremum pairs closer in height than this fraction of the height
    // range are treated as triangulation noise and cancelled; sampled-mesh
    // triangulations produce such pairs next to flat extrema
    double cancel_tol_rel = 0.005;
};

// Walks each interior vertex link counting sign changes of the height
// difference. Ties are broken by simulation of simplicity
// (+ vertex_id * 1e-12 * range).
MorseReport pl_critical_points(const SurfaceMesh& mesh, int axis, const MorseOptions& opt = {});

// ---------------------------------------------------------------------------
// level-set slicing

// Marching-triangles extraction of the level set {p[axis] = value}; chains
// are assembled into maximal polylines with closed loops flagged. If `value`
// coincides exactly with a vertex height it is perturbed by 1e-12 * range.
std::vector<Polyline3> slice_level(const SurfaceMesh& mesh, double value, int axis = 2);

// ---------------------------------------------------------------------------
// Reeb graph over eps samples

enum class ReebEventType { birth, death, merge, split, boundary_enter, boundary_exit };

std::string reeb_event_name(ReebEventType t);

struct ReebNode {
    int id = -1;
    ReebEventType type = ReebEventType::birth;
    double eps = 0.0;
    Vec3 location;  // representative point of the involved components
};

struct ReebTrack {
    int id = -1;
    int from_node = -1;  // node at the lower-eps end
    int to_node = -1;    // node at the upper-eps end
    double eps_lo = 0.0, eps_hi = 0.0;
    // (sample index, component index) of the slices this track runs through
    std::vector<std::pair<int, int>> samples;
    bool flagged = false;  // ambiguous matching along the way
};

struct ReebGraph {
    std::vector<ReebNode> nodes;
    std::vector<ReebTrack> tracks;
    std::vector<double> sample_eps;
    std::vector<std::vector<Polyline3>> sample_slices;

    int count_events(ReebEventType t) const;
    const Polyline3* track_slice(const ReebTrack& t, int which) const;  // which <0: last
};

struct ReebOptions {
    int axis = 2;
    double slope_cap = 10.0;        // drift rate bound for near-horizontal triangles
    double refine_width_rel = 1e-3; // event bisection width, relative to the eps range
    double ambiguity_ratio = 1.2;   // second-best / best flag threshold
};

// Slices at the given ascending eps samples, tracks components across
// adjacent samples by Hausdorff proximity, inserts birth/death/merge/split
// events and refines their eps by bisection (re-slicing).
ReebGraph build_reeb(const SurfaceMesh& mesh, int axis, std::vector<double> eps_samples,
                     const ReebOptions& opt = {});

// ---------------------------------------------------------------------------
// topology classification of bifurcation surfaces

enum class TopologyCase { case_i, case_ii, case_iii, case_iib, other };

struct TopologyClass {
    TopologyCase c = TopologyCase::other;
    std::string description;
};

std::string topology_case_name(TopologyCase c);

// CaseI: one track, no interior events. CaseII: exactly one merge (or one
// split). CaseIII: >= 2 tracks, all ending in deaths (or all starting at
// births), no merge/split. CaseIIb: a CaseII subgraph plus a disc-like track
// sharing the given codim-2 boundary curve.
TopologyClass classify_topology(const ReebGraph& g,
                                const std::vector<Polyline3>* codim2 = nullptr,
                                double share_tol = 0.0);

// ---------------------------------------------------------------------------
// folds on codimension-two curves

enum class FoldVisibility { visible, invisible, unclassified };

struct FoldPoint {
    Vec3 location;          // refined extremum position on the curve
    double eps_value = 0.0; // refined extremum height
    MorseKind kind = MorseKind::maximum;  // maximum or minimum along the curve
    FoldVisibility visibility = FoldVisibility::unclassified;
    double quad_coeff = 0.0;   // the +-mu^2 coefficient of the local fit
    double fit_residual = 0.0;
    bool low_confidence = false;  // fit residual above 10% of the window range
};

// Interior eps extrema of a polyline, each refined by a quadratic fit over a
// 5-point window. Monotone curves yield an empty list.
std::vector<FoldPoint> curve_folds(const Polyline3& curve, int axis = 2);

// Invisible iff the fold sits within delta_vis of one of the mesh's
// sharp-fold polylines; delta_vis <= 0 selects 3x the median mesh edge.
FoldVisibility fold_visibility(const FoldPoint& fold, const SurfaceMesh& mesh,
                               double delta_vis = 0.0);

// ---------------------------------------------------------------------------
// fold and cusp sets of a scalar field F(lambda, eps1, eps2)

using ScalarField3 = std::function<double(const Vec3&)>;

struct CuspPoint {
    Vec3 location;              // (lambda, eps1, eps2)
    double tangency_residual = 0.0;  // angle between the adjoining fold branches
    int branch_a = -1, branch_b = -1;
};

struct FoldSet {
    std::vector<Polyline3> folds;        // in (lambda, eps1, eps2)
    std::vector<Polyline3> projections;  // same curves projected to (eps1, eps2, 0)
    std::vector<CuspPoint> cusps;
    int dropped_candidates = 0;  // Newton failures discarded with a warning
};

struct FoldSetOptions {
    double fd_step_rel = 1e-6;   // finite-difference step, relative to the box
    double newton_tol = 1e-12;
    int newton_iters = 30;
};

// Extracts {F = 0, dF/dlambda = 0} by marching-tetrahedra intersection of the
// two implicit surfaces, Newton-polishes the samples, and locates cusp points
// where additionally d2F/dlambda2 = 0.
FoldSet fold_set_implicit(const ScalarField3& field, const Box3& box, int resolution,
                          const FoldSetOptions& opt = {});

struct LineRoots {
    int count = 0;
    std::vector<double> roots;          // ascending
    std::vector<bool> tangential;       // per root: |dF/dlambda| below tolerance
};

// Roots of lambda -> F(lambda, eps1, eps2) on [lam_lo, lam_hi] by fine scan
// plus bisection; tangential (double) zeros are located at minima of |F| and
// counted once, flagged.
LineRoots count_roots_line(const ScalarField3& field, double eps1, double eps2, double lam_lo,
                           double lam_hi, int scans = 2000);

}  // namespace atlas

#endif
