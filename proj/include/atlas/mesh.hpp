#ifndef ATLAS_MESH_HPP
#define ATLAS_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include "atlas/linalg.hpp"

namespace atlas {

struct Box3 {
    Vec3 lo, hi;

    Vec3 extent() const { return hi - lo; }
    double diagonal() const { return norm(hi - lo); }
    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
               p.z <= hi.z;
    }
};

enum class PolylineRole { codim1_slice, codim2_curve, sc_boundary };

std::string role_token(PolylineRole role);
PolylineRole parse_role(const std::string& token);

// An ordered curve in 3-parameter space. For closed curves the first vertex
// is not repeated at the end; closure is implicit.
struct Polyline3 {
    std::vector<Vec3> points;
    bool closed = false;
    PolylineRole role = PolylineRole::codim2_curve;

    double length() const;
    Vec3 centroid() const;
    // largest distance from the centroid (coarse size measure)
    double extent() const;
    void validate() const;  // >= 2 distinct consecutive vertices
};

// Distance from a point to the polyline (segments, closing segment included
// for closed curves).
double distance_to_polyline(const Vec3& p, const Polyline3& line);
// max over vertices of `a` of the distance to `b`
double directed_hausdorff(const Polyline3& a, const Polyline3& b);
double symmetric_hausdorff(const Polyline3& a, const Polyline3& b);
// min over vertices of `a` of the distance to `b`
double min_distance(const Polyline3& a, const Polyline3& b);

// Triangulated surface embedded in 3-parameter space. Sharp-fold polylines
// mark curves along which two leaves of the surface meet at mesh-unresolvable
// distance (thin homoclinic tubes).
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Polyline3> sharp_folds;

    bool empty() const { return triangles.empty(); }
    Box3 bounds() const;
    double median_edge_length() const;
    double total_area() const;
    // throws std::invalid_argument on bad indices, degenerate triangles
    // (area <= 1e-14) or non-edge-manifold connectivity
    void validate() const;
};

// Connectivity derived from a mesh: triangle fans, ordered vertex links and
// boundary flags. The link of vertex v is ordered so that consecutive
// entries share a triangle with v; for interior vertices it is a cycle.
struct MeshAdjacency {
    std::vector<std::vector<int>> vertex_triangles;
    std::vector<std::vector<int>> link;     // ordered; empty if the fan is broken
    std::vector<bool> boundary;             // link is a path, not a cycle
    bool edge_manifold = true;

    explicit MeshAdjacency(const SurfaceMesh& mesh);
};

}  // namespace atlas

#endif
