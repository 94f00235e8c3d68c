#include "atlas/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace atlas {

std::string role_token(PolylineRole role) {
    switch (role) {
        case PolylineRole::codim1_slice: return "codim1-slice";
        case PolylineRole::codim2_curve: return "codim2-curve";
        case PolylineRole::sc_boundary: return "sc-boundary";
    }
    return "codim2-curve";
}

PolylineRole parse_role(const std::string& token) {
    if (token == "codim1-slice") return PolylineRole::codim1_slice;
    if (token == "codim2-curve") return PolylineRole::codim2_curve;
    if (token == "sc-boundary") return PolylineRole::sc_boundary;
    throw std::invalid_argument("unknown polyline role '" + token + "'");
}

double Polyline3::length() const {
    double len = 0.0;
    for (size_t i = 1; i < points.size(); ++i) len += norm(points[i] - points[i - 1]);
    if (closed && points.size() > 2) len += norm(points.front() - points.back());
    return len;
}

Vec3 Polyline3::centroid() const {
    Vec3 c;
    for (const Vec3& p : points) c += p;
    return points.empty() ? c : c / static_cast<double>(points.size());
}

double Polyline3::extent() const {
    const Vec3 c = centroid();
    double e = 0.0;
    for (const Vec3& p : points) e = std::max(e, norm(p - c));
    return e;
}

void Polyline3::validate() const {
    if (points.size() < 2) throw std::invalid_argument("polyline needs >= 2 vertices");
    for (const Vec3& p : points)
        if (!finite(p)) throw std::invalid_argument("polyline vertex not finite");
    for (size_t i = 1; i < points.size(); ++i)
        if (norm(points[i] - points[i - 1]) == 0.0)
            throw std::invalid_argument("polyline has repeated consecutive vertices");
    if (closed && norm(points.front() - points.back()) == 0.0)
        throw std::invalid_argument("closed polyline must not repeat the first vertex");
}

namespace {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double denom = dot(ab, ab);
    if (denom == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / denom, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

}  // namespace

double distance_to_polyline(const Vec3& p, const Polyline3& line) {
    double best = std::numeric_limits<double>::infinity();
    const auto& pts = line.points;
    if (pts.size() == 1) return norm(p - pts[0]);
    for (size_t i = 1; i < pts.size(); ++i)
        best = std::min(best, point_segment_distance(p, pts[i - 1], pts[i]));
    if (line.closed && pts.size() > 2)
        best = std::min(best, point_segment_distance(p, pts.back(), pts.front()));
    return best;
}

double directed_hausdorff(const Polyline3& a, const Polyline3& b) {
    double worst = 0.0;
    for (const Vec3& p : a.points) worst = std::max(worst, distance_to_polyline(p, b));
    return worst;
}

double symmetric_hausdorff(const Polyline3& a, const Polyline3& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double min_distance(const Polyline3& a, const Polyline3& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& p : a.points) best = std::min(best, distance_to_polyline(p, b));
    return best;
}

Box3 SurfaceMesh::bounds() const {
    Box3 box{{1e300, 1e300, 1e300}, {-1e300, -1e300, -1e300}};
    for (const Vec3& v : vertices) {
        for (int c = 0; c < 3; ++c) {
            box.lo[c] = std::min(box.lo[c], v[c]);
            box.hi[c] = std::max(box.hi[c], v[c]);
        }
    }
    return box;
}

double SurfaceMesh::median_edge_length() const {
    std::vector<double> lengths;
    lengths.reserve(triangles.size() * 3);
    for (const auto& t : triangles) {
        lengths.push_back(norm(vertices[t[0]] - vertices[t[1]]));
        lengths.push_back(norm(vertices[t[1]] - vertices[t[2]]));
        lengths.push_back(norm(vertices[t[2]] - vertices[t[0]]));
    }
    if (lengths.empty()) return 0.0;
    std::nth_element(lengths.begin(), lengths.begin() + lengths.size() / 2, lengths.end());
    return lengths[lengths.size() / 2];
}

double SurfaceMesh::total_area() const {
    double area = 0.0;
    for (const auto& t : triangles)
        area += 0.5 * norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
    return area;
}

void SurfaceMesh::validate() const {
    const int n = static_cast<int>(vertices.size());
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : triangles) {
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= n) throw std::invalid_argument("triangle index out of range");
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw std::invalid_argument("triangle repeats a vertex");
        const double area =
            0.5 * norm(cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]));
        if (area <= 1e-14) throw std::invalid_argument("degenerate triangle (area <= 1e-14)");
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            ++edge_count[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (const auto& [edge, count] : edge_count)
        if (count > 2) throw std::invalid_argument("edge shared by more than two triangles");
    for (const Vec3& v : vertices)
        if (!finite(v)) throw std::invalid_argument("mesh vertex not finite");
}

MeshAdjacency::MeshAdjacency(const SurfaceMesh& mesh) {
    const int n = static_cast<int>(mesh.vertices.size());
    vertex_triangles.assign(n, {});
    link.assign(n, {});
    boundary.assign(n, false);

    std::map<std::pair<int, int>, int> edge_count;
    for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        const auto& t = mesh.triangles[ti];
        for (int k = 0; k < 3; ++k) {
            vertex_triangles[t[k]].push_back(static_cast<int>(ti));
            const int a = t[k], b = t[(k + 1) % 3];
            ++edge_count[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (const auto& [edge, count] : edge_count)
        if (count > 2) edge_manifold = false;

    // Order each vertex link by walking opposite edges of the fan.
    for (int v = 0; v < n; ++v) {
        const auto& fan = vertex_triangles[v];
        if (fan.empty()) {
            boundary[v] = true;
            continue;
        }
        // adjacency among link vertices: each fan triangle joins its two
        // non-v vertices
        std::map<int, std::vector<int>> adj;
        for (int ti : fan) {
            const auto& t = mesh.triangles[ti];
            int a = -1, b = -1;
            for (int k = 0; k < 3; ++k) {
                if (t[k] == v) continue;
                (a < 0 ? a : b) = t[k];
            }
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        bool broken = false;
        int start = adj.begin()->first;
        int degree_one = 0;
        for (const auto& [node, nb] : adj) {
            if (nb.size() == 1) {
                ++degree_one;
                start = node;
            } else if (nb.size() != 2) {
                broken = true;
            }
        }
        if (broken || (degree_one != 0 && degree_one != 2)) {
            boundary[v] = true;  // non-disc fan
            continue;
        }
        boundary[v] = degree_one == 2;
        std::vector<int> ordered;
        ordered.reserve(adj.size());
        int prev = -1, cur = start;
        while (true) {
            ordered.push_back(cur);
            const auto& nb = adj.at(cur);
            int nxt = -1;
            for (int cand : nb)
                if (cand != prev) nxt = cand;
            if (nxt < 0) break;  // path end
            prev = cur;
            cur = nxt;
            if (cur == start) break;  // cycle closed
            if (ordered.size() > adj.size()) {
                broken = true;
                break;
            }
        }
        if (broken || ordered.size() != adj.size()) {
            boundary[v] = true;
            link[v].clear();
        } else {
            link[v] = std::move(ordered);
        }
    }
}

}  // namespace atlas
