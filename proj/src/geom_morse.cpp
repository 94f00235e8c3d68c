#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "atlas/geom.hpp"

namespace atlas {

Transversality transversality_check(const SurfaceMesh& mesh, const MeshAdjacency& adj,
                                    int vertex_id, int axis,
                                    const TransversalityOptions& opt) {
    if (vertex_id < 0 || vertex_id >= static_cast<int>(mesh.vertices.size()))
        throw std::invalid_argument("vertex id out of range");
    if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
    if (adj.boundary[vertex_id]) return Transversality::boundary_vertex;

    Vec3 normal;
    for (int ti : adj.vertex_triangles[vertex_id]) {
        const auto& t = mesh.triangles[ti];
        normal += cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                        mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    }
    const double len = norm(normal);
    if (len == 0.0) return Transversality::degenerate;
    const double axial = std::abs(normal[axis]) / len;
    const double angle = std::acos(std::min(1.0, axial));
    return angle < opt.angle_tol ? Transversality::degenerate : Transversality::transversal;
}

namespace {

// height with simulation-of-simplicity tie breaking
struct Heights {
    std::vector<double> h;

    Heights(const SurfaceMesh& mesh, int axis) {
        const Box3 box = mesh.bounds();
        const double range = std::max(box.hi[axis] - box.lo[axis], 1e-300);
        h.resize(mesh.vertices.size());
        for (size_t i = 0; i < mesh.vertices.size(); ++i)
            h[i] = mesh.vertices[i][axis] + static_cast<double>(i) * 1e-12 * range;
    }
};

// least-squares quadratic fit of height over the 2-ring in the two non-axis
// coordinates; returns refined location (falls back to the vertex) and the
// RMS residual
std::pair<Vec3, double> refine_quadratic(const SurfaceMesh& mesh, const MeshAdjacency& adj,
                                         int v, int axis) {
    const int u_axis = axis == 0 ? 1 : 0;
    const int w_axis = axis == 2 ? 1 : 2;

    // gather the 2-ring
    std::vector<int> ring{v};
    for (int n1 : adj.link[v]) ring.push_back(n1);
    const size_t one_ring_end = ring.size();
    for (size_t idx = 1; idx < one_ring_end; ++idx) {
        const int n1 = ring[idx];
        for (int n2 : adj.link[n1]) {
            if (std::find(ring.begin(), ring.end(), n2) == ring.end()) ring.push_back(n2);
        }
    }
    if (ring.size() < 6) return {mesh.vertices[v], 0.0};

    const Vec3 origin = mesh.vertices[v];
    const int m = static_cast<int>(ring.size());
    // columns: 1, u, w, u^2, u w, w^2
    std::vector<double> ata(36, 0.0), atb(6, 0.0);
    for (int r = 0; r < m; ++r) {
        const Vec3& p = mesh.vertices[ring[r]];
        const double u = p[u_axis] - origin[u_axis];
        const double w = p[w_axis] - origin[w_axis];
        const double row[6] = {1.0, u, w, u * u, u * w, w * w};
        const double b = p[axis] - origin[axis];
        for (int a = 0; a < 6; ++a) {
            atb[a] += row[a] * b;
            for (int c = 0; c < 6; ++c) ata[a * 6 + c] += row[a] * row[c];
        }
    }
    std::vector<double> coef = atb;
    std::vector<double> ata_copy = ata;
    if (!solve_dense(ata_copy, coef, 6, 1e-30)) return {mesh.vertices[v], 0.0};

    // residual of the fit
    double sse = 0.0;
    for (int r = 0; r < m; ++r) {
        const Vec3& p = mesh.vertices[ring[r]];
        const double u = p[u_axis] - origin[u_axis];
        const double w = p[w_axis] - origin[w_axis];
        const double fit =
            coef[0] + coef[1] * u + coef[2] * w + coef[3] * u * u + coef[4] * u * w + coef[5] * w * w;
        const double d = p[axis] - origin[axis] - fit;
        sse += d * d;
    }
    const double rms = std::sqrt(sse / m);

    // critical point of the fitted quadratic
    std::vector<double> hess = {2.0 * coef[3], coef[4], coef[4], 2.0 * coef[5]};
    std::vector<double> rhs = {-coef[1], -coef[2]};
    if (!solve_dense(hess, rhs, 2, 1e-14)) return {mesh.vertices[v], rms};

    Vec3 refined = origin;
    refined[u_axis] += rhs[0];
    refined[w_axis] += rhs[1];
    const double du = rhs[0], dw = rhs[1];
    refined[axis] = origin[axis] + coef[0] + coef[1] * du + coef[2] * dw + coef[3] * du * du +
                    coef[4] * du * dw + coef[5] * dw * dw;

    // reject runaway refinements (degenerate quadratics)
    const Vec3 delta = refined - origin;
    double ring_radius = 0.0;
    for (int r = 1; r < m; ++r)
        ring_radius = std::max(ring_radius, norm(mesh.vertices[ring[r]] - origin));
    if (norm(delta) > 0.75 * ring_radius) return {mesh.vertices[v], rms};
    return {refined, rms};
}

}  // namespace

namespace {

// Greedy cancellation of saddle-extremum pairs whose height gap is below the
// noise threshold: a saddle annihilates with a min just below it or a max
// just above it. Gaps use the raw vertex heights; refined locations can
// drift along flat valleys.
void cancel_noise_pairs(MorseReport& report, const SurfaceMesh& mesh, int axis, double tol) {
    auto raw = [&](const CriticalPoint& cp) { return mesh.vertices[cp.vertex_id][axis]; };
    for (;;) {
        double best_gap = tol;
        int best_s = -1, best_e = -1;
        for (size_t si = 0; si < report.points.size(); ++si) {
            if (report.points[si].kind != MorseKind::saddle) continue;
            const double hs = raw(report.points[si]);
            for (size_t ei = 0; ei < report.points.size(); ++ei) {
                const MorseKind k = report.points[ei].kind;
                if (k == MorseKind::saddle) continue;
                const double he = raw(report.points[ei]);
                const double gap = k == MorseKind::minimum ? hs - he : he - hs;
                if (gap >= 0.0 && gap < best_gap) {
                    best_gap = gap;
                    best_s = static_cast<int>(si);
                    best_e = static_cast<int>(ei);
                }
            }
        }
        if (best_s < 0) return;
        report.points.erase(report.points.begin() + std::max(best_s, best_e));
        report.points.erase(report.points.begin() + std::min(best_s, best_e));
        ++report.cancelled_pairs;
    }
}

}  // namespace

MorseReport pl_critical_points(const SurfaceMesh& mesh, int axis, const MorseOptions& opt) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
    const MeshAdjacency adj(mesh);
    if (!adj.edge_manifold) throw std::invalid_argument("mesh is not edge-manifold");
    const Heights hs(mesh, axis);

    MorseReport report;
    for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v) {
        if (adj.boundary[v] || adj.link[v].empty()) continue;
        ++report.interior_vertices;
        const auto& link = adj.link[v];
        const double hv = hs.h[v];

        int changes = 0;
        int below = 0;
        for (size_t k = 0; k < link.size(); ++k) {
            const double da = hs.h[link[k]] - hv;
            const double db = hs.h[link[(k + 1) % link.size()]] - hv;
            if (da == 0.0 || db == 0.0)
                throw std::runtime_error("tie perturbation failed at vertex " + std::to_string(v));
            if (da < 0.0) ++below;
            if ((da < 0.0) != (db < 0.0)) ++changes;
        }

        if (changes == 2) continue;  // regular vertex
        if (changes == 0) {
            CriticalPoint cp;
            cp.vertex_id = v;
            cp.kind = below == static_cast<int>(link.size()) ? MorseKind::maximum
                                                             : MorseKind::minimum;
            auto [loc, rms] = refine_quadratic(mesh, adj, v, axis);
            cp.location = loc;
            cp.fit_residual = rms;
            report.points.push_back(cp);
        } else if (changes == 4) {
            CriticalPoint cp;
            cp.vertex_id = v;
            cp.kind = MorseKind::saddle;
            auto [loc, rms] = refine_quadratic(mesh, adj, v, axis);
            cp.location = loc;
            cp.fit_residual = rms;
            report.points.push_back(cp);
        } else {
            report.multisaddles.push_back({v, changes, mesh.vertices[v]});
        }
    }
    if (opt.cancel_tol_rel > 0.0) {
        const Box3 box = mesh.bounds();
        cancel_noise_pairs(report, mesh, axis, opt.cancel_tol_rel * (box.hi[axis] - box.lo[axis]));
    }
    return report;
}

std::vector<Polyline3> slice_level(const SurfaceMesh& mesh, double value, int axis) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
    const Box3 box = mesh.bounds();
    const double range = std::max(box.hi[axis] - box.lo[axis], 1e-300);
    for (const Vec3& v : mesh.vertices) {
        if (v[axis] == value) {
            value += 1e-12 * range;
            break;
        }
    }

    // segment per crossed triangle, vertices keyed by mesh edge
    std::map<std::pair<int, int>, int> edge_vertex;
    std::vector<Vec3> verts;
    auto edge_vtx = [&](int a, int b) {
        const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const double fa = mesh.vertices[a][axis] - value;
        const double fb = mesh.vertices[b][axis] - value;
        const double t = fa / (fa - fb);
        const int id = static_cast<int>(verts.size());
        verts.push_back(mesh.vertices[a] + (mesh.vertices[b] - mesh.vertices[a]) * t);
        edge_vertex.emplace(key, id);
        return id;
    };

    std::map<int, std::vector<int>> adjacency;  // slice-vertex id -> neighbors
    for (const auto& t : mesh.triangles) {
        int cut[3];
        int nc = 0;
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            const double fa = mesh.vertices[a][axis] - value;
            const double fb = mesh.vertices[b][axis] - value;
            if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
                if (nc < 3) cut[nc++] = edge_vtx(a, b);
            }
        }
        if (nc == 2 && cut[0] != cut[1]) {
            adjacency[cut[0]].push_back(cut[1]);
            adjacency[cut[1]].push_back(cut[0]);
        }
    }

    // walk chains; degree <= 2 when the mesh is edge-manifold
    std::vector<Polyline3> out;
    std::map<int, bool> used;
    for (const auto& [k, nb] : adjacency) used[k] = false;

    auto walk = [&](int start) {
        Polyline3 line;
        line.role = PolylineRole::codim1_slice;
        std::vector<int> chain{start};
        used[start] = true;
        int prev = -1, cur = start;
        for (;;) {
            int nxt = -1;
            for (int cand : adjacency.at(cur)) {
                if (cand == prev) continue;
                if (used.at(cand)) {
                    if (cand == start && chain.size() > 2) line.closed = true;
                    continue;
                }
                nxt = cand;
                break;
            }
            if (nxt < 0) break;
            chain.push_back(nxt);
            used[nxt] = true;
            prev = cur;
            cur = nxt;
        }
        for (int id : chain) {
            if (!line.points.empty() && norm(verts[id] - line.points.back()) == 0.0) continue;
            line.points.push_back(verts[id]);
        }
        if (line.closed && line.points.size() > 2 &&
            norm(line.points.front() - line.points.back()) == 0.0)
            line.points.pop_back();
        return line;
    };

    for (const auto& [k, nb] : adjacency)
        if (!used.at(k) && nb.size() == 1) {
            Polyline3 line = walk(k);
            if (line.points.size() >= 2) out.push_back(std::move(line));
        }
    for (const auto& [k, nb] : adjacency)
        if (!used.at(k)) {
            Polyline3 line = walk(k);
            if (line.points.size() >= 2) out.push_back(std::move(line));
        }
    return out;
}

}  // namespace atlas
