#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "atlas/geom.hpp"
#include "tet_grid.hpp"

namespace atlas {

namespace {

double arc_between(const Polyline3& c, int i, int j) {
    // cumulative arclength from vertex i to j walking forward (handles wrap)
    const int m = static_cast<int>(c.points.size());
    double s = 0.0;
    int cur = i;
    while (cur != j) {
        const int nxt = (cur + 1) % m;
        s += norm(c.points[nxt] - c.points[cur]);
        cur = nxt;
    }
    return s;
}

Vec3 point_at_arc(const Polyline3& c, int start, double s) {
    // walk forward (s >= 0) or backward from vertex `start`
    const int m = static_cast<int>(c.points.size());
    int cur = start;
    if (s >= 0.0) {
        while (true) {
            const int nxt = (cur + 1) % m;
            const double seg = norm(c.points[nxt] - c.points[cur]);
            if (s <= seg || seg == 0.0)
                return c.points[cur] + (c.points[nxt] - c.points[cur]) * (seg == 0.0 ? 0.0 : s / seg);
            s -= seg;
            cur = nxt;
            if (cur == start) return c.points[cur];
        }
    }
    s = -s;
    while (true) {
        const int prv = (cur - 1 + m) % m;
        const double seg = norm(c.points[cur] - c.points[prv]);
        if (s <= seg || seg == 0.0)
            return c.points[cur] + (c.points[prv] - c.points[cur]) * (seg == 0.0 ? 0.0 : s / seg);
        s -= seg;
        cur = prv;
        if (cur == start) return c.points[cur];
    }
}

}  // namespace

std::vector<FoldPoint> curve_folds(const Polyline3& curve, int axis) {
    if (curve.points.size() < 5)
        throw std::invalid_argument("curve_folds needs at least 5 vertices");
    const int m = static_cast<int>(curve.points.size());
    auto h = [&](int i) { return curve.points[((i % m) + m) % m][axis]; };

    std::vector<FoldPoint> out;
    const int lo = curve.closed ? 0 : 1;
    const int hi = curve.closed ? m - 1 : m - 2;
    for (int i = lo; i <= hi; ++i) {
        const double hm = h(i - 1), h0 = h(i), hp = h(i + 1);
        // two-vertex plateaus (extremum exactly between samples) count once,
        // at their first vertex
        const bool is_max = h0 > hm && (h0 > hp || (h0 == hp && h0 > h(i + 2)));
        const bool is_min = h0 < hm && (h0 < hp || (h0 == hp && h0 < h(i + 2)));
        if (!is_max && !is_min) continue;

        FoldPoint fp;
        fp.kind = is_max ? MorseKind::maximum : MorseKind::minimum;

        // 5-point window; open curves too close to an end stay unfitted
        if (!curve.closed && (i < 2 || i > m - 3)) {
            fp.location = curve.points[i];
            fp.eps_value = h0;
            fp.low_confidence = true;
            out.push_back(fp);
            continue;
        }

        // quadratic fit of height against signed arclength around vertex i
        double s[5], e[5];
        double emin = 1e300, emax = -1e300;
        for (int w = -2; w <= 2; ++w) {
            const int idx = ((i + w) % m + m) % m;
            s[w + 2] = w < 0 ? -arc_between(curve, idx, i) : arc_between(curve, i, idx);
            e[w + 2] = curve.points[idx][axis];
            emin = std::min(emin, e[w + 2]);
            emax = std::max(emax, e[w + 2]);
        }
        double ata[9] = {0}, atb[3] = {0};
        for (int r = 0; r < 5; ++r) {
            const double row[3] = {s[r] * s[r], s[r], 1.0};
            for (int a = 0; a < 3; ++a) {
                atb[a] += row[a] * e[r];
                for (int b = 0; b < 3; ++b) ata[a * 3 + b] += row[a] * row[b];
            }
        }
        std::vector<double> mat(ata, ata + 9), rhs(atb, atb + 3);
        if (!solve_dense(mat, rhs, 3, 1e-30) || rhs[0] == 0.0) {
            fp.location = curve.points[i];
            fp.eps_value = h0;
            fp.low_confidence = true;
            out.push_back(fp);
            continue;
        }
        const double a = rhs[0], b = rhs[1], c = rhs[2];
        double sse = 0.0;
        for (int r = 0; r < 5; ++r) {
            const double d = e[r] - (a * s[r] * s[r] + b * s[r] + c);
            sse += d * d;
        }
        fp.fit_residual = std::sqrt(sse / 5.0);
        fp.quad_coeff = a;
        const double s_star = std::clamp(-b / (2.0 * a), s[0], s[4]);
        fp.eps_value = c - b * b / (4.0 * a);
        fp.location = point_at_arc(curve, i, s_star);
        fp.location[axis] = fp.eps_value;
        if (fp.fit_residual > 0.1 * std::max(emax - emin, 1e-300)) fp.low_confidence = true;
        out.push_back(fp);
    }
    return out;
}

FoldVisibility fold_visibility(const FoldPoint& fold, const SurfaceMesh& mesh, double delta_vis) {
    if (mesh.sharp_folds.empty()) return FoldVisibility::unclassified;
    if (delta_vis <= 0.0) delta_vis = 3.0 * mesh.median_edge_length();
    double best = std::numeric_limits<double>::infinity();
    for (const Polyline3& line : mesh.sharp_folds)
        best = std::min(best, distance_to_polyline(fold.location, line));
    return best < delta_vis ? FoldVisibility::invisible : FoldVisibility::visible;
}

// ---------------------------------------------------------------------------
// implicit fold/cusp sets

namespace {

struct Derivs {
    const ScalarField3& f;
    double h;   // lambda step for first derivatives
    double h2;  // larger step for the second derivative (roundoff floor)

    double f_l(const Vec3& p) const {
        Vec3 a = p, b = p;
        a.x += h;
        b.x -= h;
        return (f(a) - f(b)) / (2.0 * h);
    }
    double f_ll(const Vec3& p) const {
        Vec3 a = p, b = p;
        a.x += h2;
        b.x -= h2;
        return (f(a) - 2.0 * f(p) + f(b)) / (h2 * h2);
    }
    Vec3 grad(const std::function<double(const Vec3&)>& g, const Vec3& p) const {
        Vec3 out;
        for (int c = 0; c < 3; ++c) {
            Vec3 a = p, b = p;
            a[c] += h;
            b[c] -= h;
            out[c] = (g(a) - g(b)) / (2.0 * h);
        }
        return out;
    }
};

// Gauss-Newton minimal-norm step onto {g1 = 0, g2 = 0}; keeps the best
// iterate seen, since finite-difference noise floors the residual
bool polish_on_two(const std::function<double(const Vec3&)>& g1,
                   const std::function<double(const Vec3&)>& g2, const Derivs& d, Vec3& p,
                   double tol, int iters) {
    Vec3 best = p;
    double best_res = std::numeric_limits<double>::infinity();
    Vec3 cur = p;
    for (int it = 0; it < iters; ++it) {
        const double v1 = g1(cur), v2 = g2(cur);
        const double res = std::max(std::abs(v1), std::abs(v2));
        if (res < best_res) {
            best_res = res;
            best = cur;
        }
        if (res < tol) break;
        const Vec3 j1 = d.grad(g1, cur), j2 = d.grad(g2, cur);
        const double a11 = dot(j1, j1), a12 = dot(j1, j2), a22 = dot(j2, j2);
        const double det = a11 * a22 - a12 * a12;
        if (std::abs(det) < 1e-30) break;
        const double w1 = (-v1 * a22 + v2 * a12) / det;
        const double w2 = (-v2 * a11 + v1 * a12) / det;
        cur += j1 * w1 + j2 * w2;
        if (!finite(cur)) break;
    }
    if (best_res < std::numeric_limits<double>::infinity()) {
        p = best;
        return best_res < tol;
    }
    return false;
}

// Newton on the square 3-system {F, F_l, F_ll} for cusp candidates. The
// second-derivative residual tolerance sits above its FD noise floor.
bool newton_cusp(const ScalarField3& f, const Derivs& d, Vec3& p, double tol, double tol_ll,
                 int iters) {
    for (int it = 0; it < iters; ++it) {
        const double v0 = f(p), v1 = d.f_l(p), v2 = d.f_ll(p);
        if (std::abs(v0) < tol && std::abs(v1) < tol && std::abs(v2) < tol_ll) return true;
        auto fl = [&](const Vec3& q) { return d.f_l(q); };
        auto fll = [&](const Vec3& q) { return d.f_ll(q); };
        const Vec3 g0 = d.grad(f, p), g1 = d.grad(fl, p), g2 = d.grad(fll, p);
        std::vector<double> a = {g0.x, g0.y, g0.z, g1.x, g1.y, g1.z, g2.x, g2.y, g2.z};
        std::vector<double> rhs = {-v0, -v1, -v2};
        if (!solve_dense(a, rhs, 3, 1e-30)) return false;
        p += Vec3{rhs[0], rhs[1], rhs[2]};
        if (!finite(p)) return false;
    }
    return false;
}

struct FaceKey {
    // sorted global node ids of a tet face
    size_t a, b, c;
    auto operator<=>(const FaceKey&) const = default;
};

FaceKey make_face_key(size_t x, size_t y, size_t z) {
    size_t v[3] = {x, y, z};
    std::sort(v, v + 3);
    return {v[0], v[1], v[2]};
}

// Joins chains whose endpoints fall within `tol` (marching gaps at tangencies
// and face-tolerance misses); a chain whose own ends meet becomes closed.
void stitch_chains(std::vector<Polyline3>& chains, double tol) {
    auto endpoint = [](const Polyline3& c, int which) {
        return which == 0 ? c.points.front() : c.points.back();
    };
    bool changed = true;
    while (changed) {
        changed = false;
        double best = tol;
        int bi = -1, bj = -1, bei = 0, bej = 0;
        for (size_t i = 0; i < chains.size(); ++i) {
            if (chains[i].closed) continue;
            for (size_t j = i + 1; j < chains.size(); ++j) {
                if (chains[j].closed) continue;
                for (int ei = 0; ei < 2; ++ei) {
                    for (int ej = 0; ej < 2; ++ej) {
                        const double d = norm(endpoint(chains[i], ei) - endpoint(chains[j], ej));
                        if (d < best) {
                            best = d;
                            bi = static_cast<int>(i);
                            bj = static_cast<int>(j);
                            bei = ei;
                            bej = ej;
                        }
                    }
                }
            }
        }
        if (bi >= 0) {
            Polyline3& a = chains[bi];
            Polyline3& b = chains[bj];
            if (bei == 0) std::reverse(a.points.begin(), a.points.end());
            if (bej == 1) std::reverse(b.points.begin(), b.points.end());
            for (const Vec3& p : b.points)
                if (norm(p - a.points.back()) > 0.0) a.points.push_back(p);
            chains.erase(chains.begin() + bj);
            changed = true;
        }
    }
    for (Polyline3& c : chains) {
        if (!c.closed && c.points.size() > 3 &&
            norm(c.points.front() - c.points.back()) < tol) {
            if (norm(c.points.front() - c.points.back()) == 0.0) c.points.pop_back();
            c.closed = true;
        }
    }
}

}  // namespace

FoldSet fold_set_implicit(const ScalarField3& field, const Box3& box, int resolution,
                          const FoldSetOptions& opt) {
    if (resolution < 8) throw std::invalid_argument("resolution must be >= 8 per axis");
    const double width = box.hi.x - box.lo.x;
    Derivs deriv{field, opt.fd_step_rel * width, 1e-4 * width};

    detail::TetGrid g1(field, box, resolution, resolution, resolution);
    detail::TetGrid g2([&](const Vec3& p) { return deriv.f_l(p); }, box, resolution, resolution,
                       resolution);

    // curve vertex on a tet face: both linear interpolants vanish there
    std::map<FaceKey, int> face_vertex;
    std::vector<Vec3> verts;
    std::map<int, std::vector<int>> adjacency;

    auto face_point = [&](const size_t ids[3], const Vec3 pos[3], const double va[3],
                          const double vb[3], Vec3& out) {
        // solve for barycentric (w0, w1, w2), sum = 1, linear zeros of both
        const double a11 = va[0] - va[2], a12 = va[1] - va[2];
        const double a21 = vb[0] - vb[2], a22 = vb[1] - vb[2];
        const double det = a11 * a22 - a12 * a21;
        if (std::abs(det) < 1e-300) return false;
        const double r1 = -va[2], r2 = -vb[2];
        const double w0 = (r1 * a22 - a12 * r2) / det;
        const double w1 = (a11 * r2 - r1 * a21) / det;
        const double w2 = 1.0 - w0 - w1;
        // slightly-outside intersections are kept; the Newton polish pulls
        // them back onto the curve
        const double tol = -0.05;
        if (w0 < tol || w1 < tol || w2 < tol) return false;
        out = pos[0] * w0 + pos[1] * w1 + pos[2] * w2;
        (void)ids;
        return true;
    };

    size_t nid[8];
    Vec3 npos[8];
    for (int k = 0; k < resolution; ++k) {
        for (int j = 0; j < resolution; ++j) {
            for (int i = 0; i < resolution; ++i) {
                for (int c = 0; c < 8; ++c) {
                    int ci, cj, ck;
                    g1.corner(i, j, k, c, ci, cj, ck);
                    nid[c] = g1.node_id(ci, cj, ck);
                    npos[c] = g1.node_pos(ci, cj, ck);
                }
                for (const auto& tet : detail::kCubeTets) {
                    // quick sign rejection on both fields
                    bool n1 = false, p1 = false, n2 = false, p2 = false;
                    for (int c : tet) {
                        (g1.values[nid[c]] < 0.0 ? n1 : p1) = true;
                        (g2.values[nid[c]] < 0.0 ? n2 : p2) = true;
                    }
                    if (!(n1 && p1 && n2 && p2)) continue;

                    int face_ids[4];
                    int nf = 0;
                    static constexpr int kFaces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
                    for (const auto& fc : kFaces) {
                        const size_t ids3[3] = {nid[tet[fc[0]]], nid[tet[fc[1]]], nid[tet[fc[2]]]};
                        const Vec3 pos3[3] = {npos[tet[fc[0]]], npos[tet[fc[1]]], npos[tet[fc[2]]]};
                        const double va3[3] = {g1.values[ids3[0]], g1.values[ids3[1]],
                                               g1.values[ids3[2]]};
                        const double vb3[3] = {g2.values[ids3[0]], g2.values[ids3[1]],
                                               g2.values[ids3[2]]};
                        Vec3 pt;
                        if (!face_point(ids3, pos3, va3, vb3, pt)) continue;
                        const FaceKey key = make_face_key(ids3[0], ids3[1], ids3[2]);
                        auto it = face_vertex.find(key);
                        int vidx;
                        if (it == face_vertex.end()) {
                            vidx = static_cast<int>(verts.size());
                            verts.push_back(pt);
                            face_vertex.emplace(key, vidx);
                        } else {
                            vidx = it->second;
                        }
                        if (nf < 4) face_ids[nf++] = vidx;
                    }
                    if (nf == 2 && face_ids[0] != face_ids[1]) {
                        adjacency[face_ids[0]].push_back(face_ids[1]);
                        adjacency[face_ids[1]].push_back(face_ids[0]);
                    }
                }
            }
        }
    }

    // polish vertices onto the exact fold set
    auto fl_field = [&](const Vec3& p) { return deriv.f_l(p); };
    const double polish_tol = std::max(opt.newton_tol, 1e-9);
    for (Vec3& v : verts) polish_on_two(field, fl_field, deriv, v, polish_tol, opt.newton_iters);

    // chain into polylines
    FoldSet result;
    std::map<int, bool> used;
    for (const auto& [k, nb] : adjacency) used[k] = false;
    auto walk = [&](int start) {
        Polyline3 line;
        line.role = PolylineRole::codim2_curve;
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
        for (int id : chain)
            if (line.points.empty() || norm(verts[id] - line.points.back()) > 0.0)
                line.points.push_back(verts[id]);
        return line;
    };
    std::vector<Polyline3> chains;
    for (const auto& [k, nb] : adjacency)
        if (!used.at(k) && nb.size() == 1) {
            Polyline3 line = walk(k);
            if (line.points.size() >= 2) chains.push_back(std::move(line));
        }
    for (const auto& [k, nb] : adjacency)
        if (!used.at(k)) {
            Polyline3 line = walk(k);
            if (line.points.size() >= 2) chains.push_back(std::move(line));
        }

    const Vec3 cell{(box.hi.x - box.lo.x) / resolution, (box.hi.y - box.lo.y) / resolution,
                    (box.hi.z - box.lo.z) / resolution};
    stitch_chains(chains, 2.5 * norm(cell));

    // cusp candidates: sign changes of F_ll along each chain
    struct Candidate {
        int chain;
        int index;  // vertex before the sign change
        Vec3 guess;
    };
    std::vector<Candidate> candidates;
    for (int ci = 0; ci < static_cast<int>(chains.size()); ++ci) {
        const auto& pts = chains[ci].points;
        double prev_v = deriv.f_ll(pts[0]);
        for (size_t i = 1; i < pts.size(); ++i) {
            const double v = deriv.f_ll(pts[i]);
            if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0))
                candidates.push_back({ci, static_cast<int>(i - 1), (pts[i - 1] + pts[i]) * 0.5});
            prev_v = v;
        }
    }

    std::vector<std::pair<Vec3, std::pair<int, int>>> cusp_locs;  // location, (chain, index)
    double fll_scale = 1.0;
    for (const Polyline3& c : chains)
        for (const Vec3& p : c.points) fll_scale = std::max(fll_scale, std::abs(deriv.f_ll(p)));
    for (const Candidate& cand : candidates) {
        Vec3 p = cand.guess;
        if (!newton_cusp(field, deriv, p, std::max(opt.newton_tol, 1e-9), 1e-6 * fll_scale,
                         opt.newton_iters)) {
            ++result.dropped_candidates;
            continue;
        }
        cusp_locs.push_back({p, {cand.chain, cand.index}});
    }

    // split chains at cusps so each branch terminates there
    std::vector<Polyline3> final_chains;
    std::vector<CuspPoint> cusps;
    for (int ci = 0; ci < static_cast<int>(chains.size()); ++ci) {
        std::vector<std::pair<int, Vec3>> cuts;  // (index, location)
        for (const auto& [loc, src] : cusp_locs)
            if (src.first == ci) cuts.push_back({src.second, loc});
        std::sort(cuts.begin(), cuts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        if (cuts.empty()) {
            final_chains.push_back(chains[ci]);
            continue;
        }
        const auto& pts = chains[ci].points;
        int start = 0;
        for (const auto& [idx, loc] : cuts) {
            Polyline3 part;
            part.role = PolylineRole::codim2_curve;
            part.points.assign(pts.begin() + start, pts.begin() + idx + 1);
            if (part.points.empty() || norm(part.points.back() - loc) > 0.0)
                part.points.push_back(loc);
            if (part.points.size() >= 2) {
                final_chains.push_back(part);
            }
            start = idx + 1;
        }
        Polyline3 tail;
        tail.role = PolylineRole::codim2_curve;
        tail.points.push_back(cuts.back().second);
        for (size_t i = start; i < pts.size(); ++i)
            if (norm(pts[i] - tail.points.back()) > 0.0) tail.points.push_back(pts[i]);
        if (tail.points.size() >= 2) final_chains.push_back(tail);
    }

    // cusp records with branch association and tangent residuals
    for (const auto& [loc, src] : cusp_locs) {
        CuspPoint cp;
        cp.location = loc;
        std::vector<std::pair<double, int>> ends;
        for (int ci = 0; ci < static_cast<int>(final_chains.size()); ++ci) {
            const auto& pts = final_chains[ci].points;
            const double d =
                std::min(norm(pts.front() - loc), norm(pts.back() - loc));
            ends.push_back({d, ci});
        }
        std::sort(ends.begin(), ends.end());
        if (ends.size() >= 2) {
            cp.branch_a = ends[0].second;
            cp.branch_b = ends[1].second;
            // The curve tangent is grad(F) x grad(F_l); evaluate it just off
            // the cusp along each branch. Chord directions would carry an
            // O(cell) bias.
            auto leave_dir = [&](int ci) {
                const auto& pts = final_chains[ci].points;
                const bool at_front = norm(pts.front() - loc) <= norm(pts.back() - loc);
                const int n = static_cast<int>(pts.size());
                const int steps = std::min(3, n - 1);
                Vec3 t = at_front ? pts[steps] - pts[0] : pts[n - 1 - steps] - pts[n - 1];
                const double len = norm(t);
                return len > 0.0 ? t / len : Vec3{1, 0, 0};
            };
            auto curve_tangent = [&](const Vec3& q) {
                const Vec3 gf = deriv.grad(field, q);
                const Vec3 gl = deriv.grad(fl_field, q);
                const Vec3 t = cross(gf, gl);
                const double len = norm(t);
                return len > 0.0 ? t / len : Vec3{};
            };
            const double eta = 1e-5 * width;
            const Vec3 ta = curve_tangent(loc + leave_dir(cp.branch_a) * eta);
            const Vec3 tb = curve_tangent(loc + leave_dir(cp.branch_b) * eta);
            const double cosang = std::clamp(std::abs(dot(ta, tb)), 0.0, 1.0);
            cp.tangency_residual = std::acos(cosang);
        }
        cusps.push_back(cp);
    }

    result.folds = std::move(final_chains);
    result.cusps = std::move(cusps);
    for (const Polyline3& line : result.folds) {
        Polyline3 proj;
        proj.role = line.role;
        proj.closed = line.closed;
        for (const Vec3& p : line.points) {
            const Vec3 q{p.y, p.z, 0.0};
            if (proj.points.empty() || norm(q - proj.points.back()) > 0.0) proj.points.push_back(q);
        }
        if (proj.points.size() >= 2) result.projections.push_back(std::move(proj));
    }
    return result;
}

LineRoots count_roots_line(const ScalarField3& field, double eps1, double eps2, double lam_lo,
                           double lam_hi, int scans) {
    if (!(lam_hi > lam_lo)) throw std::invalid_argument("bad lambda interval");
    if (scans < 16) scans = 16;
    auto f = [&](double l) { return field(Vec3{l, eps1, eps2}); };
    const double range = lam_hi - lam_lo;
    const double h_fd = 1e-7 * range;
    auto fp = [&](double l) { return (f(l + h_fd) - f(l - h_fd)) / (2.0 * h_fd); };

    std::vector<double> xs(scans + 1), vs(scans + 1);
    double scale = 0.0;
    for (int i = 0; i <= scans; ++i) {
        xs[i] = lam_lo + range * i / scans;
        vs[i] = f(xs[i]);
        scale = std::max(scale, std::abs(vs[i]));
    }
    const double val_tol = 1e-8 * std::max(scale, 1e-300);
    const double slope_tol = 1e-4 * std::max(scale, 1e-300) / range;

    LineRoots out;
    auto push_root = [&](double r, bool tang) {
        for (size_t k = 0; k < out.roots.size(); ++k) {
            if (std::abs(out.roots[k] - r) < 2.0 * range / scans) {
                out.tangential[k] = out.tangential[k] || tang;
                return;
            }
        }
        out.roots.push_back(r);
        out.tangential.push_back(tang);
    };

    for (int i = 0; i < scans; ++i) {
        if (vs[i] == 0.0) {
            push_root(xs[i], std::abs(fp(xs[i])) < slope_tol);
            continue;
        }
        if (vs[i] * vs[i + 1] < 0.0) {
            double a = xs[i], b = xs[i + 1], va = vs[i];
            for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
                const double m = 0.5 * (a + b);
                const double vm = f(m);
                if (va * vm <= 0.0)
                    b = m;
                else {
                    a = m;
                    va = vm;
                }
            }
            const double r = 0.5 * (a + b);
            push_root(r, std::abs(fp(r)) < slope_tol);
        }
    }

    // tangential zeros: minima of |f| with no sign change; refine on f' = 0
    for (int i = 1; i < scans; ++i) {
        const double ai = std::abs(vs[i]);
        if (ai >= std::abs(vs[i - 1]) || ai >= std::abs(vs[i + 1])) continue;
        if (vs[i - 1] * vs[i + 1] < 0.0) continue;  // already a sign-change root
        const double da = fp(xs[i - 1]), db = fp(xs[i + 1]);
        if (da * db >= 0.0) continue;
        double a = xs[i - 1], b = xs[i + 1], va = da;
        for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
            const double m = 0.5 * (a + b);
            const double vm = fp(m);
            if (va * vm <= 0.0)
                b = m;
            else {
                a = m;
                va = vm;
            }
        }
        const double r = 0.5 * (a + b);
        if (std::abs(f(r)) < val_tol) push_root(r, true);
    }

    std::vector<size_t> order(out.roots.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return out.roots[a] < out.roots[b]; });
    LineRoots sorted;
    for (size_t i : order) {
        sorted.roots.push_back(out.roots[i]);
        sorted.tangential.push_back(out.tangential[i]);
    }
    sorted.count = static_cast<int>(sorted.roots.size());
    return sorted;
}

}  // namespace atlas
