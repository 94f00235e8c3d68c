#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "atlas/geom.hpp"

namespace atlas {

std::string reeb_event_name(ReebEventType t) {
    switch (t) {
        case ReebEventType::birth: return "birth";
        case ReebEventType::death: return "death";
        case ReebEventType::merge: return "merge";
        case ReebEventType::split: return "split";
        case ReebEventType::boundary_enter: return "boundary-enter";
        case ReebEventType::boundary_exit: return "boundary-exit";
    }
    return "birth";
}

int ReebGraph::count_events(ReebEventType t) const {
    int n = 0;
    for (const auto& node : nodes)
        if (node.type == t) ++n;
    return n;
}

const Polyline3* ReebGraph::track_slice(const ReebTrack& t, int which) const {
    if (t.samples.empty()) return nullptr;
    const auto& [k, c] =
        which < 0 ? t.samples.back() : t.samples[std::min<size_t>(which, t.samples.size() - 1)];
    if (k < 0 || k >= static_cast<int>(sample_slices.size())) return nullptr;
    if (c < 0 || c >= static_cast<int>(sample_slices[k].size())) return nullptr;
    return &sample_slices[k][c];
}

namespace {

// robust (90th percentile) lateral drift rate of level sets per unit eps;
// triangles near horizontal would give unbounded rates and are clamped
double drift_rate_p90(const SurfaceMesh& mesh, int axis, double cap) {
    std::vector<double> rates;
    rates.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        const Vec3 n = cross(mesh.vertices[t[1]] - mesh.vertices[t[0]],
                             mesh.vertices[t[2]] - mesh.vertices[t[0]]);
        const double len = norm(n);
        if (len == 0.0) continue;
        const double axial = std::abs(n[axis]);
        const double lateral = std::sqrt(std::max(len * len - axial * axial, 0.0));
        rates.push_back(lateral < 1e-12 * len ? cap : std::min(axial / lateral, cap));
    }
    if (rates.empty()) return 0.0;
    const size_t k = rates.size() * 9 / 10;
    std::nth_element(rates.begin(), rates.begin() + k, rates.end());
    return rates[k];
}

struct ActiveTrack {
    int track_id;
    int comp;  // component index at the current sample
};

struct Matcher {
    double slope;         // p90 drift rate
    double floor;         // resolution floor (2 median edges)
    double sqrt_scale;    // covers sqrt-type drift near saddles and caps
    double geom_cap;      // stay below inter-component separations

    double bound(double gap) const {
        const double b = std::max({3.0 * slope * gap, 2.5 * std::sqrt(gap * sqrt_scale), floor});
        return std::min(b, geom_cap);
    }
};

}  // namespace

ReebGraph build_reeb(const SurfaceMesh& mesh, int axis, std::vector<double> eps_samples,
                     const ReebOptions& opt_in) {
    ReebOptions opt = opt_in;
    opt.axis = axis;
    if (eps_samples.size() < 3) throw std::invalid_argument("need >= 3 eps samples");
    if (!std::is_sorted(eps_samples.begin(), eps_samples.end()))
        throw std::invalid_argument("eps samples must ascend");

    ReebGraph g;
    g.sample_eps = eps_samples;
    g.sample_slices.reserve(eps_samples.size());
    for (double e : eps_samples) g.sample_slices.push_back(slice_level(mesh, e, axis));

    const Box3 mesh_box = mesh.bounds();
    double lateral_diag = 0.0;
    for (int c = 0; c < 3; ++c) {
        if (c == axis) continue;
        const double e = mesh_box.hi[c] - mesh_box.lo[c];
        lateral_diag += e * e;
    }
    lateral_diag = std::sqrt(lateral_diag);
    const double range = eps_samples.back() - eps_samples.front();
    Matcher matcher{drift_rate_p90(mesh, axis, opt.slope_cap), 2.0 * mesh.median_edge_length(),
                    range, 0.25 * lateral_diag};
    const double refine_width = opt.refine_width_rel * range;

    auto slice_at = [&](double e) { return slice_level(mesh, e, axis); };

    int next_node = 0, next_track = 0;
    auto add_node = [&](ReebEventType t, double e, const Vec3& loc) {
        g.nodes.push_back({next_node, t, e, loc});
        return next_node++;
    };

    // bisection refinements; pred flips once inside (lo, hi)
    auto refine = [&](double lo, double hi, const std::function<bool(double)>& pred_true_low) {
        for (int it = 0; it < 40 && hi - lo > refine_width; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (pred_true_low(mid))
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<ActiveTrack> active;
    std::vector<ReebTrack> tracks;

    // open tracks for every component of the first sample
    for (int c = 0; c < static_cast<int>(g.sample_slices[0].size()); ++c) {
        const Vec3 loc = g.sample_slices[0][c].centroid();
        const int node = add_node(ReebEventType::boundary_enter, eps_samples[0], loc);
        ReebTrack t;
        t.id = next_track++;
        t.from_node = node;
        t.eps_lo = eps_samples[0];
        t.samples.push_back({0, c});
        tracks.push_back(t);
        active.push_back({t.id, c});
    }

    for (int k = 0; k + 1 < static_cast<int>(eps_samples.size()); ++k) {
        const auto& below = g.sample_slices[k];
        const auto& above = g.sample_slices[k + 1];
        const double e_lo = eps_samples[k], e_hi = eps_samples[k + 1];
        const double gap = e_hi - e_lo;
        const double bound = matcher.bound(gap);

        const int nb = static_cast<int>(below.size());
        const int na = static_cast<int>(above.size());
        std::vector<std::vector<double>> dist(nb, std::vector<double>(na, 0.0));
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < na; ++j) dist[i][j] = symmetric_hausdorff(below[i], above[j]);

        std::vector<int> match_of_below(nb, -1), match_of_above(na, -1);
        std::vector<bool> flag_below(nb, false);

        // mutual nearest neighbours within the drift bound; components that
        // stretch toward an upcoming event get an extent-relative allowance
        for (int i = 0; i < nb; ++i) {
            int best = -1;
            double second = std::numeric_limits<double>::infinity();
            double best_d = std::numeric_limits<double>::infinity();
            for (int j = 0; j < na; ++j) {
                const double gate =
                    std::max(bound, 0.3 * std::max(below[i].extent(), above[j].extent()));
                if (dist[i][j] >= gate) continue;
                if (dist[i][j] < best_d) {
                    second = best_d;
                    best_d = dist[i][j];
                    best = j;
                } else {
                    second = std::min(second, dist[i][j]);
                }
            }
            if (best < 0) continue;
            // is i also the best for j?
            bool mutual = true;
            for (int i2 = 0; i2 < nb; ++i2)
                if (dist[i2][best] < best_d) mutual = false;
            if (!mutual) continue;
            match_of_below[i] = best;
            match_of_above[best] = i;
            if (second / std::max(best_d, 1e-300) < opt.ambiguity_ratio) flag_below[i] = true;
        }

        // continuations
        std::vector<ActiveTrack> next_active;
        std::vector<bool> below_resolved(nb, false), above_resolved(na, false);
        for (const ActiveTrack& at : active) {
            const int j = match_of_below[at.comp];
            if (j < 0) continue;
            below_resolved[at.comp] = true;
            above_resolved[j] = true;
            ReebTrack& t = tracks[at.track_id];
            t.samples.push_back({k + 1, j});
            if (flag_below[at.comp]) t.flagged = true;
            next_active.push_back({at.track_id, j});
        }

        // merges: an unresolved component above fed by >= 2 unresolved below
        for (int j = 0; j < na; ++j) {
            if (above_resolved[j]) continue;
            std::vector<int> feeders;
            for (int i = 0; i < nb; ++i)
                if (!below_resolved[i] && directed_hausdorff(below[i], above[j]) < bound)
                    feeders.push_back(i);
            if (feeders.size() < 2) continue;
            // refined eps: component count near the merged curve drops to 1
            const Polyline3 merged = above[j];
            auto count_near = [&](double e) {
                int n = 0;
                for (const auto& c : slice_at(e))
                    if (min_distance(c, merged) < bound) ++n;
                return n;
            };
            const double e_ref = refine(e_lo, e_hi, [&](double e) { return count_near(e) >= 2; });
            const int node = add_node(ReebEventType::merge, e_ref, merged.centroid());
            for (int i : feeders) {
                below_resolved[i] = true;
                for (const ActiveTrack& at : active) {
                    if (at.comp != i) continue;
                    tracks[at.track_id].to_node = node;
                    tracks[at.track_id].eps_hi = e_ref;
                }
            }
            above_resolved[j] = true;
            ReebTrack t;
            t.id = next_track++;
            t.from_node = node;
            t.eps_lo = e_ref;
            t.samples.push_back({k + 1, j});
            tracks.push_back(t);
            next_active.push_back({t.id, j});
        }

        // splits: an unresolved component below feeding >= 2 unresolved above
        for (int i = 0; i < nb; ++i) {
            if (below_resolved[i]) continue;
            std::vector<int> children;
            for (int j = 0; j < na; ++j)
                if (!above_resolved[j] && directed_hausdorff(above[j], below[i]) < bound)
                    children.push_back(j);
            if (children.size() < 2) continue;
            const Polyline3 parent = below[i];
            auto count_near = [&](double e) {
                int n = 0;
                for (const auto& c : slice_at(e))
                    if (min_distance(c, parent) < bound) ++n;
                return n;
            };
            const double e_ref = refine(e_lo, e_hi, [&](double e) { return count_near(e) <= 1; });
            const int node = add_node(ReebEventType::split, e_ref, parent.centroid());
            below_resolved[i] = true;
            for (const ActiveTrack& at : active) {
                if (at.comp != i) continue;
                tracks[at.track_id].to_node = node;
                tracks[at.track_id].eps_hi = e_ref;
            }
            for (int j : children) {
                above_resolved[j] = true;
                ReebTrack t;
                t.id = next_track++;
                t.from_node = node;
                t.eps_lo = e_ref;
                t.samples.push_back({k + 1, j});
                tracks.push_back(t);
                next_active.push_back({t.id, j});
            }
        }

        // deaths
        for (const ActiveTrack& at : active) {
            if (below_resolved[at.comp]) continue;
            ReebTrack& t = tracks[at.track_id];
            const Polyline3 last = below[at.comp];
            const Vec3 c0 = last.centroid();
            const double reach = last.extent() + bound;
            auto alive = [&](double e) {
                for (const auto& c : slice_at(e))
                    if (norm(c.centroid() - c0) < reach) return true;
                return false;
            };
            const double e_ref = refine(e_lo, e_hi, alive);
            const int node = add_node(ReebEventType::death, e_ref, c0);
            t.to_node = node;
            t.eps_hi = e_ref;
            below_resolved[at.comp] = true;
        }

        // births
        for (int j = 0; j < na; ++j) {
            if (above_resolved[j]) continue;
            const Polyline3 first = above[j];
            const Vec3 c0 = first.centroid();
            const double reach = first.extent() + bound;
            auto alive = [&](double e) {
                for (const auto& c : slice_at(e))
                    if (norm(c.centroid() - c0) < reach) return true;
                return false;
            };
            // alive is false at e_lo and true at e_hi; flip the predicate for
            // the shared refine helper
            const double e_ref = refine(e_lo, e_hi, [&](double e) { return !alive(e); });
            const int node = add_node(ReebEventType::birth, e_ref, c0);
            ReebTrack t;
            t.id = next_track++;
            t.from_node = node;
            t.eps_lo = e_ref;
            t.samples.push_back({k + 1, j});
            tracks.push_back(t);
            next_active.push_back({t.id, j});
            above_resolved[j] = true;
        }

        active = std::move(next_active);
    }

    for (const ActiveTrack& at : active) {
        ReebTrack& t = tracks[at.track_id];
        const Polyline3* last = nullptr;
        if (!t.samples.empty()) {
            const auto& [k, c] = t.samples.back();
            last = &g.sample_slices[k][c];
        }
        t.to_node = add_node(ReebEventType::boundary_exit, eps_samples.back(),
                             last ? last->centroid() : Vec3{});
        t.eps_hi = eps_samples.back();
    }
    g.tracks = std::move(tracks);
    return g;
}

std::string topology_case_name(TopologyCase c) {
    switch (c) {
        case TopologyCase::case_i: return "I";
        case TopologyCase::case_ii: return "II";
        case TopologyCase::case_iii: return "III";
        case TopologyCase::case_iib: return "IIb";
        case TopologyCase::other: return "other";
    }
    return "other";
}

TopologyClass classify_topology(const ReebGraph& g, const std::vector<Polyline3>* codim2,
                                double share_tol) {
    const int merges = g.count_events(ReebEventType::merge);
    const int splits = g.count_events(ReebEventType::split);
    const int births = g.count_events(ReebEventType::birth);
    const int deaths = g.count_events(ReebEventType::death);
    const int interior = merges + splits + births + deaths;
    const int n_tracks = static_cast<int>(g.tracks.size());

    auto node_type = [&](int id) { return g.nodes[id].type; };

    if (n_tracks == 1 && interior == 0)
        return {TopologyCase::case_i, "single track, no interior events (cylinder)"};

    if (share_tol <= 0.0) {
        // default: 5% of the slice bounding-box diagonal
        Box3 box{{1e300, 1e300, 1e300}, {-1e300, -1e300, -1e300}};
        for (const auto& slices : g.sample_slices)
            for (const auto& line : slices)
                for (const Vec3& p : line.points)
                    for (int c = 0; c < 3; ++c) {
                        box.lo[c] = std::min(box.lo[c], p[c]);
                        box.hi[c] = std::max(box.hi[c], p[c]);
                    }
        share_tol = 0.05 * box.diagonal();
    }

    if ((merges + splits) == 1 && codim2 && !codim2->empty()) {
        // CaseIIb: the pants subgraph plus a disc-like track, both adjacent
        // to a shared codim-2 boundary curve
        int junction = -1;
        for (const auto& node : g.nodes)
            if (node.type == ReebEventType::merge || node.type == ReebEventType::split)
                junction = node.id;
        std::vector<int> pants_tracks, disc_tracks;
        for (const auto& t : g.tracks) {
            if (t.from_node == junction || t.to_node == junction) {
                pants_tracks.push_back(t.id);
            } else if ((t.to_node >= 0 && node_type(t.to_node) == ReebEventType::death) ||
                       (t.from_node >= 0 && node_type(t.from_node) == ReebEventType::birth)) {
                disc_tracks.push_back(t.id);
            }
        }
        auto track_near_curve = [&](int track_id, const Polyline3& curve) {
            const ReebTrack& t = g.tracks[track_id];
            for (const auto& [k, c] : t.samples)
                if (min_distance(curve, g.sample_slices[k][c]) < share_tol) return true;
            return false;
        };
        for (const Polyline3& curve : *codim2) {
            bool near_pants = false, near_disc = false;
            int disc_hit = -1;
            for (int id : pants_tracks)
                if (track_near_curve(id, curve)) near_pants = true;
            for (int id : disc_tracks)
                if (track_near_curve(id, curve)) {
                    near_disc = true;
                    disc_hit = id;
                }
            if (near_pants && near_disc)
                return {TopologyCase::case_iib,
                        "pants junction and disc track " + std::to_string(disc_hit) +
                            " share a codim-2 boundary curve (duck-foot)"};
        }
    }

    if ((merges + splits) == 1) {
        return {TopologyCase::case_ii,
                merges == 1 ? "one merge joining two tracks (pair of pants)"
                            : "one split dividing a track (pair of pants, mirrored)"};
    }

    if (merges == 0 && splits == 0 && n_tracks >= 2) {
        bool all_die = true, all_born = true;
        for (const auto& t : g.tracks) {
            if (!(t.to_node >= 0 && node_type(t.to_node) == ReebEventType::death))
                all_die = false;
            if (!(t.from_node >= 0 && node_type(t.from_node) == ReebEventType::birth))
                all_born = false;
        }
        if (all_die || all_born)
            return {TopologyCase::case_iii,
                    std::to_string(n_tracks) + " independent tracks ending in " +
                        (all_die ? "deaths" : "births") + " (discs)"};
    }

    return {TopologyCase::other,
            "tracks=" + std::to_string(n_tracks) + " merges=" + std::to_string(merges) +
                " splits=" + std::to_string(splits) + " births=" + std::to_string(births) +
                " deaths=" + std::to_string(deaths)};
}

}  // namespace atlas
