#include "atlas/io.hpp"

#include <unistd.h>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace atlas::io {

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp =
        path.parent_path() / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            std::filesystem::remove(tmp);
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// OBJ

std::string mesh_to_obj(const SurfaceMesh& mesh) {
    std::string out;
    out.reserve(mesh.vertices.size() * 40);
    for (const Vec3& v : mesh.vertices)
        out += "v " + fmt17(v.x) + " " + fmt17(v.y) + " " + fmt17(v.z) + "\n";
    for (const auto& t : mesh.triangles)
        out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " +
               std::to_string(t[2] + 1) + "\n";
    if (!mesh.sharp_folds.empty()) {
        out += "g sharp-fold\n";
        // sharp folds are emitted with dedicated vertices appended after the
        // surface vertices
        int next = static_cast<int>(mesh.vertices.size()) + 1;
        std::string lines;
        for (const Polyline3& fold : mesh.sharp_folds) {
            lines += "l";
            for (const Vec3& p : fold.points) {
                out += "v " + fmt17(p.x) + " " + fmt17(p.y) + " " + fmt17(p.z) + "\n";
                lines += " " + std::to_string(next++);
            }
            lines += "\n";
        }
        out += lines;
    }
    return out;
}

SurfaceMesh mesh_from_obj(const std::string& text) {
    SurfaceMesh mesh;
    std::vector<Vec3> all_vertices;
    std::vector<std::vector<int>> l_lines;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool in_sharp_fold = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z))
                throw std::runtime_error("OBJ line " + std::to_string(lineno) + ": bad vertex");
            all_vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> f{};
            if (!(ls >> f[0] >> f[1] >> f[2]))
                throw std::runtime_error("OBJ line " + std::to_string(lineno) +
                                         ": faces must be plain triangles");
            int extra;
            if (ls >> extra)
                throw std::runtime_error("OBJ line " + std::to_string(lineno) +
                                         ": faces must be triangles");
            for (int& idx : f) {
                if (idx < 1 || idx > static_cast<int>(all_vertices.size()))
                    throw std::runtime_error("OBJ line " + std::to_string(lineno) +
                                             ": face index out of range");
                --idx;
            }
            mesh.triangles.push_back(f);
        } else if (tag == "g") {
            std::string name;
            ls >> name;
            in_sharp_fold = name == "sharp-fold";
        } else if (tag == "l") {
            if (!in_sharp_fold)
                throw std::runtime_error("OBJ line " + std::to_string(lineno) +
                                         ": l outside g sharp-fold");
            std::vector<int> ids;
            int idx;
            while (ls >> idx) {
                if (idx < 1)
                    throw std::runtime_error("OBJ line " + std::to_string(lineno) +
                                             ": bad l index");
                ids.push_back(idx - 1);
            }
            if (ids.size() < 2)
                throw std::runtime_error("OBJ line " + std::to_string(lineno) +
                                         ": l needs >= 2 indices");
            l_lines.push_back(std::move(ids));
        } else {
            throw std::runtime_error("OBJ line " + std::to_string(lineno) + ": unsupported tag '" +
                                     tag + "'");
        }
    }
    mesh.vertices = all_vertices;
    for (const auto& ids : l_lines) {
        Polyline3 fold;
        fold.role = PolylineRole::codim2_curve;
        for (int idx : ids) {
            if (idx >= static_cast<int>(all_vertices.size()))
                throw std::runtime_error("OBJ: l index out of range");
            fold.points.push_back(all_vertices[idx]);
        }
        mesh.sharp_folds.push_back(std::move(fold));
    }
    return mesh;
}

void write_mesh(const std::filesystem::path& path, const SurfaceMesh& mesh) {
    write_atomic(path, mesh_to_obj(mesh));
}

SurfaceMesh read_mesh(const std::filesystem::path& path) { return mesh_from_obj(read_file(path)); }

// ---------------------------------------------------------------------------
// polyline CSV

std::string polylines_to_csv(const std::vector<Polyline3>& lines) {
    std::string out = "curve_id,seq,x,y,z\n";
    for (size_t id = 0; id < lines.size(); ++id) {
        const Polyline3& line = lines[id];
        out += "# curve " + std::to_string(id) + " closed=" + (line.closed ? "true" : "false") +
               " role=" + role_token(line.role) + "\n";
        for (size_t i = 0; i < line.points.size(); ++i) {
            const Vec3& p = line.points[i];
            out += std::to_string(id) + "," + std::to_string(i) + "," + fmt17(p.x) + "," +
                   fmt17(p.y) + "," + fmt17(p.z) + "\n";
        }
    }
    return out;
}

std::vector<Polyline3> polylines_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<int, Polyline3> curves;
    std::map<int, std::vector<std::pair<int, Vec3>>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line);
            std::string hash, word;
            ls >> hash >> word;
            if (word != "curve") continue;  // other comments are free-form
            int id;
            ls >> id;
            Polyline3& c = curves[id];
            std::string kv;
            while (ls >> kv) {
                if (kv.rfind("closed=", 0) == 0) c.closed = kv.substr(7) == "true";
                if (kv.rfind("role=", 0) == 0) c.role = parse_role(kv.substr(5));
            }
            continue;
        }
        if (line.rfind("curve_id", 0) == 0) continue;  // header
        std::istringstream ls(line);
        int id, seq;
        char comma;
        Vec3 p;
        if (!(ls >> id >> comma >> seq >> comma >> p.x >> comma >> p.y >> comma >> p.z))
            throw std::runtime_error("bad polyline CSV row: " + line);
        rows[id].push_back({seq, p});
    }
    std::vector<Polyline3> out;
    for (auto& [id, pts] : rows) {
        std::sort(pts.begin(), pts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Polyline3 c = curves.count(id) ? curves[id] : Polyline3{};
        c.points.clear();
        for (const auto& [seq, p] : pts) c.points.push_back(p);
        out.push_back(std::move(c));
    }
    return out;
}

void write_polylines(const std::filesystem::path& path, const std::vector<Polyline3>& lines) {
    write_atomic(path, polylines_to_csv(lines));
}

std::vector<Polyline3> read_polylines(const std::filesystem::path& path) {
    return polylines_from_csv(read_file(path));
}

// ---------------------------------------------------------------------------
// trajectory CSV

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "t,x,y,z\n";
    for (size_t i = 0; i < traj.t.size(); ++i) {
        out += fmt17(traj.t[i]) + "," + fmt17(traj.y[i].x) + "," + fmt17(traj.y[i].y) + "," +
               fmt17(traj.y[i].z) + "\n";
    }
    return out;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    write_atomic(path, trajectory_to_csv(traj));
}

std::string continuation_to_csv(const ContinuationCurve& curve) {
    Polyline3 line;
    line.role = PolylineRole::codim2_curve;
    line.closed = curve.termination == ContinuationStop::closed_loop;
    for (const auto& u : curve.points) {
        Vec3 p;
        for (size_t c = 0; c < 3 && c < u.size(); ++c) p[static_cast<int>(c)] = u[c];
        if (line.points.empty() || norm(p - line.points.back()) > 0.0) line.points.push_back(p);
    }
    std::string out = polylines_to_csv({line});
    const char* reason = "max-points";
    switch (curve.termination) {
        case ContinuationStop::closed_loop: reason = "closed-loop"; break;
        case ContinuationStop::boundary: reason = "boundary"; break;
        case ContinuationStop::step_underflow: reason = "step-underflow"; break;
        case ContinuationStop::max_points: reason = "max-points"; break;
        case ContinuationStop::singular_point: reason = "singular-point"; break;
    }
    out += std::string("# termination ") + reason + "\n";
    if (curve.singular_location) {
        out += "# singular-point at";
        for (double v : *curve.singular_location) out += " " + fmt17(v);
        if (!curve.note.empty()) out += " (" + curve.note + ")";
        out += "\n";
    }
    return out;
}

void write_continuation(const std::filesystem::path& path, const ContinuationCurve& curve) {
    write_atomic(path, continuation_to_csv(curve));
}

// ---------------------------------------------------------------------------
// spike grid CSV

std::string grid_to_csv(const SpikeGrid& grid) {
    std::string out;
    out += "# model " + model_name(grid.slice.base) + "\n";
    out += "# axis1 " + grid.slice.axis1.name + " " + fmt17(grid.slice.axis1.lo) + " " +
           fmt17(grid.slice.axis1.hi) + "\n";
    out += "# axis2 " + grid.slice.axis2.name + " " + fmt17(grid.slice.axis2.lo) + " " +
           fmt17(grid.slice.axis2.hi) + "\n";
    out += "# dims " + std::to_string(grid.nx) + " " + std::to_string(grid.ny) + "\n";
    out += "# fixed";
    for (const std::string& name : param_names(grid.slice.base))
        out += " " + name + "=" + fmt17(get_param(grid.slice.base, name));
    out += "\n";
    out += "p1,p2,class,spikes,period\n";
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const SpikeCountResult& c = grid.at(i, j);
            out += fmt17(grid.coord1(i)) + "," + fmt17(grid.coord2(j)) + "," +
                   sc_class_token(c.cls) + "," + std::to_string(c.spikes) + "," +
                   fmt17(c.period) + "\n";
        }
    }
    return out;
}

SpikeGrid grid_from_csv(const std::string& text) {
    SpikeGrid grid;
    std::istringstream in(text);
    std::string line;
    bool have_model = false;
    std::vector<SpikeCountResult> cells;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line);
            std::string hash, key;
            ls >> hash >> key;
            if (key == "model") {
                std::string name;
                ls >> name;
                grid.slice.base = default_params(parse_model_id(name));
                have_model = true;
            } else if (key == "axis1" || key == "axis2") {
                AxisSpec ax;
                ls >> ax.name >> ax.lo >> ax.hi;
                (key == "axis1" ? grid.slice.axis1 : grid.slice.axis2) = ax;
            } else if (key == "dims") {
                ls >> grid.nx >> grid.ny;
            } else if (key == "fixed") {
                if (!have_model) throw std::runtime_error("grid CSV: fixed before model");
                std::string kv;
                while (ls >> kv) {
                    const auto pos = kv.find('=');
                    if (pos == std::string::npos)
                        throw std::runtime_error("grid CSV: bad fixed entry " + kv);
                    set_param(grid.slice.base, kv.substr(0, pos), std::stod(kv.substr(pos + 1)));
                }
            }
            continue;
        }
        if (line.rfind("p1,", 0) == 0) continue;
        // p1,p2,class,spikes,period -- class token may contain '/'
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        fields.push_back(cur);
        if (fields.size() != 5) throw std::runtime_error("grid CSV: bad row " + line);
        SpikeCountResult r;
        r.cls = parse_sc_class(fields[2]);
        r.spikes = std::stoi(fields[3]);
        r.period = std::stod(fields[4]);
        cells.push_back(r);
    }
    if (grid.nx < 2 || grid.ny < 2) throw std::runtime_error("grid CSV: missing dims");
    if (static_cast<int>(cells.size()) != grid.nx * grid.ny)
        throw std::runtime_error("grid CSV: cell count does not match dims");
    grid.cells = std::move(cells);
    return grid;
}

void write_grid(const std::filesystem::path& path, const SpikeGrid& grid) {
    write_atomic(path, grid_to_csv(grid));
}

SpikeGrid read_grid(const std::filesystem::path& path) { return grid_from_csv(read_file(path)); }

// ---------------------------------------------------------------------------
// color maps

namespace {

struct Rgb {
    unsigned char r, g, b;
};

// blue (0 spikes) through green/yellow to brown (high counts)
Rgb spike_color(const SpikeCountResult& c) {
    if (c.cls == SCClass::blow_up) return {235, 235, 235};
    if (c.cls == SCClass::chaotic_unresolved) return {72, 36, 8};  // darkest brown
    const int k = c.cls == SCClass::periodic ? std::min(c.spikes, 12) : 0;
    static constexpr Rgb stops[] = {
        {28, 52, 214},   // 0: blue
        {24, 118, 222},  // 1
        {16, 170, 214},  // 2
        {24, 196, 160},  // 3
        {62, 206, 96},   // 4
        {126, 210, 48},  // 5
        {186, 206, 32},  // 6
        {224, 186, 26},  // 7
        {232, 152, 22},  // 8
        {224, 114, 20},  // 9
        {200, 82, 20},   // 10
        {168, 58, 18},   // 11
        {134, 44, 14},   // 12: brown
    };
    return stops[k];
}

}  // namespace

std::string grid_to_ppm(const SpikeGrid& grid) {
    std::string out = "P6\n" + std::to_string(grid.nx) + " " + std::to_string(grid.ny) + "\n255\n";
    out.reserve(out.size() + static_cast<size_t>(grid.nx) * grid.ny * 3);
    for (int j = grid.ny - 1; j >= 0; --j) {  // top row = largest p2
        for (int i = 0; i < grid.nx; ++i) {
            const Rgb c = spike_color(grid.at(i, j));
            out.push_back(static_cast<char>(c.r));
            out.push_back(static_cast<char>(c.g));
            out.push_back(static_cast<char>(c.b));
        }
    }
    return out;
}

int ppm_distinct_colors(const std::string& ppm) {
    const size_t header_end = ppm.find("255\n");
    if (header_end == std::string::npos) throw std::runtime_error("not a P6 ppm");
    std::set<std::array<unsigned char, 3>> colors;
    for (size_t i = header_end + 4; i + 2 < ppm.size(); i += 3)
        colors.insert({static_cast<unsigned char>(ppm[i]), static_cast<unsigned char>(ppm[i + 1]),
                       static_cast<unsigned char>(ppm[i + 2])});
    return static_cast<int>(colors.size());
}

std::string grid_to_svg(const SpikeGrid& grid) {
    const int cell = 6;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(grid.nx * cell) + "\" height=\"" +
                      std::to_string(grid.ny * cell) + "\">\n";
    char buf[160];
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const Rgb c = spike_color(grid.at(i, j));
            std::snprintf(buf, sizeof(buf),
                          "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"#%02x%02x%02x\"/>\n",
                          i * cell, (grid.ny - 1 - j) * cell, cell, cell, c.r, c.g, c.b);
            out += buf;
        }
    }
    out += "</svg>\n";
    return out;
}

void write_grid_ppm(const std::filesystem::path& path, const SpikeGrid& grid) {
    write_atomic(path, grid_to_ppm(grid));
}

void write_grid_svg(const std::filesystem::path& path, const SpikeGrid& grid) {
    write_atomic(path, grid_to_svg(grid));
}

// ---------------------------------------------------------------------------
// JSON reports

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

std::string morse_kind_name(MorseKind k) {
    switch (k) {
        case MorseKind::minimum: return "min";
        case MorseKind::maximum: return "max";
        case MorseKind::saddle: return "saddle";
    }
    return "min";
}

}  // namespace

nlohmann::json morse_report_json(const MorseReport& report) {
    nlohmann::json j;
    j["critical_points"] = nlohmann::json::array();
    for (const CriticalPoint& cp : report.points) {
        j["critical_points"].push_back({{"location", vec_json(cp.location)},
                                        {"vertex_id", cp.vertex_id},
                                        {"kind", morse_kind_name(cp.kind)},
                                        {"class", cp.geometric_class()},
                                        {"fit_residual", cp.fit_residual}});
    }
    j["multisaddles"] = nlohmann::json::array();
    for (const MultiSaddle& ms : report.multisaddles) {
        j["multisaddles"].push_back({{"vertex_id", ms.vertex_id},
                                     {"sign_changes", ms.sign_changes},
                                     {"location", vec_json(ms.location)}});
    }
    j["interior_vertices"] = report.interior_vertices;
    return j;
}

nlohmann::json folds_json(const std::vector<FoldPoint>& folds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const FoldPoint& f : folds) {
        const char* vis = f.visibility == FoldVisibility::visible      ? "visible"
                          : f.visibility == FoldVisibility::invisible ? "invisible"
                                                                      : "unclassified";
        arr.push_back({{"location", vec_json(f.location)},
                       {"eps", f.eps_value},
                       {"kind", f.kind == MorseKind::maximum ? "max" : "min"},
                       {"visibility", vis},
                       {"quad_coeff", f.quad_coeff},
                       {"fit_residual", f.fit_residual},
                       {"low_confidence", f.low_confidence}});
    }
    return nlohmann::json{{"folds", arr}};
}

nlohmann::json cusps_json(const FoldSet& set) {
    nlohmann::json j;
    j["fold_curves"] = nlohmann::json::array();
    for (const Polyline3& line : set.folds) {
        nlohmann::json pts = nlohmann::json::array();
        for (const Vec3& p : line.points) pts.push_back(vec_json(p));
        j["fold_curves"].push_back({{"closed", line.closed}, {"points", pts}});
    }
    j["cusps"] = nlohmann::json::array();
    for (const CuspPoint& c : set.cusps) {
        j["cusps"].push_back({{"location", vec_json(c.location)},
                              {"tangency_residual", c.tangency_residual},
                              {"branch_a", c.branch_a},
                              {"branch_b", c.branch_b}});
    }
    j["dropped_candidates"] = set.dropped_candidates;
    return j;
}

nlohmann::json reeb_json(const ReebGraph& graph) {
    nlohmann::json j;
    j["samples"] = graph.sample_eps;
    j["nodes"] = nlohmann::json::array();
    for (const ReebNode& n : graph.nodes)
        j["nodes"].push_back({{"id", n.id},
                              {"type", reeb_event_name(n.type)},
                              {"eps", n.eps},
                              {"location", vec_json(n.location)}});
    j["tracks"] = nlohmann::json::array();
    for (const ReebTrack& t : graph.tracks) {
        nlohmann::json samples = nlohmann::json::array();
        for (const auto& [k, c] : t.samples) samples.push_back({k, c});
        j["tracks"].push_back({{"id", t.id},
                               {"from_node", t.from_node},
                               {"to_node", t.to_node},
                               {"eps_lo", t.eps_lo},
                               {"eps_hi", t.eps_hi},
                               {"slice_ids", samples},
                               {"flagged", t.flagged}});
    }
    return j;
}

nlohmann::json topology_json(const TopologyClass& cls) {
    return {{"case", topology_case_name(cls.c)}, {"description", cls.description}};
}

}  // namespace atlas::io
