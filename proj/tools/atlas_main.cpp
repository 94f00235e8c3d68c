// atlas: parameter-space exploration of slow-fast neuron models and
// geometric-bifurcation analysis of surfaces and curves.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "atlas/gallery.hpp"
#include "atlas/geom.hpp"
#include "atlas/io.hpp"
#include "atlas/localbif.hpp"
#include "atlas/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;   // bad flags, bad config, missing or malformed inputs
constexpr int kExitIo = 3;      // filesystem write failures
constexpr int kExitNumeric = 4; // internal numeric failure

struct SharedOptions {
    // [integrator]
    double rtol = 1e-8, atol = 1e-10, max_step = 1.0;
    // [sc]
    double t_transient = 1000.0, t_observe = 2000.0, x_threshold = 0.0, return_tol = 1e-5;
    int max_spikes = 64;
    std::string policy = "fixed";
    std::vector<double> initial_state = {-1.6, 4.0, 0.0};
    // [analysis]
    int axis = 2;
    int samples = 33;
    double delta_vis = 0.0;  // 0 = mesh-relative default
    int workers = 1;

    atlas::SCConfig sc_config() const {
        atlas::SCConfig cfg;
        cfg.t_transient = t_transient;
        cfg.t_observe = t_observe;
        cfg.x_threshold = x_threshold;
        cfg.return_tol = return_tol;
        cfg.max_spikes = max_spikes;
        if (policy == "fixed")
            cfg.policy = atlas::InitialStatePolicy::fixed;
        else if (policy == "previous-cell")
            cfg.policy = atlas::InitialStatePolicy::previous_cell;
        else
            throw CLI::ValidationError("--sc.policy", "expected fixed or previous-cell");
        if (initial_state.size() != 3)
            throw CLI::ValidationError("--sc.initial", "expected three components");
        cfg.initial_state = {initial_state[0], initial_state[1], initial_state[2]};
        cfg.integ.rtol = rtol;
        cfg.integ.atol = atol;
        cfg.integ.max_step = max_step;
        return cfg;
    }
};

atlas::AxisSpec parse_axis_spec(const std::string& text, const char* flag) {
    std::istringstream ss(text);
    atlas::AxisSpec ax;
    char c1;
    if (!(std::getline(ss, ax.name, ',') && (ss >> ax.lo >> c1 >> ax.hi)) || c1 != ',' ||
        ax.name.empty())
        throw CLI::ValidationError(flag, "expected name,lo,hi");
    return ax;
}

atlas::ModelParams build_model(const std::string& name,
                               const std::vector<std::string>& assignments) {
    atlas::ModelParams params = atlas::default_params(atlas::parse_model_id(name));
    for (const std::string& kv : assignments) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos)
            throw CLI::ValidationError("--set", "expected name=value, got '" + kv + "'");
        atlas::set_param(params, kv.substr(0, pos), std::stod(kv.substr(pos + 1)));
    }
    return params;
}

void require_input(const fs::path& p, const char* what) {
    if (!fs::exists(p))
        throw CLI::ValidationError(what, "file does not exist: " + p.string());
}

std::vector<double> sample_range(const atlas::SurfaceMesh& mesh, int axis, int n) {
    // stay clear of the ragged layer where the surface meets the sampling box
    const atlas::Box3 b = mesh.bounds();
    const double range = b.hi[axis] - b.lo[axis];
    const double margin = std::min(std::max(2.5 * mesh.median_edge_length(), 1e-3 * range),
                                   0.2 * range);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = b.lo[axis] + margin + (range - 2 * margin) * i / (n - 1);
    return out;
}

void write_json(const fs::path& path, const json& j) {
    atlas::io::write_atomic(path, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bifurcation-geometry atlas for slow-fast neuron models"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML-style config file; sections [sweep], [integrator], "
                                   "[sc], [analysis]; command-line flags override");

    SharedOptions shared;
    app.add_option("--integrator.rtol", shared.rtol, "relative tolerance");
    app.add_option("--integrator.atol", shared.atol, "absolute tolerance");
    app.add_option("--integrator.max-step", shared.max_step, "largest step size");
    app.add_option("--sc.ttr", shared.t_transient, "discarded transient time");
    app.add_option("--sc.tobs", shared.t_observe, "observation window");
    app.add_option("--sc.threshold", shared.x_threshold, "spike threshold on the fast variable");
    app.add_option("--sc.return-tol", shared.return_tol, "Poincare near-return tolerance");
    app.add_option("--sc.max-spikes", shared.max_spikes, "spikes-per-period cap");
    app.add_option("--sc.policy", shared.policy, "fixed | previous-cell");
    app.add_option("--sc.initial", shared.initial_state, "initial state (three values)")
        ->expected(3);
    app.add_option("--analysis.axis", shared.axis, "height axis (0, 1 or 2)");
    app.add_option("--analysis.samples", shared.samples, "Reeb sample count");
    app.add_option("--analysis.delta-vis", shared.delta_vis,
                   "fold visibility threshold (0 = 3x median edge)");
    app.add_option("--workers", shared.workers, "sweep worker count");

    // ----- sweep ------------------------------------------------------------
    auto* cmd_sweep = app.add_subcommand("sweep", "spike-counting sweep over a parameter plane");
    std::string sw_model = "hr", sw_axis1, sw_axis2, sw_out;
    std::vector<std::string> sw_set;
    std::vector<int> sw_dims = {101, 101};
    cmd_sweep->add_option("--model", sw_model, "hr | fhn");
    cmd_sweep->add_option("--axis1", sw_axis1, "swept axis, name,lo,hi")->required();
    cmd_sweep->add_option("--axis2", sw_axis2, "swept axis, name,lo,hi")->required();
    cmd_sweep->add_option("--dims", sw_dims, "grid cells per axis")->expected(2);
    cmd_sweep->add_option("--set", sw_set, "fixed parameter, name=value");
    cmd_sweep->add_option("--out", sw_out, "output directory")->required();

    // ----- boundary ---------------------------------------------------------
    auto* cmd_boundary =
        app.add_subcommand("boundary", "spike-count boundary polylines from a grid CSV");
    std::string bd_grid, bd_out;
    int bd_band = -1;
    cmd_boundary->add_option("--grid", bd_grid, "grid CSV from `atlas sweep`")->required();
    cmd_boundary->add_option("--band", bd_band,
                             "boundary between band and band+1 spikes (-1 = all bands)");
    cmd_boundary->add_option("--out", bd_out, "polyline CSV output")->required();

    // ----- slice ------------------------------------------------------------
    auto* cmd_slice = app.add_subcommand("slice", "level-set slice of a surface mesh");
    std::string sl_mesh, sl_out;
    double sl_eps = 0.0;
    cmd_slice->add_option("--mesh", sl_mesh, "OBJ surface mesh")->required();
    cmd_slice->add_option("--eps", sl_eps, "slice height")->required();
    cmd_slice->add_option("--out", sl_out, "polyline CSV output")->required();

    // ----- morse ------------------------------------------------------------
    auto* cmd_morse = app.add_subcommand("morse", "PL Morse critical points of a mesh");
    std::string mo_mesh, mo_out;
    cmd_morse->add_option("--mesh", mo_mesh, "OBJ surface mesh")->required();
    cmd_morse->add_option("--out", mo_out, "JSON report output")->required();

    // ----- reeb -------------------------------------------------------------
    auto* cmd_reeb = app.add_subcommand("reeb", "Reeb graph and topology class of a mesh");
    std::string rb_mesh, rb_out, rb_codim2;
    std::vector<double> rb_eps_list;
    cmd_reeb->add_option("--mesh", rb_mesh, "OBJ surface mesh")->required();
    cmd_reeb->add_option("--eps-list", rb_eps_list, "explicit ascending sample heights");
    cmd_reeb->add_option("--codim2", rb_codim2, "codim-2 curves CSV for duck-foot detection");
    cmd_reeb->add_option("--out", rb_out, "JSON report output")->required();

    // ----- folds ------------------------------------------------------------
    auto* cmd_folds = app.add_subcommand("folds", "eps extrema of codim-2 curves");
    std::string fd_curve, fd_mesh, fd_out;
    cmd_folds->add_option("--curves", fd_curve, "polyline CSV input")->required();
    cmd_folds->add_option("--mesh", fd_mesh, "OBJ mesh with sharp folds (for visibility)");
    cmd_folds->add_option("--out", fd_out, "JSON report output")->required();

    // ----- cusp -------------------------------------------------------------
    auto* cmd_cusp = app.add_subcommand("cusp", "fold curves and cusp points of a scalar field");
    std::string cu_field = "cusp", cu_out, cu_folds_out;
    std::vector<double> cu_box;
    int cu_res = 32;
    cmd_cusp->add_option("--field", cu_field, "gallery field kind (default cusp)");
    cmd_cusp->add_option("--box", cu_box, "x0 x1 y0 y1 z0 z1")->expected(6);
    cmd_cusp->add_option("--res", cu_res, "grid resolution per axis");
    cmd_cusp->add_option("--out", cu_out, "JSON report output")->required();
    cmd_cusp->add_option("--folds-out", cu_folds_out, "optional fold polyline CSV");

    // ----- gallery ----------------------------------------------------------
    auto* cmd_gallery = app.add_subcommand("gallery", "built-in surfaces and synthetic curves");
    std::string ga_kind = "isola-plus", ga_out, ga_codim2_kind, ga_codim2_out;
    int ga_res = 32;
    double ga_tube_width = 1e-4, ga_eps_center = 0.0;
    cmd_gallery->add_option("--kind", ga_kind, "surface kind");
    cmd_gallery->add_option("--res", ga_res, "mesh resolution per axis");
    cmd_gallery->add_option("--tube-width", ga_tube_width, "thin-tube width d");
    cmd_gallery->add_option("--out", ga_out, "OBJ mesh output");
    cmd_gallery->add_option("--codim2-kind", ga_codim2_kind,
                            "single-max | single-min | monotone | two-extrema | on-sharp-fold | "
                            "mid-leaf | shared (pants boundary)");
    cmd_gallery->add_option("--codim2-eps", ga_eps_center, "constructed extremum height");
    cmd_gallery->add_option("--codim2-out", ga_codim2_out, "codim-2 curve CSV output");

    // ----- models -----------------------------------------------------------
    auto* cmd_models = app.add_subcommand("models", "list models; equilibria and trajectories");
    std::string md_model, md_traj_out;
    std::vector<std::string> md_set;
    bool md_equilibria = false;
    double md_time = 0.0;
    std::vector<double> md_initial = {0.0, 0.0, 0.0};
    cmd_models->add_option("--model", md_model, "hr | fhn");
    cmd_models->add_option("--set", md_set, "parameter, name=value");
    cmd_models->add_flag("--equilibria", md_equilibria, "print equilibria and eigenvalues");
    cmd_models->add_option("--integrate", md_time, "integrate for this time span");
    cmd_models->add_option("--initial", md_initial, "initial state for --integrate")->expected(3);
    cmd_models->add_option("--traj-csv", md_traj_out, "trajectory CSV output for --integrate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (const char* env = std::getenv("ATLAS_WORKERS")) {
        try {
            shared.workers = std::max(1, std::stoi(env));
        } catch (...) {
            std::cerr << "atlas: bad ATLAS_WORKERS value '" << env << "'\n";
            return kExitUsage;
        }
    }

    try {
        if (*cmd_sweep) {
            atlas::SliceSpec slice;
            slice.base = build_model(sw_model, sw_set);
            slice.axis1 = parse_axis_spec(sw_axis1, "--axis1");
            slice.axis2 = parse_axis_spec(sw_axis2, "--axis2");
            const atlas::SCConfig cfg = shared.sc_config();
            const fs::path dir(sw_out);
            fs::create_directories(dir);
            const atlas::SpikeGrid grid =
                atlas::sc_sweep(slice, sw_dims[0], sw_dims[1], cfg, shared.workers);
            atlas::io::write_grid(dir / "grid.csv", grid);
            atlas::io::write_grid_ppm(dir / "grid.ppm", grid);
            atlas::io::write_grid_svg(dir / "grid.svg", grid);
            std::cout << "wrote " << (dir / "grid.csv").string() << " (+ppm, +svg)\n";
        } else if (*cmd_boundary) {
            require_input(bd_grid, "--grid");
            const atlas::SpikeGrid grid = atlas::io::read_grid(bd_grid);
            std::vector<atlas::Polyline3> lines;
            int max_band = 0;
            for (const auto& c : grid.cells)
                if (c.cls == atlas::SCClass::periodic) max_band = std::max(max_band, c.spikes);
            const int lo = bd_band < 0 ? 0 : bd_band;
            const int hi = bd_band < 0 ? std::max(max_band - 1, 0) : bd_band;
            for (int n = lo; n <= hi; ++n)
                for (auto& line : atlas::find_sc_boundary(grid, n))
                    lines.push_back(std::move(line));
            atlas::io::write_polylines(bd_out, lines);
            std::cout << "wrote " << lines.size() << " boundary polylines to " << bd_out << "\n";
        } else if (*cmd_slice) {
            require_input(sl_mesh, "--mesh");
            const atlas::SurfaceMesh mesh = atlas::io::read_mesh(sl_mesh);
            const auto slices = atlas::slice_level(mesh, sl_eps, shared.axis);
            atlas::io::write_polylines(sl_out, slices);
            std::cout << "wrote " << slices.size() << " slice polylines to " << sl_out << "\n";
        } else if (*cmd_morse) {
            require_input(mo_mesh, "--mesh");
            const atlas::SurfaceMesh mesh = atlas::io::read_mesh(mo_mesh);
            const atlas::MorseReport rep = atlas::pl_critical_points(mesh, shared.axis);
            write_json(mo_out, atlas::io::morse_report_json(rep));
            std::cout << "wrote " << rep.points.size() << " critical points to " << mo_out << "\n";
        } else if (*cmd_reeb) {
            require_input(rb_mesh, "--mesh");
            const atlas::SurfaceMesh mesh = atlas::io::read_mesh(rb_mesh);
            std::vector<double> samples = rb_eps_list;
            if (samples.empty()) samples = sample_range(mesh, shared.axis, shared.samples);
            const atlas::ReebGraph graph = atlas::build_reeb(mesh, shared.axis, samples);
            json rep;
            rep["reeb"] = atlas::io::reeb_json(graph);
            if (!rb_codim2.empty()) {
                require_input(rb_codim2, "--codim2");
                const auto curves = atlas::io::read_polylines(rb_codim2);
                rep["topology"] =
                    atlas::io::topology_json(atlas::classify_topology(graph, &curves));
            } else {
                rep["topology"] = atlas::io::topology_json(atlas::classify_topology(graph));
            }
            write_json(rb_out, rep);
            std::cout << "wrote Reeb graph (" << graph.tracks.size() << " tracks) to " << rb_out
                      << "\n";
        } else if (*cmd_folds) {
            require_input(fd_curve, "--curves");
            const auto curves = atlas::io::read_polylines(fd_curve);
            atlas::SurfaceMesh mesh;
            bool have_mesh = false;
            if (!fd_mesh.empty()) {
                require_input(fd_mesh, "--mesh");
                mesh = atlas::io::read_mesh(fd_mesh);
                have_mesh = true;
            }
            std::vector<atlas::FoldPoint> all;
            for (const auto& curve : curves) {
                auto folds = atlas::curve_folds(curve, shared.axis);
                for (auto& f : folds) {
                    if (have_mesh)
                        f.visibility = atlas::fold_visibility(f, mesh, shared.delta_vis);
                    all.push_back(f);
                }
            }
            write_json(fd_out, atlas::io::folds_json(all));
            std::cout << "wrote " << all.size() << " folds to " << fd_out << "\n";
        } else if (*cmd_cusp) {
            const atlas::SurfaceKind kind = atlas::parse_surface_kind(cu_field);
            atlas::AnalyticSurface surf = atlas::make_surface(kind);
            if (!cu_box.empty())
                surf.box = {{cu_box[0], cu_box[2], cu_box[4]}, {cu_box[1], cu_box[3], cu_box[5]}};
            const atlas::ScalarField3 field = [surf](const atlas::Vec3& p) {
                return surf.eval(p);
            };
            const atlas::FoldSet set = atlas::fold_set_implicit(field, surf.box, cu_res);
            write_json(cu_out, atlas::io::cusps_json(set));
            if (!cu_folds_out.empty()) atlas::io::write_polylines(cu_folds_out, set.folds);
            std::cout << "wrote " << set.cusps.size() << " cusp(s), " << set.folds.size()
                      << " fold curve(s) to " << cu_out << "\n";
        } else if (*cmd_gallery) {
            if (ga_out.empty() && ga_codim2_out.empty())
                throw CLI::ValidationError("gallery", "need --out and/or --codim2-out");
            if (!ga_out.empty()) {
                const atlas::SurfaceKind kind = atlas::parse_surface_kind(ga_kind);
                atlas::AnalyticSurface surf = atlas::make_surface(kind);
                surf.tube_width = ga_tube_width;
                const atlas::SurfaceMesh mesh = atlas::sample_mesh(surf, ga_res);
                std::ostringstream comment;
                comment << "# atlas gallery kind=" << ga_kind << " res=" << ga_res;
                if (kind == atlas::SurfaceKind::thin_tube)
                    comment << " tube-width=" << ga_tube_width;
                comment << "\n";
                atlas::io::write_atomic(ga_out, comment.str() + atlas::io::mesh_to_obj(mesh));
                std::cout << "wrote " << mesh.triangles.size() << " triangles to " << ga_out
                          << "\n";
            }
            if (!ga_codim2_out.empty()) {
                if (ga_codim2_kind.empty())
                    throw CLI::ValidationError("--codim2-kind", "required with --codim2-out");
                std::vector<atlas::Polyline3> curves;
                if (ga_codim2_kind == "shared") {
                    curves.push_back(atlas::pants_plus_disc_shared_curve());
                } else {
                    atlas::Codim2Params prm;
                    prm.eps_center = ga_eps_center;
                    prm.tube_width = ga_tube_width;
                    atlas::Codim2Kind kind;
                    if (ga_codim2_kind == "single-max") kind = atlas::Codim2Kind::single_max;
                    else if (ga_codim2_kind == "single-min") kind = atlas::Codim2Kind::single_min;
                    else if (ga_codim2_kind == "monotone") kind = atlas::Codim2Kind::monotone;
                    else if (ga_codim2_kind == "two-extrema")
                        kind = atlas::Codim2Kind::two_extrema;
                    else if (ga_codim2_kind == "on-sharp-fold")
                        kind = atlas::Codim2Kind::on_sharp_fold;
                    else if (ga_codim2_kind == "mid-leaf") kind = atlas::Codim2Kind::mid_leaf;
                    else
                        throw CLI::ValidationError("--codim2-kind",
                                                   "unknown kind '" + ga_codim2_kind + "'");
                    curves.push_back(atlas::synthetic_codim2(kind, prm));
                }
                std::string csv = "# atlas gallery codim2-kind=" + ga_codim2_kind +
                                  " eps-center=" + std::to_string(ga_eps_center) + "\n";
                csv += atlas::io::polylines_to_csv(curves);
                atlas::io::write_atomic(ga_codim2_out, csv);
                std::cout << "wrote codim-2 curve to " << ga_codim2_out << "\n";
            }
        } else if (*cmd_models) {
            if (md_model.empty()) {
                std::cout << "hr: Hindmarsh-Rose (a, b, c, d, s, x0, I, eps)\n"
                          << "fhn: FitzHugh-Nagumo (alpha, s, eps, delta, p, gamma)\n";
                return kExitOk;
            }
            atlas::ModelParams params = build_model(md_model, md_set);
            json out;
            out["model"] = atlas::model_name(params);
            for (const std::string& name : atlas::param_names(params))
                out["params"][name] = atlas::get_param(params, name);
            if (md_equilibria) {
                out["equilibria"] = json::array();
                for (const auto& eq : atlas::model_equilibria(params)) {
                    json je;
                    je["state"] = {eq.state.x, eq.state.y, eq.state.z};
                    je["stable"] = eq.stable;
                    je["eigenvalues"] = json::array();
                    for (const auto& ev : eq.eigenvalues)
                        je["eigenvalues"].push_back({ev.real(), ev.imag()});
                    const atlas::TestFunctionValues tf =
                        atlas::test_functions(atlas::model_jacobian(params, eq.state));
                    je["fold_test"] = tf.fold;
                    je["hopf_test"] = tf.hopf;
                    je["hopf_admissible"] = tf.hopf_admissible;
                    out["equilibria"].push_back(je);
                }
            }
            if (md_time > 0.0) {
                atlas::IntegratorConfig cfg;
                cfg.rtol = shared.rtol;
                cfg.atol = shared.atol;
                cfg.max_step = shared.max_step;
                cfg.dense = false;
                const atlas::Trajectory tr = atlas::integrate(
                    params, {md_initial[0], md_initial[1], md_initial[2]}, md_time, cfg);
                out["trajectory"] = {
                    {"status", tr.status == atlas::TrajStatus::ok          ? "ok"
                               : tr.status == atlas::TrajStatus::blow_up ? "blow-up"
                                                                         : "stiff-failure"},
                    {"t_final", tr.t_final},
                    {"final_state", {tr.y.back().x, tr.y.back().y, tr.y.back().z}},
                    {"steps_accepted", tr.stats.accepted}};
                if (!md_traj_out.empty()) atlas::io::write_trajectory(md_traj_out, tr);
            }
            std::cout << out.dump(2) << "\n";
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "atlas: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "atlas: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        // parse errors on inputs are usage problems; write failures are I/O
        const std::string msg = e.what();
        std::cerr << "atlas: " << msg << "\n";
        if (msg.find("cannot open") != std::string::npos ||
            msg.find("short write") != std::string::npos)
            return kExitIo;
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "atlas: internal numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
