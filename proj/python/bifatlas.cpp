// Python bindings for the core operations: models, integration, spike-count
// sweeps, local bifurcation analysis, gallery surfaces and the geometric
// bifurcation analyses.
#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atlas/gallery.hpp"
#include "atlas/geom.hpp"
#include "atlas/io.hpp"
#include "atlas/localbif.hpp"
#include "atlas/sweep.hpp"

namespace py = pybind11;
using namespace atlas;

namespace {

std::array<double, 3> to_array(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

ModelParams make_params(const std::string& model, const py::dict& kv) {
    ModelParams p = default_params(parse_model_id(model));
    for (const auto& item : kv)
        set_param(p, py::cast<std::string>(item.first), py::cast<double>(item.second));
    return p;
}

}  // namespace

PYBIND11_MODULE(bifatlas, m) {
    m.doc() = "spike-count sweeps and geometric bifurcation analysis for slow-fast models";

    // ----- models / odecore -------------------------------------------------
    py::class_<HRParams>(m, "HRParams")
        .def(py::init<>())
        .def_readwrite("a", &HRParams::a)
        .def_readwrite("b", &HRParams::b)
        .def_readwrite("c", &HRParams::c)
        .def_readwrite("d", &HRParams::d)
        .def_readwrite("s", &HRParams::s)
        .def_readwrite("x0", &HRParams::x0)
        .def_readwrite("I", &HRParams::I)
        .def_readwrite("eps", &HRParams::eps);

    py::class_<FHNParams>(m, "FHNParams")
        .def(py::init<>())
        .def_readwrite("alpha", &FHNParams::alpha)
        .def_readwrite("s", &FHNParams::s)
        .def_readwrite("eps", &FHNParams::eps)
        .def_readwrite("delta", &FHNParams::delta)
        .def_readwrite("p", &FHNParams::p)
        .def_readwrite("gamma", &FHNParams::gamma);

    m.def("hr_rhs", [](const std::array<double, 3>& u, const HRParams& p) {
        return to_array(hr_rhs(to_vec(u), p));
    });
    m.def("fhn_rhs", [](const std::array<double, 3>& u, const FHNParams& p) {
        return to_array(fhn_rhs(to_vec(u), p));
    });
    m.def("hr_jacobian", [](const std::array<double, 3>& u, const HRParams& p) {
        const Mat3 j = hr_jacobian(to_vec(u), p);
        return std::array<std::array<double, 3>, 3>{{{j(0, 0), j(0, 1), j(0, 2)},
                                                     {j(1, 0), j(1, 1), j(1, 2)},
                                                     {j(2, 0), j(2, 1), j(2, 2)}}};
    });

    py::class_<IntegratorConfig>(m, "IntegratorConfig")
        .def(py::init<>())
        .def_readwrite("rtol", &IntegratorConfig::rtol)
        .def_readwrite("atol", &IntegratorConfig::atol)
        .def_readwrite("max_step", &IntegratorConfig::max_step)
        .def_readwrite("dense", &IntegratorConfig::dense);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("t", [](const Trajectory& tr) { return tr.t; })
        .def_property_readonly("states",
                               [](const Trajectory& tr) {
                                   std::vector<std::array<double, 3>> out;
                                   out.reserve(tr.y.size());
                                   for (const State3& s : tr.y) out.push_back(to_array(s));
                                   return out;
                               })
        .def_property_readonly("status",
                               [](const Trajectory& tr) {
                                   switch (tr.status) {
                                       case TrajStatus::ok: return "ok";
                                       case TrajStatus::blow_up: return "blow-up";
                                       case TrajStatus::stiff_failure: return "stiff-failure";
                                   }
                                   return "ok";
                               })
        .def_property_readonly("t_final", [](const Trajectory& tr) { return tr.t_final; })
        .def("sample",
             [](const Trajectory& tr, double t) { return to_array(tr.sample(t)); });

    m.def(
        "integrate",
        [](const std::string& model, const py::dict& params, const std::array<double, 3>& y0,
           double t_end, const IntegratorConfig& cfg) {
            return integrate(make_params(model, params), to_vec(y0), t_end, cfg);
        },
        py::arg("model"), py::arg("params"), py::arg("initial"), py::arg("t_end"),
        py::arg("cfg") = IntegratorConfig{});

    // ----- localbif -----------------------------------------------------------
    m.def(
        "equilibria",
        [](const std::string& model, const py::dict& params) {
            py::list out;
            for (const Equilibrium& eq : model_equilibria(make_params(model, params))) {
                py::dict d;
                d["state"] = to_array(eq.state);
                d["stable"] = eq.stable;
                std::vector<std::complex<double>> evs(eq.eigenvalues.begin(),
                                                      eq.eigenvalues.end());
                d["eigenvalues"] = evs;
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("params") = py::dict());

    m.def("eigen3", [](const std::array<std::array<double, 3>, 3>& rows) {
        Mat3 j;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) j(r, c) = rows[r][c];
        const auto ev = eigen3(j);
        return std::vector<std::complex<double>>(ev.begin(), ev.end());
    });

    m.def("test_functions", [](const std::array<std::array<double, 3>, 3>& rows) {
        Mat3 j;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) j(r, c) = rows[r][c];
        const TestFunctionValues v = test_functions(j);
        py::dict d;
        d["fold"] = v.fold;
        d["hopf"] = v.hopf;
        d["hopf_admissible"] = v.hopf_admissible;
        return d;
    });

    m.def(
        "continue_curve",
        [](const std::function<std::vector<double>(std::vector<double>)>& f, int n,
           std::vector<double> seed, double step, int max_points) {
            ContinuationMap wrapped = [&f](const std::vector<double>& u,
                                           std::vector<double>& out) { out = f(u); };
            ContinuationConfig cfg;
            cfg.step = step;
            cfg.max_points = max_points;
            const ContinuationCurve curve = continue_curve(wrapped, n, std::move(seed), cfg);
            py::dict d;
            d["points"] = curve.points;
            switch (curve.termination) {
                case ContinuationStop::closed_loop: d["termination"] = "closed-loop"; break;
                case ContinuationStop::boundary: d["termination"] = "boundary"; break;
                case ContinuationStop::step_underflow: d["termination"] = "step-underflow"; break;
                case ContinuationStop::max_points: d["termination"] = "max-points"; break;
                case ContinuationStop::singular_point: d["termination"] = "singular-point"; break;
            }
            return d;
        },
        py::arg("f"), py::arg("n"), py::arg("seed"), py::arg("step") = 0.01,
        py::arg("max_points") = 10000);

    // ----- sweep ----------------------------------------------------------------
    py::class_<SCConfig>(m, "SCConfig")
        .def(py::init<>())
        .def_readwrite("t_transient", &SCConfig::t_transient)
        .def_readwrite("t_observe", &SCConfig::t_observe)
        .def_readwrite("x_threshold", &SCConfig::x_threshold)
        .def_readwrite("return_tol", &SCConfig::return_tol)
        .def_readwrite("max_spikes", &SCConfig::max_spikes)
        .def_readwrite("integ", &SCConfig::integ);

    m.def(
        "count_spikes",
        [](const std::string& model, const py::dict& params, const SCConfig& cfg) {
            const SpikeCountResult r = count_spikes(make_params(model, params), cfg);
            py::dict d;
            d["classification"] = sc_class_token(r.cls);
            d["spikes"] = r.spikes;
            d["period"] = r.period;
            return d;
        },
        py::arg("model"), py::arg("params"), py::arg("cfg") = SCConfig{});

    py::class_<SpikeGrid>(m, "SpikeGrid")
        .def_property_readonly("nx", [](const SpikeGrid& g) { return g.nx; })
        .def_property_readonly("ny", [](const SpikeGrid& g) { return g.ny; })
        .def("classification",
             [](const SpikeGrid& g, int i, int j) { return sc_class_token(g.at(i, j).cls); })
        .def("spikes", [](const SpikeGrid& g, int i, int j) { return g.at(i, j).spikes; })
        .def("period", [](const SpikeGrid& g, int i, int j) { return g.at(i, j).period; })
        .def("coord", [](const SpikeGrid& g, int i, int j) {
            return std::pair<double, double>{g.coord1(i), g.coord2(j)};
        })
        .def("distinct_positive_spike_counts", &SpikeGrid::distinct_positive_spike_counts);

    m.def(
        "sc_sweep",
        [](const std::string& model, const py::dict& params, const std::string& axis1_name,
           double lo1, double hi1, const std::string& axis2_name, double lo2, double hi2, int nx,
           int ny, const SCConfig& cfg, int workers) {
            SliceSpec slice;
            slice.base = make_params(model, params);
            slice.axis1 = {axis1_name, lo1, hi1};
            slice.axis2 = {axis2_name, lo2, hi2};
            return sc_sweep(slice, nx, ny, cfg, workers);
        },
        py::arg("model"), py::arg("params"), py::arg("axis1"), py::arg("lo1"), py::arg("hi1"),
        py::arg("axis2"), py::arg("lo2"), py::arg("hi2"), py::arg("nx"), py::arg("ny"),
        py::arg("cfg") = SCConfig{}, py::arg("workers") = 1);

    m.def("find_sc_boundary", [](const SpikeGrid& g, int n) {
        py::list out;
        for (const Polyline3& line : find_sc_boundary(g, n)) {
            py::dict d;
            std::vector<std::array<double, 3>> pts;
            for (const Vec3& p : line.points) pts.push_back(to_array(p));
            d["points"] = pts;
            d["closed"] = line.closed;
            out.append(d);
        }
        return out;
    });

    // ----- gallery + geom ---------------------------------------------------
    py::class_<SurfaceMesh>(m, "SurfaceMesh")
        .def_property_readonly("n_vertices",
                               [](const SurfaceMesh& mesh) { return mesh.vertices.size(); })
        .def_property_readonly("n_triangles",
                               [](const SurfaceMesh& mesh) { return mesh.triangles.size(); })
        .def("total_area", &SurfaceMesh::total_area)
        .def("median_edge_length", &SurfaceMesh::median_edge_length);

    m.def(
        "gallery_mesh",
        [](const std::string& kind, int resolution, double tube_width) {
            AnalyticSurface s = make_surface(parse_surface_kind(kind));
            s.tube_width = tube_width;
            return sample_mesh(s, resolution);
        },
        py::arg("kind"), py::arg("resolution") = 32, py::arg("tube_width") = 1e-4);

    m.def(
        "critical_points",
        [](const SurfaceMesh& mesh, int axis) {
            py::list out;
            for (const CriticalPoint& cp : pl_critical_points(mesh, axis).points) {
                py::dict d;
                d["location"] = to_array(cp.location);
                d["kind"] = cp.kind == MorseKind::minimum   ? "min"
                            : cp.kind == MorseKind::maximum ? "max"
                                                            : "saddle";
                d["class"] = cp.geometric_class();
                out.append(d);
            }
            return out;
        },
        py::arg("mesh"), py::arg("axis") = 2);

    m.def(
        "slice_level",
        [](const SurfaceMesh& mesh, double eps, int axis) {
            py::list out;
            for (const Polyline3& line : slice_level(mesh, eps, axis)) {
                py::dict d;
                std::vector<std::array<double, 3>> pts;
                for (const Vec3& p : line.points) pts.push_back(to_array(p));
                d["points"] = pts;
                d["closed"] = line.closed;
                out.append(d);
            }
            return out;
        },
        py::arg("mesh"), py::arg("eps"), py::arg("axis") = 2);

    m.def(
        "reeb_topology",
        [](const SurfaceMesh& mesh, const std::vector<double>& samples, int axis) {
            const ReebGraph g = build_reeb(mesh, axis, samples);
            const TopologyClass cls = classify_topology(g);
            py::dict d;
            d["case"] = topology_case_name(cls.c);
            d["description"] = cls.description;
            py::list events;
            for (const ReebNode& n : g.nodes) {
                py::dict e;
                e["type"] = reeb_event_name(n.type);
                e["eps"] = n.eps;
                events.append(e);
            }
            d["events"] = events;
            return d;
        },
        py::arg("mesh"), py::arg("samples"), py::arg("axis") = 2);

    m.def(
        "count_roots_line",
        [](double eps1, double eps2, double lam_lo, double lam_hi) {
            const AnalyticSurface s = make_surface(SurfaceKind::cusp);
            const LineRoots r = count_roots_line(
                [s](const Vec3& p) { return s.eval(p); }, eps1, eps2, lam_lo, lam_hi);
            py::dict d;
            d["count"] = r.count;
            d["roots"] = r.roots;
            d["tangential"] = r.tangential;
            return d;
        },
        py::arg("eps1"), py::arg("eps2"), py::arg("lam_lo") = -2.5, py::arg("lam_hi") = 2.5);

    m.attr("__version__") = "0.1.0";
}
