#include "atlas/localbif.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace atlas {

namespace {

double eval_cubic(double c3, double c2, double c1, double c0, double x) {
    return ((c3 * x + c2) * x + c1) * x + c0;
}

double polish_root(double c3, double c2, double c1, double c0, double x) {
    for (int it = 0; it < 4; ++it) {
        const double f = eval_cubic(c3, c2, c1, c0, x);
        const double df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
        if (df == 0.0) break;
        const double step = f / df;
        x -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

}  // namespace

std::vector<double> solve_cubic_real(double c3, double c2, double c1, double c0) {
    const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    if (scale == 0.0) throw std::invalid_argument("zero polynomial");
    if (std::abs(c3) < 1e-14 * scale) {
        // quadratic / linear fallback
        if (std::abs(c2) < 1e-14 * scale) {
            if (c1 == 0.0) return {};
            return {-c0 / c1};
        }
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc < 0.0) return {};
        const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
        std::vector<double> r;
        if (q != 0.0) r.push_back(c0 / q);
        if (c2 != 0.0) r.push_back(q / c2);
        if (r.size() == 2 && r[0] > r[1]) std::swap(r[0], r[1]);
        if (r.size() == 2 && r[0] == r[1]) r.pop_back();
        return r;
    }

    // normalized x^3 + p2 x^2 + p1 x + p0, depressed by x = t - p2/3
    const double p2 = c2 / c3, p1 = c1 / c3, p0 = c0 / c3;
    const double shift = p2 / 3.0;
    const double p = p1 - p2 * p2 / 3.0;
    const double q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    std::vector<double> roots;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-0.5 * q + sq);
        const double v = std::cbrt(-0.5 * q - sq);
        roots.push_back(u + v - shift);
    } else if (disc == 0.0) {
        const double u = std::cbrt(-0.5 * q);
        roots.push_back(2.0 * u - shift);
        if (u != 0.0) roots.push_back(-u - shift);
    } else {
        const double r = std::sqrt(-p * p * p / 27.0);
        const double phi = std::acos(std::clamp(-0.5 * q / r, -1.0, 1.0));
        const double m = 2.0 * std::sqrt(-p / 3.0);
        for (int k = 0; k < 3; ++k)
            roots.push_back(m * std::cos((phi + 2.0 * M_PI * k) / 3.0) - shift);
    }

    for (double& x : roots) x = polish_root(c3, c2, c1, c0, x);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) {
                                return std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a));
                            }),
                roots.end());
    return roots;
}

namespace {

Equilibrium make_equilibrium(const ModelParams& params, const State3& u) {
    Equilibrium e;
    e.state = u;
    e.params = params;
    e.eigenvalues = eigen3(model_jacobian(params, u));
    e.stable = true;
    for (const auto& ev : e.eigenvalues)
        if (ev.real() >= 0.0) e.stable = false;
    return e;
}

}  // namespace

std::vector<Equilibrium> hr_equilibria(const HRParams& p) {
    p.validate(/*dynamical=*/false);
    // Steady state reduces to a cubic in x:
    //   a x^3 + (d - b) x^2 + s x - (c + s x0 + I) = 0,
    // with y = c - d x^2 and z = s (x - x0). eps never enters.
    const auto roots = solve_cubic_real(p.a, p.d - p.b, p.s, -(p.c + p.s * p.x0 + p.I));
    std::vector<Equilibrium> out;
    out.reserve(roots.size());
    for (double x : roots) {
        const State3 u{x, p.c - p.d * x * x, p.s * (x - p.x0)};
        out.push_back(make_equilibrium(HRParams(p), u));
    }
    return out;
}

std::vector<Equilibrium> fhn_equilibria(const FHNParams& p) {
    p.validate();
    std::vector<Equilibrium> out;
    if (p.gamma == 0.0) {
        // W' = 0 forces U = 0, U' = 0 forces V = 0, then V' = 0 gives W = p.
        out.push_back(make_equilibrium(FHNParams(p), State3{0.0, 0.0, p.p}));
        return out;
    }
    // U = gamma W, V = 0, and V' = 0 becomes
    //   U^3 - (alpha+1) U^2 + (alpha + 1/gamma) U - p = 0.
    const auto roots =
        solve_cubic_real(1.0, -(p.alpha + 1.0), p.alpha + 1.0 / p.gamma, -p.p);
    out.reserve(roots.size());
    for (double U : roots)
        out.push_back(make_equilibrium(FHNParams(p), State3{U, 0.0, U / p.gamma}));
    return out;
}

std::vector<Equilibrium> model_equilibria(const ModelParams& p) {
    if (const auto* hr = std::get_if<HRParams>(&p)) return hr_equilibria(*hr);
    return fhn_equilibria(std::get<FHNParams>(p));
}

std::array<std::complex<double>, 3> eigen3(const Mat3& j) {
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (!std::isfinite(j(r, c))) throw std::invalid_argument("matrix must be finite");

    const CharPoly3 cp = char_poly(j);
    std::array<std::complex<double>, 3> ev;

    const auto real_roots = solve_cubic_real(1.0, cp.a2, cp.a1, cp.a0);
    if (real_roots.size() >= 3) {
        for (int i = 0; i < 3; ++i) ev[i] = real_roots[i];
    } else if (real_roots.size() == 2) {
        // double root; the third real root follows from the coefficient sum
        const double r3 = -cp.a2 - real_roots[0] - real_roots[1];
        ev = {real_roots[0], real_roots[1], r3};
    } else {
        // one real root, deflate to a quadratic for the conjugate pair
        const double r = real_roots.at(0);
        const double b = cp.a2 + r;           // lambda^2 + b lambda + c
        const double c = cp.a1 + r * b;
        const double disc = b * b - 4.0 * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            ev = {r, 0.5 * (-b + sq), 0.5 * (-b - sq)};
        } else {
            const double re = -0.5 * b;
            const double im = 0.5 * std::sqrt(-disc);
            ev = {r, {re, im}, {re, -im}};
        }
    }

    std::sort(ev.begin(), ev.end(), [](const std::complex<double>& a, const std::complex<double>& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return ev;
}

TestFunctionValues test_functions(const Mat3& j) {
    const CharPoly3 cp = char_poly(j);
    TestFunctionValues v;
    v.fold = det(j);
    v.hopf = cp.a1 * cp.a2 - cp.a0;
    v.hopf_admissible = cp.a1 > 0.0;
    return v;
}

// ---------------------------------------------------------------------------

void ContinuationConfig::validate(int n_unknowns) const {
    if (!(step > 0.0) || !(min_step > 0.0) || !(max_step >= min_step))
        throw std::invalid_argument("continuation step bounds invalid");
    if (!box_lo.empty() &&
        (box_lo.size() != static_cast<size_t>(n_unknowns) || box_hi.size() != box_lo.size()))
        throw std::invalid_argument("continuation box dimension mismatch");
}

namespace {

struct Workspace {
    int n;                       // equations
    int m;                       // unknowns = n + 1
    std::vector<double> f0, f1;
    std::vector<double> jac;     // n x m finite-difference Jacobian

    explicit Workspace(int n_) : n(n_), m(n_ + 1), f0(n_), f1(n_), jac(static_cast<size_t>(n_) * (n_ + 1)) {}
};

void fd_jacobian(const ContinuationMap& F, const std::vector<double>& u, double rel_step,
                 Workspace& w) {
    std::vector<double> up = u, um = u;
    for (int cidx = 0; cidx < w.m; ++cidx) {
        const double hstep = rel_step * (1.0 + std::abs(u[cidx]));
        up[cidx] = u[cidx] + hstep;
        um[cidx] = u[cidx] - hstep;
        F(up, w.f0);
        F(um, w.f1);
        for (int r = 0; r < w.n; ++r)
            w.jac[static_cast<size_t>(r) * w.m + cidx] = (w.f0[r] - w.f1[r]) / (2.0 * hstep);
        up[cidx] = u[cidx];
        um[cidx] = u[cidx];
    }
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// Solve [J; t_row^T] x = rhs (m x m).
bool solve_bordered(const Workspace& w, const std::vector<double>& t_row,
                    std::vector<double>& rhs_inout) {
    const int m = w.m;
    std::vector<double> a(static_cast<size_t>(m) * m);
    for (int r = 0; r < w.n; ++r)
        for (int c = 0; c < m; ++c) a[static_cast<size_t>(r) * m + c] = w.jac[static_cast<size_t>(r) * m + c];
    for (int c = 0; c < m; ++c) a[static_cast<size_t>(w.n) * m + c] = t_row[c];
    return solve_dense(a, rhs_inout, m);
}

// Tangent of the curve: [J; prev^T] t = e_m, normalized.
bool compute_tangent(const Workspace& w, const std::vector<double>& prev,
                     std::vector<double>& tangent) {
    std::vector<double> rhs(w.m, 0.0);
    rhs[w.m - 1] = 1.0;
    std::vector<double> a(static_cast<size_t>(w.m) * w.m);
    for (int r = 0; r < w.n; ++r)
        for (int c = 0; c < w.m; ++c) a[static_cast<size_t>(r) * w.m + c] = w.jac[static_cast<size_t>(r) * w.m + c];
    for (int c = 0; c < w.m; ++c) a[static_cast<size_t>(w.n) * w.m + c] = prev[c];
    if (!solve_dense(a, rhs, w.m)) return false;
    double nrm = 0.0;
    for (double v : rhs) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) return false;
    for (double& v : rhs) v /= nrm;
    tangent = rhs;
    return true;
}

// Minimal-norm Newton correction onto F = 0 (used for the seed).
bool correct_seed(const ContinuationMap& F, std::vector<double>& u, const ContinuationConfig& cfg,
                  Workspace& w) {
    std::vector<double> f(w.n);
    for (int it = 0; it < 2 * cfg.max_newton; ++it) {
        F(u, f);
        if (inf_norm(f) < cfg.ftol) return true;
        fd_jacobian(F, u, cfg.fd_step, w);
        // delta = J^T (J J^T)^{-1} (-f)
        const int n = w.n, m = w.m;
        std::vector<double> jjt(static_cast<size_t>(n) * n, 0.0), rhs(n);
        for (int r = 0; r < n; ++r) {
            rhs[r] = -f[r];
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int k = 0; k < m; ++k)
                    s += w.jac[static_cast<size_t>(r) * m + k] * w.jac[static_cast<size_t>(c) * m + k];
                jjt[static_cast<size_t>(r) * n + c] = s;
            }
        }
        if (!solve_dense(jjt, rhs, n)) return false;
        for (int k = 0; k < m; ++k) {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += w.jac[static_cast<size_t>(r) * m + k] * rhs[r];
            u[k] += s;
        }
    }
    F(u, f);
    return inf_norm(f) < cfg.ftol;
}

bool inside_box(const std::vector<double>& u, const ContinuationConfig& cfg) {
    if (cfg.box_lo.empty()) return true;
    for (size_t i = 0; i < u.size(); ++i)
        if (u[i] < cfg.box_lo[i] || u[i] > cfg.box_hi[i]) return false;
    return true;
}

}  // namespace

ContinuationCurve continue_curve(const ContinuationMap& F, int n, std::vector<double> u0,
                                 const ContinuationConfig& cfg) {
    if (n < 1) throw std::invalid_argument("need at least one equation");
    if (u0.size() != static_cast<size_t>(n + 1))
        throw std::invalid_argument("seed dimension must be n+1");
    cfg.validate(n + 1);

    Workspace w(n);
    ContinuationCurve curve;

    if (!correct_seed(F, u0, cfg, w)) {
        curve.termination = ContinuationStop::singular_point;
        curve.singular_location = u0;
        curve.note = "seed correction failed";
        return curve;
    }
    curve.points.push_back(u0);

    fd_jacobian(F, u0, cfg.fd_step, w);
    // initial tangent: border with the last-coordinate axis, orient positive
    std::vector<double> axis(n + 1, 0.0);
    axis[n] = 1.0;
    std::vector<double> tangent;
    if (!compute_tangent(w, axis, tangent)) {
        // fall back to the other axes when the curve is orthogonal to e_m
        bool ok = false;
        for (int k = 0; k < n && !ok; ++k) {
            std::fill(axis.begin(), axis.end(), 0.0);
            axis[k] = 1.0;
            ok = compute_tangent(w, axis, tangent);
        }
        if (!ok) {
            curve.termination = ContinuationStop::singular_point;
            curve.singular_location = u0;
            curve.note = "tangent solve singular at seed";
            return curve;
        }
    }
    if (tangent[n] < 0.0)
        for (double& v : tangent) v = -v;

    double h = cfg.step;
    std::vector<double> u = u0, f(n), u_try(n + 1);

    while (static_cast<int>(curve.points.size()) < cfg.max_points) {
        bool accepted = false;
        while (!accepted) {
            if (h < cfg.min_step || h < 1e-12) {
                curve.termination = ContinuationStop::step_underflow;
                curve.note = "corrector kept failing";
                return curve;
            }
            // predictor
            for (int k = 0; k <= n; ++k) u_try[k] = u[k] + h * tangent[k];
            // corrector: Newton on [F; tangent^T (u - u_pred)] with damping
            const std::vector<double> u_pred = u_try;
            bool converged = false, singular = false;
            double res_prev = std::numeric_limits<double>::infinity();
            for (int it = 0; it < cfg.max_newton; ++it) {
                F(u_try, f);
                double res = inf_norm(f);
                if (res < cfg.ftol) {
                    converged = true;
                    break;
                }
                fd_jacobian(F, u_try, cfg.fd_step, w);
                std::vector<double> rhs(n + 1, 0.0);
                for (int r = 0; r < n; ++r) rhs[r] = -f[r];
                double ortho = 0.0;
                for (int k = 0; k <= n; ++k) ortho += tangent[k] * (u_try[k] - u_pred[k]);
                rhs[n] = -ortho;
                if (!solve_bordered(w, tangent, rhs)) {
                    singular = true;
                    break;
                }
                double damp = 1.0;
                if (res > res_prev) damp = 0.5;  // residual grew: damp the next move
                for (int k = 0; k <= n; ++k) u_try[k] += damp * rhs[k];
                res_prev = res;
            }
            if (singular) {
                curve.termination = ContinuationStop::singular_point;
                curve.singular_location = u_try;
                curve.note = "rank-deficient Jacobian during correction";
                return curve;
            }
            if (converged) {
                F(u_try, f);
                if (inf_norm(f) < cfg.ftol) accepted = true;
            }
            if (!accepted) h *= 0.5;
        }

        const double moved = distance(u_try, u);
        curve.points.push_back(u_try);
        curve.step_lengths.push_back(moved);

        if (!inside_box(u_try, cfg)) {
            curve.termination = ContinuationStop::boundary;
            return curve;
        }
        if (curve.points.size() >= 11) {
            if (distance(u_try, curve.points.front()) < h) {
                curve.termination = ContinuationStop::closed_loop;
                return curve;
            }
        }

        // next tangent, continuing in the same direction
        fd_jacobian(F, u_try, cfg.fd_step, w);
        std::vector<double> t_new;
        if (!compute_tangent(w, tangent, t_new)) {
            curve.termination = ContinuationStop::singular_point;
            curve.singular_location = u_try;
            curve.note = "tangent solve singular";
            return curve;
        }
        double align = 0.0;
        for (int k = 0; k <= n; ++k) align += t_new[k] * tangent[k];
        if (align < 0.0)
            for (double& v : t_new) v = -v;
        tangent = t_new;
        u = u_try;
        h = std::min(h * 1.3, std::min(cfg.max_step, cfg.step));
    }
    curve.termination = ContinuationStop::max_points;
    return curve;
}

}  // namespace atlas
