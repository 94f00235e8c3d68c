#ifndef ATLAS_LOCALBIF_HPP
#define ATLAS_LOCALBIF_HPP

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atlas/models.hpp"

namespace atlas {

// Real roots of c3 x^3 + c2 x^2 + c1 x + c0 = 0, ascending, Cardano with a
// Newton polish per root. Degenerate leading coefficients fall back to the
// quadratic / linear case.
std::vector<double> solve_cubic_real(double c3, double c2, double c1, double c0);

struct Equilibrium {
    State3 state;
    ModelParams params;
    std::array<std::complex<double>, 3> eigenvalues;
    bool stable = false;  // all real parts < 0
};

std::vector<Equilibrium> hr_equilibria(const HRParams& p);
std::vector<Equilibrium> fhn_equilibria(const FHNParams& p);
std::vector<Equilibrium> model_equilibria(const ModelParams& p);

// Eigenvalues of a 3x3 real matrix via Cardano on the characteristic
// polynomial; complex values come in exact conjugate pairs. Sorted by
// descending real part, then descending imaginary part.
std::array<std::complex<double>, 3> eigen3(const Mat3& j);

struct TestFunctionValues {
    double fold = 0.0;  // det(J); zero signals a zero eigenvalue
    double hopf = 0.0;  // a1*a2 - a0 of lambda^3 + a2 l^2 + a1 l + a0
    bool hopf_admissible = false;  // a1 > 0, so hopf = 0 means a pure imaginary pair
};

TestFunctionValues test_functions(const Mat3& j);

// ---------------------------------------------------------------------------
// Pseudo-arclength continuation of F(u) = 0 with F: R^(n+1) -> R^n.

using ContinuationMap = std::function<void(const std::vector<double>& u, std::vector<double>& f)>;

struct ContinuationConfig {
    double step = 0.01;        // requested arclength step
    double min_step = 1e-6;
    double max_step = 0.1;
    double ftol = 1e-10;       // corrector convergence on ||F||_inf
    int max_newton = 8;
    int max_points = 10000;
    double fd_step = 1e-7;     // relative finite-difference step for dF/du
    // optional bounding box per coordinate; empty = unbounded
    std::vector<double> box_lo, box_hi;

    void validate(int n_unknowns) const;
};

enum class ContinuationStop { closed_loop, boundary, step_underflow, max_points, singular_point };

struct ContinuationCurve {
    std::vector<std::vector<double>> points;  // extended unknowns, n+1 each
    std::vector<double> step_lengths;         // distance between consecutive points
    ContinuationStop termination = ContinuationStop::max_points;
    std::optional<std::vector<double>> singular_location;
    std::string note;  // human-readable termination detail
};

// n = number of equations; unknown dimension is n+1. Seed u0 is corrected
// onto the curve first (minimal-norm Newton); the initial tangent is oriented
// with positive component along the last extended coordinate.
ContinuationCurve continue_curve(const ContinuationMap& F, int n, std::vector<double> u0,
                                 const ContinuationConfig& cfg);

}  // namespace atlas

#endif
