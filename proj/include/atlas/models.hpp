#ifndef ATLAS_MODELS_HPP
#define ATLAS_MODELS_HPP

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "atlas/linalg.hpp"

namespace atlas {

// One point of a three-dimensional phase space: (x, y, z) for Hindmarsh-Rose,
// (U, V, W) for FitzHugh-Nagumo.
using State3 = Vec3;

// Hindmarsh-Rose neuron model
//   x' = y - a x^3 + b x^2 - z + I
//   y' = c - d x^2 - y
//   z' = eps [ s (x - x0) - z ]
// The conventional fixed values are a=1, c=1, d=5, s=4, x0=-1.6; b, I and eps
// are the free parameters.
struct HRParams {
    double a = 1.0;
    double b = 3.0;
    double c = 1.0;
    double d = 5.0;
    double s = 4.0;
    double x0 = -1.6;
    double I = 2.0;
    double eps = 0.018;

    // eps = 0 is allowed for equilibrium analysis only; dynamical runs need
    // eps > 0.
    void validate(bool dynamical) const;
};

// FitzHugh-Nagumo travelling-wave ODE
//   U' = V
//   V' = (s V - U (U-1) (alpha-U) + W - p) / Delta
//   W' = (eps / s) (U - gamma W)
// The reference slice uses p = 0, gamma = 0, Delta = 1.
struct FHNParams {
    double alpha = 0.1;
    double s = 1.0;
    double eps = 0.01;
    double delta = 1.0;
    double p = 0.0;
    double gamma = 0.0;

    void validate() const;  // delta != 0, s != 0, finite
};

State3 hr_rhs(const State3& u, const HRParams& p);
Mat3 hr_jacobian(const State3& u, const HRParams& p);

State3 fhn_rhs(const State3& u, const FHNParams& p);
Mat3 fhn_jacobian(const State3& u, const FHNParams& p);

enum class ModelId { hr, fhn };

using ModelParams = std::variant<HRParams, FHNParams>;

ModelId model_id(const ModelParams& p);
std::string model_name(const ModelParams& p);
State3 model_rhs(const ModelParams& p, const State3& u);
Mat3 model_jacobian(const ModelParams& p, const State3& u);
void model_validate(const ModelParams& p, bool dynamical);

// Named-parameter access used by sweeps and the CLI ("b", "I", "eps", ...).
// Unknown names throw std::invalid_argument.
double get_param(const ModelParams& p, std::string_view name);
void set_param(ModelParams& p, std::string_view name, double value);
std::vector<std::string> param_names(const ModelParams& p);

ModelParams default_params(ModelId id);
ModelId parse_model_id(std::string_view name);

}  // namespace atlas

#endif
