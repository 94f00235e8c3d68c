#include "atlas/models.hpp"

#include <cmath>
#include <stdexcept>

namespace atlas {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

void HRParams::validate(bool dynamical) const {
    for (double v : {a, b, c, d, s, x0, I, eps}) require_finite(v, "HR parameter");
    if (eps < 0.0) throw std::invalid_argument("HR eps must be >= 0");
    if (dynamical && !(eps > 0.0))
        throw std::invalid_argument("HR eps must be > 0 for dynamical runs");
}

void FHNParams::validate() const {
    for (double v : {alpha, s, eps, delta, p, gamma}) require_finite(v, "FHN parameter");
    if (delta == 0.0) throw std::invalid_argument("FHN delta must be nonzero");
    if (s == 0.0) throw std::invalid_argument("FHN s must be nonzero");
}

State3 hr_rhs(const State3& u, const HRParams& p) {
    const double x = u.x, y = u.y, z = u.z;
    return {y - p.a * x * x * x + p.b * x * x - z + p.I,
            p.c - p.d * x * x - y,
            p.eps * (p.s * (x - p.x0) - z)};
}

Mat3 hr_jacobian(const State3& u, const HRParams& p) {
    const double x = u.x;
    Mat3 j;
    j(0, 0) = -3.0 * p.a * x * x + 2.0 * p.b * x;
    j(0, 1) = 1.0;
    j(0, 2) = -1.0;
    j(1, 0) = -2.0 * p.d * x;
    j(1, 1) = -1.0;
    j(1, 2) = 0.0;
    j(2, 0) = p.eps * p.s;
    j(2, 1) = 0.0;
    j(2, 2) = -p.eps;
    return j;
}

State3 fhn_rhs(const State3& u, const FHNParams& p) {
    p.validate();
    const double U = u.x, V = u.y, W = u.z;
    return {V,
            (p.s * V - U * (U - 1.0) * (p.alpha - U) + W - p.p) / p.delta,
            (p.eps / p.s) * (U - p.gamma * W)};
}

Mat3 fhn_jacobian(const State3& u, const FHNParams& p) {
    p.validate();
    const double U = u.x;
    Mat3 j;
    j(0, 0) = 0.0;
    j(0, 1) = 1.0;
    j(0, 2) = 0.0;
    // d/dU of -U(U-1)(alpha-U) = 3U^2 - 2(alpha+1)U + alpha
    j(1, 0) = (3.0 * U * U - 2.0 * (p.alpha + 1.0) * U + p.alpha) / p.delta;
    j(1, 1) = p.s / p.delta;
    j(1, 2) = 1.0 / p.delta;
    j(2, 0) = p.eps / p.s;
    j(2, 1) = 0.0;
    j(2, 2) = -p.eps * p.gamma / p.s;
    return j;
}

ModelId model_id(const ModelParams& p) {
    return std::holds_alternative<HRParams>(p) ? ModelId::hr : ModelId::fhn;
}

std::string model_name(const ModelParams& p) {
    return model_id(p) == ModelId::hr ? "hr" : "fhn";
}

State3 model_rhs(const ModelParams& p, const State3& u) {
    if (const auto* hr = std::get_if<HRParams>(&p)) return hr_rhs(u, *hr);
    return fhn_rhs(u, std::get<FHNParams>(p));
}

Mat3 model_jacobian(const ModelParams& p, const State3& u) {
    if (const auto* hr = std::get_if<HRParams>(&p)) return hr_jacobian(u, *hr);
    return fhn_jacobian(u, std::get<FHNParams>(p));
}

void model_validate(const ModelParams& p, bool dynamical) {
    if (const auto* hr = std::get_if<HRParams>(&p))
        hr->validate(dynamical);
    else
        std::get<FHNParams>(p).validate();
}

namespace {

double* hr_field(HRParams& p, std::string_view name) {
    if (name == "a") return &p.a;
    if (name == "b") return &p.b;
    if (name == "c") return &p.c;
    if (name == "d") return &p.d;
    if (name == "s") return &p.s;
    if (name == "x0") return &p.x0;
    if (name == "I") return &p.I;
    if (name == "eps") return &p.eps;
    return nullptr;
}

double* fhn_field(FHNParams& p, std::string_view name) {
    if (name == "alpha") return &p.alpha;
    if (name == "s") return &p.s;
    if (name == "eps") return &p.eps;
    if (name == "delta") return &p.delta;
    if (name == "p") return &p.p;
    if (name == "gamma") return &p.gamma;
    return nullptr;
}

double* param_field(ModelParams& p, std::string_view name) {
    if (auto* hr = std::get_if<HRParams>(&p)) return hr_field(*hr, name);
    return fhn_field(std::get<FHNParams>(p), name);
}

}  // namespace

double get_param(const ModelParams& p, std::string_view name) {
    ModelParams copy = p;
    double* f = param_field(copy, name);
    if (!f)
        throw std::invalid_argument("unknown parameter '" + std::string(name) + "' for model " +
                                    model_name(p));
    return *f;
}

void set_param(ModelParams& p, std::string_view name, double value) {
    double* f = param_field(p, name);
    if (!f)
        throw std::invalid_argument("unknown parameter '" + std::string(name) + "' for model " +
                                    model_name(p));
    *f = value;
}

std::vector<std::string> param_names(const ModelParams& p) {
    if (model_id(p) == ModelId::hr) return {"a", "b", "c", "d", "s", "x0", "I", "eps"};
    return {"alpha", "s", "eps", "delta", "p", "gamma"};
}

ModelParams default_params(ModelId id) {
    if (id == ModelId::hr) return HRParams{};
    return FHNParams{};
}

ModelId parse_model_id(std::string_view name) {
    if (name == "hr" || name == "hindmarsh-rose") return ModelId::hr;
    if (name == "fhn" || name == "fitzhugh-nagumo") return ModelId::fhn;
    throw std::invalid_argument("unknown model '" + std::string(name) + "' (expected hr or fhn)");
}

}  // namespace atlas
