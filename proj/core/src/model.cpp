#include "sica/model.hpp"

#include "sica/errors.hpp"

#include <cmath>

namespace sica {

bool StatePoint::is_valid() const noexcept {
    for (double v : as_array())
        if (!std::isfinite(v) || v < 0.0)
            return false;
    return true;
}

double infectious_load(const StatePoint& x, const ParameterSet& p) noexcept {
    const auto& r = p.rates();
    return x.I + r.chronic_infectivity * x.C + r.aids_infectivity * x.A;
}

double treatment_gain(const StatePoint& x, const ParameterSet& p) noexcept {
    const auto& r = p.rates();
    return r.control_efficacy * x.I / (1.0 + r.saturation * x.I);
}

double treatment_term(const StatePoint& x, double u, const ParameterSet& p) noexcept {
    const auto& r = p.rates();
    return r.control_efficacy * u * x.I / (1.0 + r.saturation * x.I);
}

Vec4 drift(const StatePoint& x, double u, const ParameterSet& p) noexcept {
    const auto& r = p.rates();
    const double infection = r.transmission * infectious_load(x, p) * x.S;
    const double treated = treatment_term(x, u, p);
    return {
        r.recruitment - infection - r.natural_death * x.S,
        infection - p.infected_exit() * x.I + r.aids_treatment * x.A +
            r.treatment_default * x.C - treated,
        r.treatment_uptake * x.I - p.chronic_exit() * x.C + treated,
        r.aids_progression * x.I - p.aids_exit() * x.A,
    };
}

Vec4 diffusion(const StatePoint& x, const ParameterSet& p) noexcept {
    const double s1 = -p.rates().noise_intensity * infectious_load(x, p) * x.S;
    return {s1, -s1, 0.0, 0.0};
}

OmegaBounds omega_bounds(const ParameterSet& p) {
    const auto& r = p.rates();
    if (r.natural_death == 0.0)
        throw DomainError("invariant region needs a positive natural death rate");
    return {r.recruitment / (r.natural_death + r.aids_death), r.recruitment / r.natural_death};
}

bool in_omega(const StatePoint& x, const OmegaBounds& b, double tol) noexcept {
    const double n = x.total();
    return b.n_low - tol <= n && n <= b.n_high + tol;
}

bool in_omega(const StatePoint& x, const OmegaBounds& b) noexcept {
    return in_omega(x, b, 1e-9 * b.n_high);
}

} // namespace sica
