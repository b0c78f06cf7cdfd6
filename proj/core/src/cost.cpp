#include "sica/cost.hpp"

#include "sica/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sica {

CostWeights::CostWeights(double w_I, double w_C, double w_A, double w_u, double w_T)
    : w_I_(w_I), w_C_(w_C), w_A_(w_A), w_u_(w_u), w_T_(w_T) {
    for (double v : {w_I, w_C, w_A, w_T})
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("state and terminal cost weights must be finite and >= 0");
    if (!(w_u > 0.0) || !std::isfinite(w_u))
        throw DomainError("control weight w_u must be finite and > 0");
}

double running_cost(const StatePoint& x, double u, const CostWeights& w) noexcept {
    return w.w_I() * x.I + w.w_C() * x.C + w.w_A() * x.A + 0.5 * w.w_u() * u * u;
}

double terminal_cost(const StatePoint& x, const CostWeights& w) noexcept {
    return w.w_T() * (x.I + x.A);
}

Vec4 running_cost_gradient(const CostWeights& w) noexcept { return {0.0, w.w_I(), w.w_C(), w.w_A()}; }

Vec4 terminal_cost_gradient(const CostWeights& w) noexcept { return {0.0, w.w_T(), 0.0, w.w_T()}; }

double path_cost(const TrajectoryPath& path, const ControlGrid& ctrl, const CostWeights& w) {
    const double dt = ctrl.grid().dt();
    double integral = 0.0;
    for (std::size_t n = 0; n < ctrl.size(); ++n) {
        const double u = ctrl[n];
        integral += 0.5 * dt * (running_cost(path.states[n], u, w) +
                                running_cost(path.states[n + 1], u, w));
    }
    return integral + terminal_cost(path.states.back(), w);
}

Estimate estimate_J(const Ensemble& e, const ControlGrid& ctrl, const CostWeights& w) {
    std::vector<double> costs;
    costs.reserve(e.size());
    for (const auto& path : e.paths)
        costs.push_back(path_cost(path, ctrl, w));
    return estimate_from_samples(costs);
}

Estimate estimate_J(const ControlGrid& ctrl, const ParameterSet& p, const StatePoint& x0,
                    const CostWeights& w, std::size_t n_paths, std::uint64_t base_seed,
                    std::size_t threads) {
    return estimate_J(simulate_ensemble(x0, ctrl, p, n_paths, base_seed, threads), ctrl, w);
}

double hamiltonian(const StatePoint& x, double u, const Vec4& pvec, const Vec4& qvec,
                   const ParameterSet& p, const CostWeights& w) noexcept {
    const Vec4 f = drift(x, u, p);
    const Vec4 s = diffusion(x, p);
    double h = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        h += f[i] * pvec[i];
    return h + s[0] * qvec[0] + s[1] * qvec[1] - running_cost(x, u, w);
}

double switching_gain(const StatePoint& x, const Vec4& pvec, const ParameterSet& p) noexcept {
    return treatment_gain(x, p) * (pvec[2] - pvec[1]);
}

double hamiltonian_du(const StatePoint& x, const Vec4& pvec, const ParameterSet& p,
                      const CostWeights& w, double u) noexcept {
    return switching_gain(x, pvec, p) - w.w_u() * u;
}

Vec4 hamiltonian_dx(const StatePoint& x, double u, const Vec4& pvec, const Vec4& qvec,
                    const ParameterSet& p, const CostWeights& w) noexcept {
    const auto& r = p.rates();
    const double beta = r.transmission;
    const double eta_c = r.chronic_infectivity;
    const double eta_a = r.aids_infectivity;
    const double load = infectious_load(x, p);
    // sigma enters H as delta*load*S*(q2 - q1)
    const double dq = r.noise_intensity * (qvec[1] - qvec[0]);
    const double dp = pvec[1] - pvec[0];
    const double denom = 1.0 + r.saturation * x.I;
    const double treat_dI = r.control_efficacy * u / (denom * denom);
    const Vec4 grad_l = running_cost_gradient(w);

    return {
        beta * load * dp - r.natural_death * pvec[0] + load * dq,
        beta * x.S * dp - (p.infected_exit() + treat_dI) * pvec[1] +
            (r.treatment_uptake + treat_dI) * pvec[2] + r.aids_progression * pvec[3] +
            x.S * dq - grad_l[1],
        beta * eta_c * x.S * dp + r.treatment_default * pvec[1] - p.chronic_exit() * pvec[2] +
            eta_c * x.S * dq - grad_l[2],
        beta * eta_a * x.S * dp + r.aids_treatment * pvec[1] - p.aids_exit() * pvec[3] +
            eta_a * x.S * dq - grad_l[3],
    };
}

double argmax_from_gain(double gain, double w_u, double u_lo, double u_hi) noexcept {
    return std::clamp(gain / w_u, u_lo, u_hi);
}

double pointwise_argmax_u(const StatePoint& x, const Vec4& pvec, const ParameterSet& p,
                          const CostWeights& w, double u_lo, double u_hi) noexcept {
    return argmax_from_gain(switching_gain(x, pvec, p), w.w_u(), u_lo, u_hi);
}

} // namespace sica
