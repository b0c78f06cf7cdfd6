#pragma once

#include "sica/control.hpp"
#include "sica/model.hpp"
#include "sica/sde.hpp"
#include "sica/stats.hpp"

#include <cstdint>

namespace sica {

/// Running cost L(x,u) = w_I*I + w_C*C + w_A*A + (w_u/2)*u^2 and terminal cost
/// h(x) = w_T*(I + A). Linear in the state and strictly convex in u, which gives
/// the Hamiltonian a unique closed-form maximizer over a bounded interval.
class CostWeights {
public:
    CostWeights() = default;
    // Throws DomainError unless w_u > 0 and the other weights are >= 0.
    CostWeights(double w_I, double w_C, double w_A, double w_u, double w_T);

    double w_I() const noexcept { return w_I_; }
    double w_C() const noexcept { return w_C_; }
    double w_A() const noexcept { return w_A_; }
    double w_u() const noexcept { return w_u_; }
    double w_T() const noexcept { return w_T_; }

    friend bool operator==(const CostWeights&, const CostWeights&) = default;

private:
    double w_I_ = 1.0;
    double w_C_ = 0.5;
    double w_A_ = 2.0;
    double w_u_ = 1.0;
    double w_T_ = 1.0;
};

double running_cost(const StatePoint& x, double u, const CostWeights& w) noexcept;
double terminal_cost(const StatePoint& x, const CostWeights& w) noexcept;
// Gradient of the state part of L: (0, w_I, w_C, w_A).
Vec4 running_cost_gradient(const CostWeights& w) noexcept;
// Gradient of h: (0, w_T, 0, w_T).
Vec4 terminal_cost_gradient(const CostWeights& w) noexcept;

// Trapezoidal quadrature of L along one path plus h at the final node.
double path_cost(const TrajectoryPath& path, const ControlGrid& ctrl, const CostWeights& w);

// Cost estimate over an existing ensemble simulated under ctrl.
Estimate estimate_J(const Ensemble& e, const ControlGrid& ctrl, const CostWeights& w);

/// Monte Carlo estimate of J(u) = E[ int_0^T L dt + h(x(T)) ]. Uses common random
/// numbers through base_seed.
Estimate estimate_J(const ControlGrid& ctrl, const ParameterSet& p, const StatePoint& x0,
                    const CostWeights& w, std::size_t n_paths, std::uint64_t base_seed,
                    std::size_t threads = 1);

/// H(x,u,p,q) = <f(x,u), p> + sigma1*q1 + sigma2*q2 - L(x,u).
double hamiltonian(const StatePoint& x, double u, const Vec4& pvec, const Vec4& qvec,
                   const ParameterSet& p, const CostWeights& w) noexcept;

// dH/du = (m*I/(1+gamma*I))*(p3 - p2) - w_u*u.
double hamiltonian_du(const StatePoint& x, const Vec4& pvec, const ParameterSet& p,
                      const CostWeights& w, double u) noexcept;

// Analytic state gradient of H.
Vec4 hamiltonian_dx(const StatePoint& x, double u, const Vec4& pvec, const Vec4& qvec,
                    const ParameterSet& p, const CostWeights& w) noexcept;

// Coefficient of u in the Hamiltonian: (m*I/(1+gamma*I))*(p3 - p2).
double switching_gain(const StatePoint& x, const Vec4& pvec, const ParameterSet& p) noexcept;

// Maximizer of gain*v - (w_u/2)*v^2 over [u_lo, u_hi].
double argmax_from_gain(double gain, double w_u, double u_lo, double u_hi) noexcept;

/// Unique maximizer of H(x, . , pvec, q) over [u_lo, u_hi].
double pointwise_argmax_u(const StatePoint& x, const Vec4& pvec, const ParameterSet& p,
                          const CostWeights& w, double u_lo, double u_hi) noexcept;

} // namespace sica
