#pragma once

#include "sica/control.hpp"
#include "sica/cost.hpp"
#include "sica/model.hpp"
#include "sica/sde.hpp"
#include "sica/stats.hpp"

#include <span>
#include <utility>
#include <vector>

namespace sica {

enum class AdjointMode {
    CertaintyEquivalent,  // q == 0
    Regression,           // q from cross-ensemble regression of dp on dB
};

/// Co-states along one path. p[N] is the terminal condition -grad h(x(T)) exactly.
/// The last cell sees p[N] shifted by the trapezoid end weight of the running cost,
/// stored separately in `last_cell_costate`, so that every cell gradient is the exact
/// derivative of the discretized cost.
struct AdjointPath {
    std::vector<Vec4> p;
    std::vector<Vec4> q;  // q[n][2] == q[n][3] == 0 always
    AdjointMode mode = AdjointMode::CertaintyEquivalent;
    double dt = 0.0;
    Vec4 last_cell_costate{};

    // Co-state paired with cell n in the discrete maximum condition: p[n + 1],
    // except the last cell.
    const Vec4& costate_for_cell(std::size_t n) const noexcept {
        return n + 2 == p.size() ? last_cell_costate : p[n + 1];
    }
};

// p(T) = -grad h(x(T)) = (0, -w_T, 0, -w_T).
Vec4 terminal_adjoint(const StatePoint& xT, const CostWeights& w) noexcept;

/// Backward explicit Euler along a realized path:
///   p[n] = p'[n+1] + dt * H_x(x[n], u[n], p'[n+1], q[n])
/// with q taken from `q_nodes` (certainty-equivalent when empty). Throws AdjointError
/// on a non-finite co-state.
AdjointPath adjoint_backward_path(const TrajectoryPath& traj, const ControlGrid& ctrl,
                                  const ParameterSet& p, const CostWeights& w,
                                  std::span<const Vec4> q_nodes = {});

/// Co-states for every path of an ensemble. Regression mode performs a CE pass,
/// regresses each co-state increment on the Brownian increment per node across the
/// ensemble, then repeats the backward pass with the fitted q.
std::vector<AdjointPath> adjoint_ensemble(const Ensemble& e, const ControlGrid& ctrl,
                                          const ParameterSet& p, const CostWeights& w,
                                          AdjointMode mode = AdjointMode::CertaintyEquivalent,
                                          std::size_t threads = 1);

// Cross-ensemble least squares of (p[n+1]-p[n]) on dB_n, constant basis. Returns
// n_steps + 1 nodes; the final node and components 3, 4 are zero.
std::vector<Vec4> regress_diffusion_costate(const Ensemble& e, const std::vector<AdjointPath>& ce);

/// dJ/du_n = -dt * H_u(x[n], u[n], p'[n+1]) for one path.
std::vector<double> cost_gradient(const TrajectoryPath& traj, const ControlGrid& ctrl,
                                  const AdjointPath& adj, const ParameterSet& p,
                                  const CostWeights& w);

// Ensemble average of cost_gradient.
std::vector<double> cost_gradient(const Ensemble& e, const ControlGrid& ctrl,
                                  const std::vector<AdjointPath>& adj, const ParameterSet& p,
                                  const CostWeights& w);

/// Estimates of sum_i E sup_t |p_i|^2 and sum_i E int_0^T |q_i|^2 dt.
/// Throws DomainError on empty input.
std::pair<Estimate, Estimate> adjoint_moment_check(const std::vector<AdjointPath>& adjoints);

} // namespace sica
