#pragma once

#include "sica/adjoint.hpp"
#include "sica/control.hpp"
#include "sica/cost.hpp"
#include "sica/model.hpp"
#include "sica/stats.hpp"

#include <cstdint>
#include <vector>

namespace sica {

struct SweepConfig {
    double rho = 0.5;              // relaxation in (0, 1]
    std::size_t max_iters = 200;
    double tolerance = 1e-9;       // stop when control_metric(u*, u) <= tolerance
    std::size_t n_paths = 1;
    std::uint64_t base_seed = 20240917;
    std::size_t n_starts = 1;
    double cell_tol = -1.0;        // < 0 selects default_cell_tol
    AdjointMode adjoint_mode = AdjointMode::CertaintyEquivalent;
    std::size_t threads = 1;

    // Throws DomainError when a field is out of range.
    void validate() const;
};

struct SweepReport {
    std::size_t iterations = 0;
    std::vector<Estimate> J_history;          // J of the control analysed in each sweep
    std::vector<double> d_history;            // control_metric(u*, u, cell_tol) per sweep
    std::vector<double> residual_history;     // necessary-condition residual per sweep
    std::vector<double> rho_history;          // relaxation accepted after each sweep
    bool converged = false;
    double residual = 0.0;                    // max_i |u*_i - u_i| at the last sweep
};

struct SweepResult {
    ControlGrid control;
    SweepReport report;
};

// Everything derived from one forward/backward pass under a fixed control.
struct SweepState {
    Ensemble ensemble;
    std::vector<AdjointPath> adjoints;
    Estimate J;
    std::vector<double> gains;      // ensemble mean of (m I/(1+gamma I))(p3 - p2) per cell
    std::vector<double> candidate;  // argmax of the Hamiltonian per cell
};

SweepState analyse_control(const StatePoint& x0, const ControlGrid& u, const ParameterSet& p,
                           const CostWeights& w, const SweepConfig& cfg);

/// Minimization gap of the separable functional int [ L(x,u) - g(t) u(t) ] dt against
/// its pointwise infimum over [u_lo, u_hi]. Exactly >= 0.
double separable_residual(const ControlGrid& u, const std::vector<double>& gains,
                          const CostWeights& w);

// Constant control at (u_lo + u_hi) / 2.
ControlGrid midpoint_control(const TimeGrid& grid, double u_lo, double u_hi);

/// Forward-backward sweep: simulate under u with common random numbers, solve the
/// co-states, take the pointwise Hamiltonian maximizer u*, relax u <- (1-rho)u + rho u*.
/// rho is halved (per sweep, at most 30 times) while the relaxed step raises J by
/// more than 2 standard errors. Throws OptimizationError on adjoint blow-up or a
/// non-finite cost.
SweepResult fbsm_optimize(const StatePoint& x0, const ParameterSet& p, const CostWeights& w,
                          const ControlGrid& initial, const SweepConfig& cfg);

struct MultistartResult {
    double value = 0.0;                 // min over starts of the final J mean
    std::size_t best_start = 0;
    std::vector<double> start_levels;   // initial constant level per start
    std::vector<SweepResult> runs;
};

// Initial levels in nested order: 1/2, 0, 1, 1/4, 3/4, 1/8, ... of [u_lo, u_hi].
std::vector<double> multistart_levels(std::size_t n_starts, double u_lo, double u_hi);

MultistartResult multistart_value_estimate(const StatePoint& x0, const ParameterSet& p,
                                           const CostWeights& w, const ControlGrid& shape,
                                           const SweepConfig& cfg, std::size_t n_starts);

} // namespace sica
