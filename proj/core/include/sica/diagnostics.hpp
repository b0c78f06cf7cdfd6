#pragma once

#include "sica/control.hpp"
#include "sica/cost.hpp"
#include "sica/fbsm.hpp"
#include "sica/interval.hpp"
#include "sica/model.hpp"

#include <vector>

namespace sica {

// Problem data shared by the near-optimality diagnostics.
struct DiagnosticContext {
    StatePoint x0;
    ParameterSet params;
    CostWeights weights;
    SweepConfig sweep;
};

struct NearOptReport {
    double epsilon_gap = 0.0;         // |J(u) - V_hat|
    double necessary_residual = 0.0;  // separable minimization gap at u
    double sufficient_gap = 0.0;      // raw bound residual^(1/3), constant not estimated
    double order_slope = 0.0;         // fit of log gap against log residual over sweep iterates
    double order_r2 = 0.0;
};

/// |estimate_J(u) - value| with the context's seeds (common random numbers).
double epsilon_optimality_gap(const ControlGrid& u, const DiagnosticContext& ctx, double value);

/// E int [L(x,u) - g u] dt - inf_v E int [L(x,v) - g v] dt with g the ensemble mean
/// switching gain under u. The infimum is attained cell by cell.
double necessary_condition_residual(const ControlGrid& u, const DiagnosticContext& ctx);

struct SufficientCheck {
    bool satisfied = false;
    double implied_bound_raw = 0.0;  // epsilon^(1/3)
    double residual = 0.0;
};

SufficientCheck sufficient_condition_check(const ControlGrid& u, const DiagnosticContext& ctx,
                                           double epsilon);

struct LipschitzPoint {
    double scale = 0.0;
    double distance = 0.0;  // control_metric(u_base, u')
    double moment = 0.0;    // sum_i E sup_t |x_i - x'_i|^(2 theta)
};

struct LipschitzEstimate {
    std::vector<LipschitzPoint> points;
    double slope = 0.0;  // least squares slope of log moment against log distance
    double r2 = 0.0;
    double envelope_log_bound = 0.0;  // max_j (log moment_j - k theta log d_j)
    bool all_zero = false;            // every moment exactly 0
    bool monotone = false;            // moments nondecreasing in distance
};

// Copy of u_base whose first round(s * n) cells are moved to the bound farther from
// their current value.
ControlGrid flip_prefix(const ControlGrid& u_base, double scale);

/// Paired-path (common random numbers) estimate of how state deviations scale with
/// the control distance. Throws DomainError on fewer than 3 scales, scales outside
/// (0, 1], k outside (0, 1) or k*theta >= 1.
LipschitzEstimate state_lipschitz_estimate(const ControlGrid& u_base,
                                           const std::vector<double>& scales, double theta,
                                           double k, const DiagnosticContext& ctx);

struct KSweepRow {
    double k = 0.0;
    double J_mean = 0.0;
    double J_stderr = 0.0;
    double omega_low = 0.0;
    double omega_high = 0.0;
    double u_mean = 0.0;
    double u_max = 0.0;
    bool converged = false;
    std::size_t iterations = 0;

    friend bool operator==(const KSweepRow&, const KSweepRow&) = default;
};

// Summary row of an optimized run under a realized parameter set.
KSweepRow summarize_run(double k, const ParameterSet& p, const SweepResult& run);

/// For each k: realize the imprecise set, run the sweep from `initial`, summarize.
std::vector<KSweepRow> k_sweep(const ImpreciseParameterSet& imprecise, const std::vector<double>& ks,
                               const DiagnosticContext& ctx, const ControlGrid& initial);

/// Fits log |J_k - value| against log residual_k over the sweep iterates with both
/// quantities above 1e-300.
void fit_near_optimality_order(const SweepReport& report, double value, NearOptReport& out);

NearOptReport near_optimality_report(const ControlGrid& u, const SweepReport& report,
                                     const DiagnosticContext& ctx, double value);

} // namespace sica
