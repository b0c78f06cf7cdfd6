#include "sica/fbsm.hpp"

#include "sica/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sica {

void SweepConfig::validate() const {
    if (!(rho > 0.0 && rho <= 1.0))
        throw DomainError("sweep rho must lie in (0, 1]");
    if (max_iters == 0)
        throw DomainError("sweep max_iters must be >= 1");
    if (!(tolerance > 0.0))
        throw DomainError("sweep tolerance must be > 0");
    if (n_paths == 0)
        throw DomainError("sweep n_paths must be >= 1");
    if (n_starts == 0)
        throw DomainError("sweep n_starts must be >= 1");
}

SweepState analyse_control(const StatePoint& x0, const ControlGrid& u, const ParameterSet& p,
                           const CostWeights& w, const SweepConfig& cfg) {
    SweepState s{simulate_ensemble(x0, u, p, cfg.n_paths, cfg.base_seed, cfg.threads), {}, {}, {}, {}};
    s.J = estimate_J(s.ensemble, u, w);
    s.adjoints = adjoint_ensemble(s.ensemble, u, p, w, cfg.adjoint_mode, cfg.threads);

    const std::size_t cells = u.size();
    s.gains.assign(cells, 0.0);
    for (std::size_t k = 0; k < s.ensemble.size(); ++k)
        for (std::size_t n = 0; n < cells; ++n)
            s.gains[n] += switching_gain(s.ensemble.paths[k].states[n],
                                         s.adjoints[k].costate_for_cell(n), p);
    s.candidate.resize(cells);
    for (std::size_t n = 0; n < cells; ++n) {
        s.gains[n] /= static_cast<double>(s.ensemble.size());
        s.candidate[n] = argmax_from_gain(s.gains[n], w.w_u(), u.u_lo(), u.u_hi());
    }
    return s;
}

double separable_residual(const ControlGrid& u, const std::vector<double>& gains,
                          const CostWeights& w) {
    if (gains.size() != u.size())
        throw DomainError("one switching gain per control cell required");
    const double dt = u.grid().dt();
    const double wu = w.w_u();
    double total = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double v = argmax_from_gain(gains[n], wu, u.u_lo(), u.u_hi());
        const double du = u[n] - v;
        // (w_u/2)(u-v)^2 + (w_u v - g)(u - v); the second factor is >= 0 at the
        // constrained minimizer v.
        const double gap = 0.5 * wu * du * du + std::max(0.0, (wu * v - gains[n]) * du);
        total += dt * gap;
    }
    return total;
}

ControlGrid midpoint_control(const TimeGrid& grid, double u_lo, double u_hi) {
    return ControlGrid::constant(grid, 0.5 * (u_lo + u_hi), u_lo, u_hi);
}

namespace {

SweepState analyse_or_throw(const StatePoint& x0, const ControlGrid& u, const ParameterSet& p,
                            const CostWeights& w, const SweepConfig& cfg, std::size_t iteration) {
    try {
        SweepState s = analyse_control(x0, u, p, w, cfg);
        if (!std::isfinite(s.J.mean))
            throw OptimizationError(iteration, "non-finite cost estimate");
        return s;
    } catch (const AdjointError& e) {
        throw OptimizationError(iteration, e.what());
    }
}

} // namespace

SweepResult fbsm_optimize(const StatePoint& x0, const ParameterSet& p, const CostWeights& w,
                          const ControlGrid& initial, const SweepConfig& cfg) {
    cfg.validate();
    const double cell_tol = cfg.cell_tol >= 0.0 ? cfg.cell_tol : default_cell_tol(initial);
    constexpr int kMaxHalvings = 30;

    ControlGrid u = initial;
    SweepReport report;
    SweepState state = analyse_or_throw(x0, u, p, w, cfg, 0);

    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        const ControlGrid candidate = u.with_values(state.candidate);
        const double d = control_metric(candidate, u, cell_tol);
        double max_diff = 0.0;
        for (std::size_t n = 0; n < u.size(); ++n)
            max_diff = std::max(max_diff, std::abs(candidate[n] - u[n]));

        report.iterations = it + 1;
        report.J_history.push_back(state.J);
        report.d_history.push_back(d);
        report.residual_history.push_back(separable_residual(u, state.gains, w));
        report.residual = max_diff;
        if (d <= cfg.tolerance) {
            report.converged = true;
            break;
        }
        if (it + 1 == cfg.max_iters)
            break;

        double rho = cfg.rho;
        for (int halving = 0;; ++halving) {
            std::vector<double> next(u.size());
            for (std::size_t n = 0; n < u.size(); ++n)
                next[n] = u.clamp((1.0 - rho) * u[n] + rho * candidate[n]);
            ControlGrid trial = u.with_values(std::move(next));
            SweepState trial_state = analyse_or_throw(x0, trial, p, w, cfg, it + 1);
            const double slack = 2.0 * std::max(state.J.std_error, trial_state.J.std_error) +
                                 1e-12 * (1.0 + std::abs(state.J.mean));
            if (trial_state.J.mean <= state.J.mean + slack || halving == kMaxHalvings) {
                u = std::move(trial);
                state = std::move(trial_state);
                break;
            }
            rho *= 0.5;
        }
        report.rho_history.push_back(rho);
    }
    return {std::move(u), std::move(report)};
}

std::vector<double> multistart_levels(std::size_t n_starts, double u_lo, double u_hi) {
    std::vector<double> fractions{0.5, 0.0, 1.0};
    for (std::size_t denom = 4; fractions.size() < n_starts; denom *= 2)
        for (std::size_t num = 1; num < denom && fractions.size() < n_starts; num += 2)
            fractions.push_back(static_cast<double>(num) / static_cast<double>(denom));
    fractions.resize(n_starts);
    std::vector<double> levels;
    levels.reserve(n_starts);
    for (double f : fractions)
        levels.push_back(f == 0.5 ? 0.5 * (u_lo + u_hi) : u_lo + f * (u_hi - u_lo));
    return levels;
}

MultistartResult multistart_value_estimate(const StatePoint& x0, const ParameterSet& p,
                                           const CostWeights& w, const ControlGrid& shape,
                                           const SweepConfig& cfg, std::size_t n_starts) {
    if (n_starts == 0)
        throw DomainError("multistart needs n_starts >= 1");
    MultistartResult out;
    out.start_levels = multistart_levels(n_starts, shape.u_lo(), shape.u_hi());
    for (std::size_t j = 0; j < n_starts; ++j) {
        const ControlGrid start =
            ControlGrid::constant(shape.grid(), out.start_levels[j], shape.u_lo(), shape.u_hi());
        out.runs.push_back(fbsm_optimize(x0, p, w, start, cfg));
        const double value = out.runs.back().report.J_history.back().mean;
        if (j == 0 || value < out.value) {
            out.value = value;
            out.best_start = j;
        }
    }
    return out;
}

} // namespace sica
