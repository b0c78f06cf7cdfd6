#include "sica/diagnostics.hpp"

#include "sica/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sica {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    if (x.size() < 2)
        return {};
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0)
        return {};
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

} // namespace

double epsilon_optimality_gap(const ControlGrid& u, const DiagnosticContext& ctx, double value) {
    const Estimate J = estimate_J(u, ctx.params, ctx.x0, ctx.weights, ctx.sweep.n_paths,
                                  ctx.sweep.base_seed, ctx.sweep.threads);
    return std::abs(J.mean - value);
}

double necessary_condition_residual(const ControlGrid& u, const DiagnosticContext& ctx) {
    const SweepState s = analyse_control(ctx.x0, u, ctx.params, ctx.weights, ctx.sweep);
    return separable_residual(u, s.gains, ctx.weights);
}

SufficientCheck sufficient_condition_check(const ControlGrid& u, const DiagnosticContext& ctx,
                                           double epsilon) {
    if (!(epsilon >= 0.0))
        throw DomainError("epsilon must be >= 0");
    SufficientCheck c;
    c.residual = necessary_condition_residual(u, ctx);
    c.satisfied = c.residual <= epsilon;
    c.implied_bound_raw = std::cbrt(epsilon);
    return c;
}

ControlGrid flip_prefix(const ControlGrid& u_base, double scale) {
    std::vector<double> v(u_base.values().begin(), u_base.values().end());
    const auto flips = static_cast<std::size_t>(std::llround(scale * static_cast<double>(v.size())));
    const double mid = 0.5 * (u_base.u_lo() + u_base.u_hi());
    for (std::size_t i = 0; i < std::min(flips, v.size()); ++i)
        v[i] = v[i] >= mid ? u_base.u_lo() : u_base.u_hi();
    return u_base.with_values(std::move(v));
}

LipschitzEstimate state_lipschitz_estimate(const ControlGrid& u_base,
                                           const std::vector<double>& scales, double theta,
                                           double k, const DiagnosticContext& ctx) {
    if (scales.size() < 3)
        throw DomainError("Lipschitz estimate needs at least 3 scales");
    if (!(k > 0.0 && k < 1.0) || !(theta >= 0.0) || !(k * theta < 1.0))
        throw DomainError("Lipschitz estimate needs 0 < k < 1 and k * theta < 1");
    for (double s : scales)
        if (!(s > 0.0 && s <= 1.0))
            throw DomainError("perturbation scales must lie in (0, 1]");

    const auto& cfg = ctx.sweep;
    const Ensemble base = simulate_ensemble(ctx.x0, u_base, ctx.params, cfg.n_paths, cfg.base_seed,
                                            cfg.threads);
    LipschitzEstimate out;
    for (double s : scales) {
        const ControlGrid other = flip_prefix(u_base, s);
        const Ensemble pert = simulate_ensemble(ctx.x0, other, ctx.params, cfg.n_paths,
                                                cfg.base_seed, cfg.threads);
        double moment = 0.0;
        for (std::size_t c = 0; c < 4; ++c) {
            double component = 0.0;
            for (std::size_t j = 0; j < base.size(); ++j) {
                double sup = 0.0;
                const auto& a = base.paths[j].states;
                const auto& b = pert.paths[j].states;
                for (std::size_t n = 0; n < a.size(); ++n)
                    sup = std::max(sup, std::abs(a[n].as_array()[c] - b[n].as_array()[c]));
                component += std::pow(sup, 2.0 * theta);
            }
            moment += component / static_cast<double>(base.size());
        }
        out.points.push_back({s, control_metric(u_base, other, 0.0), moment});
    }

    std::vector<LipschitzPoint> sorted = out.points;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.distance < b.distance; });
    out.monotone = true;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].moment < sorted[i - 1].moment)
            out.monotone = false;
    out.all_zero = std::all_of(out.points.begin(), out.points.end(),
                               [](const auto& pt) { return pt.moment == 0.0; });

    std::vector<double> lx, ly;
    for (const auto& pt : out.points) {
        if (pt.moment > 0.0 && pt.distance > 0.0) {
            lx.push_back(std::log(pt.distance));
            ly.push_back(std::log(pt.moment));
        }
    }
    const LineFit fit = least_squares(lx, ly);
    out.slope = fit.slope;
    out.r2 = fit.r2;
    if (!lx.empty()) {
        out.envelope_log_bound = ly[0] - k * theta * lx[0];
        for (std::size_t i = 1; i < lx.size(); ++i)
            out.envelope_log_bound = std::max(out.envelope_log_bound, ly[i] - k * theta * lx[i]);
    }
    return out;
}

KSweepRow summarize_run(double k, const ParameterSet& p, const SweepResult& run) {
    const OmegaBounds b = omega_bounds(p);
    const auto values = run.control.values();
    KSweepRow row;
    row.k = k;
    row.J_mean = run.report.J_history.back().mean;
    row.J_stderr = run.report.J_history.back().std_error;
    row.omega_low = b.n_low;
    row.omega_high = b.n_high;
    row.u_mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    row.u_max = *std::max_element(values.begin(), values.end());
    row.converged = run.report.converged;
    row.iterations = run.report.iterations;
    return row;
}

std::vector<KSweepRow> k_sweep(const ImpreciseParameterSet& imprecise, const std::vector<double>& ks,
                               const DiagnosticContext& ctx, const ControlGrid& initial) {
    std::vector<KSweepRow> rows;
    rows.reserve(ks.size());
    for (double k : ks) {
        const ParameterSet p = realize_set(imprecise, k);
        rows.push_back(summarize_run(k, p, fbsm_optimize(ctx.x0, p, ctx.weights, initial, ctx.sweep)));
    }
    return rows;
}

void fit_near_optimality_order(const SweepReport& report, double value, NearOptReport& out) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < report.J_history.size(); ++i) {
        const double gap = std::abs(report.J_history[i].mean - value);
        const double res = report.residual_history[i];
        if (gap > 1e-300 && res > 1e-300) {
            lx.push_back(std::log(res));
            ly.push_back(std::log(gap));
        }
    }
    const LineFit fit = least_squares(lx, ly);
    out.order_slope = fit.slope;
    out.order_r2 = fit.r2;
}

NearOptReport near_optimality_report(const ControlGrid& u, const SweepReport& report,
                                     const DiagnosticContext& ctx, double value) {
    NearOptReport r;
    r.epsilon_gap = epsilon_optimality_gap(u, ctx, value);
    r.necessary_residual = necessary_condition_residual(u, ctx);
    r.sufficient_gap = std::cbrt(r.necessary_residual);
    fit_near_optimality_order(report, value, r);
    return r;
}

} // namespace sica
