#include "sica/adjoint.hpp"

#include "sica/errors.hpp"
#include "sica/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace sica {

namespace {

bool all_finite(const Vec4& v) noexcept {
    return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

} // namespace

Vec4 terminal_adjoint(const StatePoint& /*xT*/, const CostWeights& w) noexcept {
    const Vec4 g = terminal_cost_gradient(w);
    return {-g[0], -g[1], -g[2], -g[3]};
}

AdjointPath adjoint_backward_path(const TrajectoryPath& traj, const ControlGrid& ctrl,
                                  const ParameterSet& p, const CostWeights& w,
                                  std::span<const Vec4> q_nodes) {
    const std::size_t n_steps = ctrl.size();
    if (traj.states.size() != n_steps + 1)
        throw DomainError("trajectory and control are on different grids");
    if (!q_nodes.empty() && q_nodes.size() != n_steps + 1)
        throw DomainError("diffusion co-state has the wrong number of nodes");

    const double dt = ctrl.grid().dt();
    AdjointPath adj;
    adj.dt = dt;
    adj.mode = q_nodes.empty() ? AdjointMode::CertaintyEquivalent : AdjointMode::Regression;
    adj.p.resize(n_steps + 1);
    adj.q.assign(n_steps + 1, Vec4{});
    if (!q_nodes.empty())
        std::copy(q_nodes.begin(), q_nodes.end(), adj.q.begin());
    for (auto& q : adj.q)
        q[2] = q[3] = 0.0;

    adj.p[n_steps] = terminal_adjoint(traj.states.back(), w);
    const Vec4 grad_l = running_cost_gradient(w);
    adj.last_cell_costate = adj.p[n_steps];
    for (std::size_t i = 0; i < 4; ++i)
        adj.last_cell_costate[i] -= 0.5 * dt * grad_l[i];

    for (std::size_t n = n_steps; n-- > 0;) {
        const Vec4& next = adj.costate_for_cell(n);
        const Vec4 hx = hamiltonian_dx(traj.states[n], ctrl[n], next, adj.q[n], p, w);
        for (std::size_t i = 0; i < 4; ++i)
            adj.p[n][i] = next[i] + dt * hx[i];
        if (!all_finite(adj.p[n]))
            throw AdjointError(n);
    }
    return adj;
}

std::vector<Vec4> regress_diffusion_costate(const Ensemble& e, const std::vector<AdjointPath>& ce) {
    if (e.size() != ce.size() || e.paths.empty())
        throw DomainError("regression needs one co-state path per ensemble path");
    const std::size_t n_steps = e.noise.front().increments.size();
    std::vector<Vec4> q(n_steps + 1, Vec4{});
    const std::size_t m = e.size();
    if (m < 2)
        return q;
    const auto count = static_cast<double>(m);
    for (std::size_t n = 0; n < n_steps; ++n) {
        double mean_b = 0.0;
        Vec4 mean_dp{};
        for (std::size_t k = 0; k < m; ++k) {
            mean_b += e.noise[k].increments[n];
            for (std::size_t i = 0; i < 2; ++i)
                mean_dp[i] += ce[k].p[n + 1][i] - ce[k].p[n][i];
        }
        mean_b /= count;
        for (double& v : mean_dp)
            v /= count;
        double sbb = 0.0;
        Vec4 sbp{};
        for (std::size_t k = 0; k < m; ++k) {
            const double db = e.noise[k].increments[n] - mean_b;
            sbb += db * db;
            for (std::size_t i = 0; i < 2; ++i)
                sbp[i] += db * (ce[k].p[n + 1][i] - ce[k].p[n][i] - mean_dp[i]);
        }
        if (sbb > 0.0)
            for (std::size_t i = 0; i < 2; ++i)
                q[n][i] = sbp[i] / sbb;
    }
    return q;
}

std::vector<AdjointPath> adjoint_ensemble(const Ensemble& e, const ControlGrid& ctrl,
                                          const ParameterSet& p, const CostWeights& w,
                                          AdjointMode mode, std::size_t threads) {
    std::vector<AdjointPath> out(e.size());
    parallel_for(e.size(), threads, [&](std::size_t k) {
        out[k] = adjoint_backward_path(e.paths[k], ctrl, p, w);
    });
    if (mode == AdjointMode::CertaintyEquivalent)
        return out;

    const std::vector<Vec4> q = regress_diffusion_costate(e, out);
    parallel_for(e.size(), threads, [&](std::size_t k) {
        out[k] = adjoint_backward_path(e.paths[k], ctrl, p, w, q);
    });
    return out;
}

std::vector<double> cost_gradient(const TrajectoryPath& traj, const ControlGrid& ctrl,
                                  const AdjointPath& adj, const ParameterSet& p,
                                  const CostWeights& w) {
    std::vector<double> g(ctrl.size());
    const double dt = ctrl.grid().dt();
    for (std::size_t n = 0; n < ctrl.size(); ++n)
        g[n] = -dt * hamiltonian_du(traj.states[n], adj.costate_for_cell(n), p, w, ctrl[n]);
    return g;
}

std::vector<double> cost_gradient(const Ensemble& e, const ControlGrid& ctrl,
                                  const std::vector<AdjointPath>& adj, const ParameterSet& p,
                                  const CostWeights& w) {
    if (e.size() != adj.size() || e.paths.empty())
        throw DomainError("gradient needs one co-state path per ensemble path");
    std::vector<double> g(ctrl.size(), 0.0);
    for (std::size_t k = 0; k < e.size(); ++k) {
        const auto gk = cost_gradient(e.paths[k], ctrl, adj[k], p, w);
        for (std::size_t n = 0; n < g.size(); ++n)
            g[n] += gk[n];
    }
    for (double& v : g)
        v /= static_cast<double>(e.size());
    return g;
}

std::pair<Estimate, Estimate> adjoint_moment_check(const std::vector<AdjointPath>& adjoints) {
    if (adjoints.empty())
        throw DomainError("adjoint moment check needs at least one path");
    std::vector<double> sup_p;
    std::vector<double> int_q;
    sup_p.reserve(adjoints.size());
    int_q.reserve(adjoints.size());
    for (const auto& adj : adjoints) {
        double sp = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            double sup = 0.0;
            for (const auto& v : adj.p)
                sup = std::max(sup, v[i] * v[i]);
            sp += sup;
        }
        double iq = 0.0;
        for (std::size_t n = 0; n + 1 < adj.q.size(); ++n) {
            const double a = adj.q[n][0] * adj.q[n][0] + adj.q[n][1] * adj.q[n][1];
            const double b = adj.q[n + 1][0] * adj.q[n + 1][0] + adj.q[n + 1][1] * adj.q[n + 1][1];
            iq += 0.5 * adj.dt * (a + b);
        }
        sup_p.push_back(sp);
        int_q.push_back(iq);
    }
    return {estimate_from_samples(sup_p), estimate_from_samples(int_q)};
}

} // namespace sica
