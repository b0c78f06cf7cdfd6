#include "sica/adjoint.hpp"
#include "sica/errors.hpp"
#include "sica/fbsm.hpp"

#include "support/oracles.hpp"
#include "support/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sica;
using namespace sica::testkit;

TEST(TerminalAdjoint, NegativeTerminalGradient) {
    EXPECT_EQ(terminal_adjoint(demo_x0(), CostWeights(1, 1, 1, 1, 2.5)), (Vec4{-0.0, -2.5, -0.0, -2.5}));
    EXPECT_EQ(terminal_adjoint({}, CostWeights(1, 1, 1, 1, 0)), (Vec4{}));
}

TEST(AdjointPath, ZeroWeightsGiveZeroCostates) {
    const TimeGrid g(5.0, 50);
    const auto u = midpoint_control(g, 0, 1);
    const auto p = demo_params();
    const CostWeights w(0, 0, 0, 1, 0);
    const Ensemble e = simulate_ensemble(demo_x0(), u, p, 6, 1);
    for (AdjointMode mode : {AdjointMode::CertaintyEquivalent, AdjointMode::Regression})
        for (const auto& adj : adjoint_ensemble(e, u, p, w, mode)) {
            for (const auto& v : adj.p)
                EXPECT_EQ(v, (Vec4{}));
            for (const auto& v : adj.q)
                EXPECT_EQ(v, (Vec4{}));
        }
}

TEST(AdjointPath, OneStepHandCheck) {
    // Single cell with zero drift and noise: H_x = -(0, w_I, w_C, w_A).
    const TimeGrid g(0.5, 1);
    const auto u = ControlGrid::constant(g, 0.3, 0, 1);
    const CostWeights w(1, 0.5, 2, 1, 3);
    const auto traj = simulate_path(demo_x0(), u, ParameterSet{Rates{}}, sample_brownian(g, 0), g);
    const auto adj = adjoint_backward_path(traj, u, ParameterSet{Rates{}}, w);
    ASSERT_EQ(adj.p.size(), 2u);
    EXPECT_EQ(adj.p[1], (Vec4{0, -3, 0, -3}));
    EXPECT_EQ(adj.last_cell_costate, (Vec4{0, -3.25, -0.125, -3.5}));
    EXPECT_EQ(adj.p[0], (Vec4{0, -3.75, -0.375, -4.5}));
    EXPECT_EQ(adj.mode, AdjointMode::CertaintyEquivalent);
}

TEST(AdjointPath, CertaintyEquivalentHasZeroDiffusionCostate) {
    const TimeGrid g(5.0, 50);
    const auto u = midpoint_control(g, 0, 1);
    const auto p = demo_params();
    const Ensemble e = simulate_ensemble(demo_x0(), u, p, 4, 1);
    for (const auto& adj : adjoint_ensemble(e, u, p, demo_weights()))
        for (const auto& v : adj.q)
            EXPECT_EQ(v, (Vec4{}));
}

TEST(AdjointPath, RegressionModeUsesOnlyFirstTwoComponents) {
    const TimeGrid g(5.0, 50);
    const auto u = midpoint_control(g, 0, 1);
    const auto p = demo_params().with(&Rates::noise_intensity, 1.0);
    const Ensemble e = simulate_ensemble(demo_x0(), u, p, 64, 1);
    const auto adj = adjoint_ensemble(e, u, p, demo_weights(), AdjointMode::Regression);
    bool any_nonzero = false;
    for (const auto& a : adj) {
        EXPECT_EQ(a.mode, AdjointMode::Regression);
        for (const auto& v : a.q) {
            EXPECT_EQ(v[2], 0.0);
            EXPECT_EQ(v[3], 0.0);
            any_nonzero = any_nonzero || v[0] != 0.0 || v[1] != 0.0;
        }
        EXPECT_EQ(a.q.back(), (Vec4{}));
    }
    EXPECT_TRUE(any_nonzero);
    // q is a cross-ensemble quantity, identical on every path.
    EXPECT_EQ(adj.front().q, adj.back().q);
}

TEST(AdjointPath, RegressionRecoversKnownSlope) {
    // Synthetic co-states with p increments equal to 2*dB + noise-free offset.
    const TimeGrid g(1.0, 3);
    Ensemble e;
    std::vector<AdjointPath> ce;
    for (std::size_t k = 0; k < 5; ++k) {
        BrownianPath w{{0.1 * k, -0.2 * k, 0.3}, 0};
        AdjointPath a;
        a.p.assign(4, Vec4{});
        for (std::size_t n = 0; n < 3; ++n) {
            a.p[n + 1] = a.p[n];
            a.p[n + 1][0] += 2.0 * w.increments[n] + 1.0;
            a.p[n + 1][1] += -1.0 * w.increments[n];
        }
        e.noise.push_back(w);
        e.paths.push_back({std::vector<StatePoint>(4), 0});
        ce.push_back(a);
    }
    const auto q = regress_diffusion_costate(e, ce);
    ASSERT_EQ(q.size(), 4u);
    EXPECT_NEAR(q[0][0], 2.0, 1e-12);
    EXPECT_NEAR(q[0][1], -1.0, 1e-12);
    EXPECT_NEAR(q[1][0], 2.0, 1e-12);
    // Constant increments across the ensemble carry no slope information.
    EXPECT_EQ(q[2], (Vec4{}));
    EXPECT_EQ(q[3], (Vec4{}));
}

TEST(AdjointPath, MatchesContinuousOracleAsStepShrinks) {
    const ParameterSet p = deterministic(demo_params());
    const CostWeights w = demo_weights();
    const TimeGrid coarse(20.0, 40);
    std::vector<double> cells(40);
    for (std::size_t i = 0; i < cells.size(); ++i)
        cells[i] = 0.5 + 0.4 * std::sin(0.3 * static_cast<double>(i));
    const ControlGrid u_coarse(coarse, cells, 0, 1);
    const Vec4 oracle = rk4_backward_costate(demo_x0(), u_coarse, p, w, 50);

    const std::size_t refine = 1000;
    const TimeGrid fine(20.0, 40 * refine);
    std::vector<double> fine_cells(fine.n_steps());
    for (std::size_t i = 0; i < fine_cells.size(); ++i)
        fine_cells[i] = cells[i / refine];
    const ControlGrid u(fine, fine_cells, 0, 1);
    const auto traj = simulate_path(demo_x0(), u, p, sample_brownian(fine, 0), fine);
    const auto adj = adjoint_backward_path(traj, u, p, w);
    double scale = 0;
    for (double v : oracle)
        scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_LE(std::abs(adj.p[0][i] - oracle[i]) / scale, 1e-4) << "component " << i;
}

TEST(AdjointPath, GradientMatchesFiniteDifferences) {
    const ParameterSet p = deterministic(demo_params());
    const CostWeights w = demo_weights();
    const TimeGrid g(20.0, 50);
    std::vector<double> cells(50);
    for (std::size_t i = 0; i < cells.size(); ++i)
        cells[i] = 0.5 + 0.3 * std::cos(0.2 * static_cast<double>(i));
    const ControlGrid u(g, cells, 0, 1);
    const Ensemble e = simulate_ensemble(demo_x0(), u, p, 1, 0);
    const auto adj = adjoint_ensemble(e, u, p, w);
    const auto grad = cost_gradient(e, u, adj, p, w);
    const auto fd = finite_difference_gradient(u, p, demo_x0(), w, 1e-5);
    for (std::size_t i = 0; i < grad.size(); ++i)
        EXPECT_LE(floored_relative_error(grad[i], fd[i], 1e-3, 1e-8), 1e-3) << "cell " << i;
}

TEST(AdjointPath, RejectsMismatchedInputs) {
    const TimeGrid g(1.0, 10);
    const auto u = midpoint_control(g, 0, 1);
    TrajectoryPath short_path{std::vector<StatePoint>(5), 0};
    EXPECT_THROW(adjoint_backward_path(short_path, u, demo_params(), demo_weights()), DomainError);
    const TrajectoryPath ok{std::vector<StatePoint>(11, demo_x0()), 0};
    const std::vector<Vec4> bad_q(3);
    EXPECT_THROW(adjoint_backward_path(ok, u, demo_params(), demo_weights(), bad_q), DomainError);
}

TEST(AdjointPath, BlowUpReportsNode) {
    const TimeGrid g(1.0, 10);
    const auto u = midpoint_control(g, 0, 1);
    Rates r;
    r.transmission = 1e308;
    const TrajectoryPath traj{std::vector<StatePoint>(11, StatePoint{1e10, 1e10, 0, 0}), 0};
    try {
        adjoint_backward_path(traj, u, ParameterSet(r), demo_weights());
        FAIL();
    } catch (const AdjointError& e) {
        EXPECT_LT(e.node(), 10u);
    }
}

TEST(MomentCheck, HandValues) {
    AdjointPath a;
    a.dt = 0.5;
    a.p = {{1, -2, 0, 0}, {0, 3, 0, 1}};
    a.q = {{1, 0, 0, 0}, {0, 2, 0, 0}};
    const auto [sup_p, int_q] = adjoint_moment_check({a});
    EXPECT_EQ(sup_p.mean, 1 + 9 + 0 + 1);
    EXPECT_EQ(int_q.mean, 0.25 * (1 + 4));
    EXPECT_THROW(adjoint_moment_check({}), DomainError);
}

TEST(MomentCheck, StableUnderRefinement) {
    const auto p = demo_params();
    const auto w = demo_weights();
    std::vector<double> sups;
    for (std::size_t n : {100u, 400u}) {
        const TimeGrid g(20.0, n);
        const auto u = midpoint_control(g, 0, 1);
        const Ensemble e = simulate_ensemble(demo_x0(), u, p, 50, 3);
        const auto [sp, iq] = adjoint_moment_check(adjoint_ensemble(e, u, p, w, AdjointMode::Regression));
        EXPECT_TRUE(std::isfinite(sp.mean));
        EXPECT_TRUE(std::isfinite(iq.mean));
        sups.push_back(sp.mean);
    }
    EXPECT_NEAR(sups[0], sups[1], 0.1 * sups[1]);
}
