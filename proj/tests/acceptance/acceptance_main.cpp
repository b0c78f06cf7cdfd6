// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "commands.hpp"

#include "support/oracles.hpp"
#include "support/random.hpp"
#include "support/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sica;
using namespace sica::testkit;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome conservation() {
    Gen gen(1);
    double worst = 0.0;
    bool diffusion_ok = true;
    for (int i = 0; i < 10000; ++i) {
        const ParameterSet p = gen.params();
        const StatePoint x = gen.state(gen.uniform(0.01, 100.0));
        const double u = gen.uniform(0, 1);
        const Vec4 f = drift(x, u, p);
        const auto& r = p.rates();
        const double expected = r.recruitment - r.natural_death * x.total() - r.aids_death * x.A;
        const double sum = f[0] + f[1] + f[2] + f[3];
        double scale = std::abs(r.recruitment) + std::abs(r.natural_death * x.total()) + std::abs(r.aids_death * x.A);
        for (double c : f)
            scale = std::max(scale, std::abs(c));
        worst = std::max(worst, std::abs(sum - expected) / std::max(scale, 1e-300));
        const Vec4 s = diffusion(x, p);
        diffusion_ok = diffusion_ok && s[0] + s[1] == 0.0 && s[2] == 0.0 && s[3] == 0.0;
    }
    return {worst <= 1e-12 && diffusion_ok,
            "max rel err " + num(worst) + ", diffusion exact " + (diffusion_ok ? "yes" : "no")};
}

Outcome realization() {
    bool ok = realize({1, 4}, 0.5) == 2.0;
    Gen gen(2);
    for (int i = 0; i < 100; ++i) {
        const IntervalNumber a = gen.positive_interval();
        ok = ok && realize(a, 0.0) == a.lower() && realize(a, 1.0) == a.upper();
        double prev = realize(a, 0.0);
        for (int j = 1; j <= 50; ++j) {
            const double v = realize(a, j / 50.0);
            ok = ok && v >= prev;
            prev = v;
        }
    }
    return {ok, "endpoints, [1,4] at k=0.5 -> 2, 100 monotone intervals"};
}

Outcome deterministic_reduction() {
    const ParameterSet p = deterministic(demo_params());
    const TimeGrid g(50.0, 50000);
    const auto u = ControlGrid::constant(g, 0.0, 0, 1);
    const auto path = simulate_path(demo_x0(), u, p, sample_brownian(g, 1), g);
    const TimeGrid coarse(50.0, 500);
    const auto ref = rk4_forward(demo_x0(), ControlGrid::constant(coarse, 0.0, 0, 1), p.rates(), 10000);
    const Vec4 a = path.states.back().as_array();
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        worst = std::max(worst, std::abs(a[i] - ref.back()[i]) / std::abs(ref.back()[i]));
    return {worst <= 1e-4, "max component rel err at T " + num(worst)};
}

Outcome omega_containment() {
    const ParameterSet p = demo_params();
    const OmegaBounds b = omega_bounds(p);
    const StatePoint x0 = demo_x0();
    if (!in_omega(x0, b, 0.0))
        return {false, "x0 outside Omega"};
    const Ensemble e = simulate_ensemble(x0, midpoint_control(demo_grid(), 0, 1), p, 1000, 20240917);
    const double tol = 0.01 * b.n_high;
    std::size_t bad = 0, total = 0;
    for (const auto& path : e.paths)
        for (const auto& x : path.states) {
            ++total;
            bad += in_omega(x, b, tol) ? 0 : 1;
        }
    const double fraction = static_cast<double>(bad) / static_cast<double>(total);
    return {fraction <= 0.01, "violation fraction " + num(fraction)};
}

Outcome gradient_check() {
    const ParameterSet p = deterministic(demo_params());
    const CostWeights w = demo_weights();
    const TimeGrid g(20.0, 50);
    std::vector<double> cells(50);
    for (std::size_t i = 0; i < cells.size(); ++i)
        cells[i] = 0.5 + 0.3 * std::sin(0.37 * static_cast<double>(i));
    const ControlGrid u(g, cells, 0, 1);
    const Ensemble e = simulate_ensemble(demo_x0(), u, p, 1, 0);
    const auto grad = cost_gradient(e, u, adjoint_ensemble(e, u, p, w), p, w);
    const auto fd = finite_difference_gradient(u, p, demo_x0(), w, 1e-5);
    double worst = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i)
        worst = std::max(worst, floored_relative_error(grad[i], fd[i], 1e-3, 1e-8));
    return {worst <= 1e-3, "max floored rel err " + num(worst)};
}

Outcome fbsm_fixed_point() {
    const ParameterSet p = deterministic(demo_params());
    const CostWeights w = demo_weights();
    SweepConfig cfg;
    cfg.n_paths = 1;
    const auto res = fbsm_optimize(demo_x0(), p, w, midpoint_control(demo_grid(), 0, 1), cfg);
    const auto s = analyse_control(demo_x0(), res.control, p, w, cfg);
    const double tol = default_cell_tol(res.control);
    std::size_t ok = 0;
    for (std::size_t n = 0; n < res.control.size(); ++n)
        ok += std::abs(s.candidate[n] - res.control[n]) <= tol ? 1 : 0;
    const double share = static_cast<double>(ok) / static_cast<double>(res.control.size());
    DiagnosticContext ctx{demo_x0(), p, w, cfg};
    const double residual = necessary_condition_residual(res.control, ctx);
    const double bound = 1e-3 * (1 + std::abs(s.J.mean));
    return {res.report.converged && res.report.iterations <= 200 && share >= 0.99 && residual <= bound,
            std::to_string(res.report.iterations) + " iterations, argmax share " + num(share) + ", residual " +
                num(residual) + " (bound " + num(bound) + ")"};
}

Outcome lipschitz_trend() {
    const std::vector<double> scales{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
    SweepConfig cfg;
    cfg.n_paths = 200;
    const auto u = midpoint_control(demo_grid(), 0, 1);
    const DiagnosticContext ctx{demo_x0(), demo_params(), demo_weights(), cfg};
    const auto est = state_lipschitz_estimate(u, scales, 1.0, 0.5, ctx);
    DiagnosticContext off = ctx;
    off.params = ctx.params.with(&Rates::control_efficacy, 0.0);
    const auto zero = state_lipschitz_estimate(u, scales, 1.0, 0.5, off);
    return {est.monotone && !est.all_zero && zero.all_zero,
            "monotone " + std::string(est.monotone ? "yes" : "no") + ", slope " + num(est.slope) +
                ", m=0 all zero " + (zero.all_zero ? "yes" : "no")};
}

Outcome metric_axioms() {
    Gen gen(8);
    const TimeGrid g(20.0, 400);
    bool ok = true;
    for (int t = 0; t < 100; ++t) {
        auto draw = [&] {
            std::vector<double> v(g.n_steps());
            for (double& c : v)
                c = gen.integer(0, 2) == 0 ? 0.25 : gen.uniform(0, 1);
            return ControlGrid(g, v, 0, 1);
        };
        const auto a = draw(), b = draw(), c = draw();
        const double tol = default_cell_tol(a);
        ok = ok && control_metric(a, a, tol) == 0.0 && control_metric(a, b, tol) == control_metric(b, a, tol) &&
             control_metric(a, c, tol) <= control_metric(a, b, tol) + control_metric(b, c, tol);
    }
    return {ok, "100 random triples"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome reproducibility() {
    const fs::path root = fs::temp_directory_path() / "sica_acceptance_repro";
    fs::remove_all(root);
    std::ostringstream log;
    const char* runs[] = {"first", "second", "threads8"};
    for (const char* name : runs) {
        cli::CommandOptions o;
        o.config = fs::path(SICA_SOURCE_DIR) / "configs" / "demo.json";
        o.out = root / name;
        o.threads = std::string(name) == "threads8" ? 8 : 1;
        if (cli::cmd_simulate(o, log) != cli::kOk || cli::cmd_optimize(o, log) != cli::kOk)
            return {false, "command failed: " + log.str()};
    }
    std::size_t compared = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "first")) {
        if (!entry.is_regular_file())
            continue;
        const fs::path rel = fs::relative(entry.path(), root / "first");
        const std::string a = slurp(entry.path());
        if (a != slurp(root / "second" / rel) || a != slurp(root / "threads8" / rel))
            return {false, "mismatch in " + rel.string()};
        ++compared;
    }
    return {compared > 0, std::to_string(compared) + " files byte-identical across 3 runs"};
}

Outcome k_sweep_coherence() {
    SweepConfig cfg;
    cfg.n_paths = 50;
    const DiagnosticContext ctx{demo_x0(), demo_params(), demo_weights(), cfg};
    const auto u0 = midpoint_control(demo_grid(), 0, 1);
    const std::vector<double> ks{0.0, 0.25, 0.5, 0.75, 1.0};

    const auto flat = k_sweep(degenerate_set(demo_params().rates()), ks, ctx, u0);
    bool identical = true;
    for (const auto& row : flat) {
        KSweepRow a = row, b = flat.front();
        a.k = b.k = 0.0;
        identical = identical && a == b;
    }

    const auto rows = k_sweep(demo_imprecise(), {0.0, 1.0}, ctx, u0);
    const ParameterSet lo(lower_endpoints(demo_imprecise()));
    const ParameterSet hi(upper_endpoints(demo_imprecise()));
    const bool ends = rows[0] == summarize_run(0.0, lo, fbsm_optimize(ctx.x0, lo, ctx.weights, u0, cfg)) &&
                      rows[1] == summarize_run(1.0, hi, fbsm_optimize(ctx.x0, hi, ctx.weights, u0, cfg));
    return {identical && ends, std::string("degenerate rows identical ") + (identical ? "yes" : "no") +
                                   ", endpoint rows exact " + (ends ? "yes" : "no")};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "drift conservation and diffusion structure", 1, conservation},
        {2, "interval realization", 1, realization},
        {3, "deterministic reduction against RK4", 30, deterministic_reduction},
        {4, "Omega containment", 60, omega_containment},
        {5, "adjoint gradient check", 60, gradient_check},
        {6, "FBSM fixed point and residual", 300, fbsm_fixed_point},
        {7, "state Lipschitz trend", 300, lipschitz_trend},
        {8, "control metric axioms", 1, metric_axioms},
        {9, "CLI reproducibility", 120, reproducibility},
        {10, "k-sweep coherence", 300, k_sweep_coherence},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.passed && in_time;
        failures += pass ? 0 : 1;
        std::printf("[%s] criterion %2d: %s -- %s; %.2fs (budget %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
