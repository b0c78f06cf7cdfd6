#include "commands.hpp"

#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

namespace sica::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t resolve_threads(const CommandOptions& opts, std::size_t from_config) {
    if (opts.threads)
        return std::max<std::size_t>(1, *opts.threads);
    if (const char* env = std::getenv("SICA_NOC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
    }
    return from_config;
}

ScenarioConfig load(const CommandOptions& opts) {
    ScenarioConfig cfg = load_scenario(opts.config, opts.overrides);
    cfg.threads = resolve_threads(opts, cfg.threads);
    cfg.sweep.threads = cfg.threads;
    if (opts.seed)
        cfg.sweep.base_seed = *opts.seed;
    if (opts.out)
        cfg.output_dir = *opts.out;
    fs::create_directories(cfg.output_dir);
    return cfg;
}

void write_json(const fs::path& path, const json& j) {
    AtomicFileWriter w(path);
    w.stream() << j.dump(2) << '\n';
    w.commit();
}

json estimate_json(const Estimate& e) {
    return {{"mean", e.mean}, {"stderr", e.std_error}, {"n_samples", e.n_samples}};
}

json sweep_report_json(const SweepReport& r) {
    json j;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["residual"] = r.residual;
    j["J_history"] = json::array();
    for (const auto& e : r.J_history)
        j["J_history"].push_back(estimate_json(e));
    j["d_history"] = r.d_history;
    j["residual_history"] = r.residual_history;
    j["rho_history"] = r.rho_history;
    return j;
}

json nearopt_json(const NearOptReport& r) {
    return {{"epsilon_gap", r.epsilon_gap},
            {"necessary_residual", r.necessary_residual},
            {"sufficient_gap", r.sufficient_gap},
            {"order_slope", r.order_slope},
            {"order_r2", r.order_r2}};
}

DiagnosticContext context_for(const ScenarioConfig& cfg, const ParameterSet& p) {
    return {cfg.x0, p, cfg.weights, cfg.sweep};
}

// Runs `body`, mapping library exceptions onto exit codes.
int guarded(std::ostream& log, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IntegrationError& e) {
        log << "integration error: " << e.what() << '\n';
        return kIntegrationError;
    } catch (const AdjointError& e) {
        log << "integration error: " << e.what() << '\n';
        return kIntegrationError;
    } catch (const OptimizationError& e) {
        log << "optimization error: " << e.what() << '\n';
        return kIntegrationError;
    }
}

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
};

double conservation_error(const StatePoint& x, double u, const ParameterSet& p) {
    const Vec4 f = drift(x, u, p);
    const auto& r = p.rates();
    const double rhs = r.recruitment - r.natural_death * x.total() - r.aids_death * x.A;
    double scale = std::abs(r.recruitment) + std::abs(r.natural_death * x.total()) +
                   std::abs(r.aids_death * x.A);
    for (double v : f)
        scale += std::abs(v);
    const double sum = f[0] + f[1] + f[2] + f[3];
    return std::abs(sum - rhs) / std::max(scale, 1e-300);
}

} // namespace

int cmd_simulate(const CommandOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const ScenarioConfig cfg = load(opts);
        const ParameterSet p = realize_set(cfg.imprecise, cfg.k);
        const ControlGrid u = cfg.initial_control();
        const Ensemble e = simulate_ensemble(cfg.x0, u, p, cfg.simulate.n_paths,
                                             cfg.sweep.base_seed, cfg.threads);

        const OmegaBounds b = omega_bounds(p);
        const double tol = cfg.simulate.omega_tol_fraction * b.n_high;
        std::size_t nodes = 0, violations = 0, clamps = 0;
        for (const auto& path : e.paths) {
            clamps += path.clamp_events;
            for (const auto& x : path.states) {
                ++nodes;
                if (!in_omega(x, b, tol))
                    ++violations;
            }
        }
        const double fraction = static_cast<double>(violations) / static_cast<double>(nodes);

        {
            AtomicFileWriter w(cfg.output_dir / "trajectory_mean.csv");
            write_trajectory_csv(w.stream(), mean_trajectory(e), u);
            w.commit();
        }
        const fs::path dir = cfg.output_dir / "paths";
        fs::create_directories(dir);
        const std::size_t dumps = std::min(cfg.simulate.dump_paths, e.size());
        for (std::size_t i = 0; i < dumps; ++i) {
            std::ostringstream name;
            name << "path_" << std::setw(5) << std::setfill('0') << i << ".csv";
            AtomicFileWriter w(dir / name.str());
            write_trajectory_csv(w.stream(), e.paths[i].states, u);
            w.commit();
        }

        json summary;
        summary["k"] = cfg.k;
        summary["n_paths"] = e.size();
        summary["base_seed"] = cfg.sweep.base_seed;
        summary["omega_low"] = b.n_low;
        summary["omega_high"] = b.n_high;
        summary["omega_tol"] = tol;
        summary["nodes"] = nodes;
        summary["violations"] = violations;
        summary["violation_fraction"] = fraction;
        summary["max_violation_fraction"] = cfg.simulate.max_violation_fraction;
        summary["contained"] = fraction <= cfg.simulate.max_violation_fraction;
        summary["clamp_events"] = clamps;
        summary["sup_moment_theta1"] = estimate_json(empirical_sup_moment(e, 1.0));
        summary["sup_moment_theta2"] = estimate_json(empirical_sup_moment(e, 2.0));
        write_json(cfg.output_dir / "omega_summary.json", summary);
        log << "simulated " << e.size() << " paths; omega violation fraction " << fraction << '\n';
        return int{kOk};
    });
}

int cmd_optimize(const CommandOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const ScenarioConfig cfg = load(opts);
        const ParameterSet p = realize_set(cfg.imprecise, cfg.k);
        const ControlGrid initial = cfg.initial_control();
        const SweepResult run = fbsm_optimize(cfg.x0, p, cfg.weights, initial, cfg.sweep);

        const MultistartResult ms =
            multistart_value_estimate(cfg.x0, p, cfg.weights, initial, cfg.sweep, cfg.sweep.n_starts);
        const double value = std::min(ms.value, run.report.J_history.back().mean);
        const DiagnosticContext ctx = context_for(cfg, p);
        const NearOptReport near = near_optimality_report(run.control, run.report, ctx, value);

        const SweepState state = analyse_control(cfg.x0, run.control, p, cfg.weights, cfg.sweep);
        const std::size_t nodes = run.control.grid().n_nodes();
        std::vector<Vec4> p_mean(nodes, Vec4{}), q_mean(nodes, Vec4{});
        for (const auto& adj : state.adjoints)
            for (std::size_t n = 0; n < nodes; ++n)
                for (std::size_t i = 0; i < 4; ++i) {
                    p_mean[n][i] += adj.p[n][i];
                    q_mean[n][i] += adj.q[n][i];
                }
        const auto count = static_cast<double>(state.adjoints.size());
        for (std::size_t n = 0; n < nodes; ++n)
            for (std::size_t i = 0; i < 4; ++i) {
                p_mean[n][i] /= count;
                q_mean[n][i] /= count;
            }

        const bool fail_strict = opts.strict && !run.report.converged;
        AtomicFileWriter control_file(cfg.output_dir / "control.csv");
        write_control_csv(control_file.stream(), run.control);
        AtomicFileWriter adjoint_file(cfg.output_dir / "adjoint_mean.csv");
        write_adjoint_csv(adjoint_file.stream(), p_mean, q_mean, run.control.grid());
        AtomicFileWriter traj_file(cfg.output_dir / "trajectory_mean.csv");
        write_trajectory_csv(traj_file.stream(), mean_trajectory(state.ensemble), run.control);

        json report = sweep_report_json(run.report);
        report["value_estimate"] = value;
        report["multistart_levels"] = ms.start_levels;
        report["multistart_best"] = ms.best_start;
        AtomicFileWriter report_file(cfg.output_dir / "sweep_report.json");
        report_file.stream() << report.dump(2) << '\n';
        AtomicFileWriter near_file(cfg.output_dir / "nearopt_report.json");
        near_file.stream() << nearopt_json(near).dump(2) << '\n';

        if (fail_strict) {
            log << "sweep did not converge in " << run.report.iterations
                << " iterations; outputs left as .partial\n";
            return int{kNotConverged};
        }
        for (auto* f : {&control_file, &adjoint_file, &traj_file, &report_file, &near_file})
            f->commit();
        log << "sweep " << (run.report.converged ? "converged" : "stopped") << " after "
            << run.report.iterations << " iterations; J = " << run.report.J_history.back().mean
            << ", residual = " << near.necessary_residual << '\n';
        return int{kOk};
    });
}

int cmd_ksweep(const CommandOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const ScenarioConfig cfg = load(opts);
        const ParameterSet p0 = realize_set(cfg.imprecise, cfg.k);
        const auto rows = k_sweep(cfg.imprecise, cfg.k_grid, context_for(cfg, p0), cfg.initial_control());
        AtomicFileWriter w(cfg.output_dir / "ksweep.csv");
        write_ksweep_csv(w.stream(), rows);
        w.commit();
        log << "k-sweep wrote " << rows.size() << " rows\n";
        return int{kOk};
    });
}

int cmd_verify(const CommandOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const ScenarioConfig cfg = load(opts);
        const ParameterSet p = realize_set(cfg.imprecise, cfg.k);
        std::vector<Check> checks;
        std::mt19937_64 rng(cfg.sweep.base_seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        {
            double worst = 0.0;
            bool diffusion_ok = true;
            for (std::size_t i = 0; i < cfg.verify.random_checks; ++i) {
                const ParameterSet rp = realize_set(cfg.imprecise, unit(rng));
                const StatePoint x{unit(rng), unit(rng), unit(rng), unit(rng)};
                const double u = cfg.u_lo + unit(rng) * (cfg.u_hi - cfg.u_lo);
                worst = std::max(worst, conservation_error(x, u, rp));
                const Vec4 s = diffusion(x, rp);
                diffusion_ok = diffusion_ok && s[0] + s[1] == 0.0 && s[2] == 0.0 && s[3] == 0.0;
            }
            checks.push_back({"drift_conservation", worst <= 1e-12, worst, 1e-12});
            checks.push_back({"diffusion_structure", diffusion_ok, diffusion_ok ? 0.0 : 1.0, 0.0});
        }

        {
            bool ok = true;
            for (const auto& [name, field] : rate_field_table<IntervalNumber>()) {
                const IntervalNumber& a = cfg.imprecise.*field;
                if (a.lower() <= 0.0 && !a.is_degenerate())
                    continue;
                ok = ok && realize(a, 0.0) == a.lower() && realize(a, 1.0) == a.upper();
                double prev = a.lower();
                for (int j = 1; j <= 100; ++j) {
                    const double v = realize(a, j / 100.0);
                    ok = ok && v >= prev && a.contains(v);
                    prev = v;
                }
            }
            checks.push_back({"interval_realization", ok, ok ? 0.0 : 1.0, 0.0});
        }

        const ControlGrid u = cfg.initial_control();
        const Ensemble e = simulate_ensemble(cfg.x0, u, p, cfg.verify.n_paths, cfg.sweep.base_seed,
                                             cfg.threads);
        {
            const OmegaBounds b = omega_bounds(p);
            const double tol = cfg.verify.omega_tol_fraction * b.n_high;
            std::size_t nodes = 0, violations = 0;
            for (const auto& path : e.paths)
                for (const auto& x : path.states) {
                    ++nodes;
                    violations += in_omega(x, b, tol) ? 0 : 1;
                }
            const double fraction = static_cast<double>(violations) / static_cast<double>(nodes);
            checks.push_back({"omega_containment", fraction <= cfg.verify.max_violation_fraction,
                              fraction, cfg.verify.max_violation_fraction});
        }
        {
            const Estimate m1 = empirical_sup_moment(e, 1.0);
            const Estimate m2 = empirical_sup_moment(e, 2.0);
            const bool ok = std::isfinite(m1.mean) && std::isfinite(m2.mean);
            checks.push_back({"state_sup_moments_finite", ok, m2.mean, 0.0});
        }
        {
            auto moments = [&](const TimeGrid& g) {
                const ControlGrid ug = cfg.initial_control(g);
                const Ensemble eg = simulate_ensemble(cfg.x0, ug, p, cfg.verify.n_paths,
                                                      cfg.sweep.base_seed, cfg.threads);
                return adjoint_moment_check(
                    adjoint_ensemble(eg, ug, p, cfg.weights, cfg.sweep.adjoint_mode, cfg.threads));
            };
            const auto coarse = moments(cfg.grid);
            const auto fine = moments(TimeGrid(cfg.grid.t_end(), 2 * cfg.grid.n_steps()));
            auto within_factor_two = [](double a, double b) {
                if (a == 0.0 && b == 0.0)
                    return true;
                return a > 0.0 && b > 0.0 && a <= 2.0 * b && b <= 2.0 * a;
            };
            const bool finite = std::isfinite(coarse.first.mean) && std::isfinite(coarse.second.mean) &&
                                std::isfinite(fine.first.mean) && std::isfinite(fine.second.mean);
            const bool ok = finite && within_factor_two(coarse.first.mean, fine.first.mean) &&
                            within_factor_two(coarse.second.mean, fine.second.mean);
            const double ratio = coarse.first.mean > 0.0 ? fine.first.mean / coarse.first.mean : 1.0;
            checks.push_back({"adjoint_moments_stable", ok, ratio, 2.0});
        }
        {
            const TimeGrid g(cfg.grid.t_end(), std::min<std::size_t>(cfg.grid.n_steps(), 64));
            std::uniform_int_distribution<int> level(0, 4);
            bool ok = true;
            for (int trial = 0; trial < 100; ++trial) {
                auto random_control = [&] {
                    std::vector<double> v(g.n_steps());
                    for (double& x : v)
                        x = cfg.u_lo + (cfg.u_hi - cfg.u_lo) * level(rng) / 4.0;
                    return ControlGrid(g, std::move(v), cfg.u_lo, cfg.u_hi);
                };
                const ControlGrid a = random_control(), b = random_control(), c = random_control();
                ok = ok && control_metric(a, a, 0.0) == 0.0 &&
                     control_metric(a, b, 0.0) == control_metric(b, a, 0.0) &&
                     control_metric(a, c, 0.0) <= control_metric(a, b, 0.0) + control_metric(b, c, 0.0);
            }
            checks.push_back({"control_metric_axioms", ok, ok ? 0.0 : 1.0, 0.0});
        }
        {
            DiagnosticContext ctx = context_for(cfg, p);
            ctx.sweep.n_paths = cfg.lipschitz.n_paths;
            const LipschitzEstimate est = state_lipschitz_estimate(
                cfg.initial_control(), cfg.lipschitz.scales, cfg.lipschitz.theta, cfg.lipschitz.k, ctx);
            // Without control efficacy the perturbed paths coincide with the base paths.
            const bool inert = p.rates().control_efficacy == 0.0;
            const bool ok = est.monotone && (!inert || est.all_zero);
            checks.push_back({"state_lipschitz_trend", ok, est.slope, 0.0});
        }

        json j;
        j["checks"] = json::array();
        bool all = true;
        for (const auto& c : checks) {
            j["checks"].push_back(
                {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
            all = all && c.passed;
            if (!c.passed)
                log << "check failed: " << c.name << " (value " << c.value << ")\n";
        }
        j["all_passed"] = all;
        write_json(cfg.output_dir / "verify.json", j);
        log << (all ? "all checks passed\n" : "verification failed\n");
        return all ? int{kOk} : int{kCheckFailed};
    });
}

int cmd_gradcheck(const CommandOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const ScenarioConfig cfg = load(opts);
        const ParameterSet p =
            realize_set(cfg.imprecise, cfg.k).with(&Rates::noise_intensity, 0.0);
        const TimeGrid g(cfg.grid.t_end(), cfg.gradcheck.n_cells);
        const ControlGrid u = cfg.initial_control(g);
        const double h = cfg.gradcheck.fd_step;

        const Ensemble e = simulate_ensemble(cfg.x0, u, p, 1, cfg.sweep.base_seed);
        const auto adj = adjoint_ensemble(e, u, p, cfg.weights);
        const auto adjoint_grad = cost_gradient(e, u, adj, p, cfg.weights);

        std::vector<double> values(u.values().begin(), u.values().end());
        const ControlGrid wide(g, values, cfg.u_lo - 2 * h, cfg.u_hi + 2 * h);
        std::vector<double> fd(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            auto plus = values, minus = values;
            plus[i] += h;
            minus[i] -= h;
            const double jp = estimate_J(wide.with_values(plus), p, cfg.x0, cfg.weights, 1, cfg.sweep.base_seed).mean;
            const double jm = estimate_J(wide.with_values(minus), p, cfg.x0, cfg.weights, 1, cfg.sweep.base_seed).mean;
            fd[i] = (jp - jm) / (2.0 * h);
        }

        const double floor = cfg.gradcheck.abs_floor / cfg.gradcheck.rel_tol;
        double worst = 0.0;
        std::size_t worst_cell = 0;
        AtomicFileWriter csv(cfg.output_dir / "gradcheck.csv");
        csv.stream() << "cell,t,adjoint,finite_difference,rel_err\n";
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double err = std::abs(adjoint_grad[i] - fd[i]) / std::max(std::abs(fd[i]), floor);
            if (err > worst) {
                worst = err;
                worst_cell = i;
            }
            csv.stream() << i << ',' << format_double(g.time(i)) << ',' << format_double(adjoint_grad[i])
                         << ',' << format_double(fd[i]) << ',' << format_double(err) << '\n';
        }
        csv.commit();
        const bool passed = worst <= cfg.gradcheck.rel_tol;
        write_json(cfg.output_dir / "gradcheck.json", {{"max_rel_err", worst},
                                                       {"worst_cell", worst_cell},
                                                       {"threshold", cfg.gradcheck.rel_tol},
                                                       {"abs_floor", cfg.gradcheck.abs_floor},
                                                       {"n_cells", u.size()},
                                                       {"fd_step", h},
                                                       {"passed", passed}});
        log << "gradient check max relative error " << worst << '\n';
        if (!passed)
            log << "check failed: adjoint_gradient\n";
        return passed ? int{kOk} : int{kCheckFailed};
    });
}

} // namespace sica::cli
