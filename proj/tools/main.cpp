#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace sica::cli;

    CLI::App app{"Near-optimal control of the stochastic SICA model with imprecise parameters"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::size_t threads = 0;
    std::string out;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opts.config, "Scenario config (JSON)")->required();
        sub->add_option("--set", opts.overrides, "Override a config key: key.path=value")
            ->take_all();
        sub->add_option("--threads", threads, "Worker threads (fallback: SICA_NOC_THREADS)");
        sub->add_option("--out", out, "Output directory");
        sub->add_option("--seed", seed, "Base seed");
    };

    auto* simulate = app.add_subcommand("simulate", "Simulate an ensemble under the configured control");
    auto* optimize = app.add_subcommand("optimize", "Run the forward-backward sweep and near-optimality report");
    auto* ksweep = app.add_subcommand("ksweep", "Optimize across the imprecision index k");
    auto* verify = app.add_subcommand("verify", "Run the invariant suite");
    auto* gradcheck = app.add_subcommand("gradcheck", "Compare adjoint gradients with finite differences");
    for (auto* sub : {simulate, optimize, ksweep, verify, gradcheck})
        add_common(sub);
    optimize->add_flag("--strict", opts.strict, "Exit 4 when the sweep does not converge");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    auto* active = app.get_subcommands().front();
    if (active->count("--threads"))
        opts.threads = threads;
    if (active->count("--out"))
        opts.out = out;
    if (active->count("--seed"))
        opts.seed = seed;

    if (active == simulate)
        return cmd_simulate(opts, std::cerr);
    if (active == optimize)
        return cmd_optimize(opts, std::cerr);
    if (active == ksweep)
        return cmd_ksweep(opts, std::cerr);
    if (active == verify)
        return cmd_verify(opts, std::cerr);
    return cmd_gradcheck(opts, std::cerr);
}
