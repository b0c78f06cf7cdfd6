#include "sica/sde.hpp"

#include "sica/errors.hpp"
#include "sica/parallel.hpp"

#include <cmath>
#include <random>

namespace sica {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr const char* kComponentNames[4] = {"S", "I", "C", "A"};

} // namespace

std::uint64_t derive_path_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(index + 1));
}

BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(grid.dt()));
    BrownianPath w{std::vector<double>(grid.n_steps()), seed};
    for (auto& dB : w.increments)
        dB = normal(rng);
    return w;
}

StatePoint euler_maruyama_step(const StatePoint& x, double u, const ParameterSet& p, double dt,
                               double dB, std::size_t& clamp_events, std::size_t step) {
    const Vec4 f = drift(x, u, p);
    const Vec4 s = diffusion(x, p);
    Vec4 next = x.as_array();
    for (std::size_t i = 0; i < 4; ++i) {
        next[i] += f[i] * dt + s[i] * dB;
        if (!std::isfinite(next[i]))
            throw IntegrationError(kComponentNames[i], step);
        if (next[i] < 0.0) {
            next[i] = 0.0;
            ++clamp_events;
        }
    }
    return StatePoint::from_array(next);
}

StatePoint euler_maruyama_step(const StatePoint& x, double u, const ParameterSet& p, double dt,
                               double dB) {
    std::size_t ignored = 0;
    return euler_maruyama_step(x, u, p, dt, dB, ignored);
}

TrajectoryPath simulate_path(const StatePoint& x0, const ControlGrid& ctrl, const ParameterSet& p,
                             const BrownianPath& w, const TimeGrid& grid) {
    if (w.increments.size() != grid.n_steps())
        throw DomainError("Brownian path length does not match the time grid");
    if (!(ctrl.grid() == grid))
        throw DomainError("control is defined on a different time grid");
    if (!x0.is_valid())
        throw DomainError("initial state must be finite and nonnegative");

    TrajectoryPath path;
    path.states.reserve(grid.n_nodes());
    path.states.push_back(x0);
    const double dt = grid.dt();
    for (std::size_t n = 0; n < grid.n_steps(); ++n)
        path.states.push_back(
            euler_maruyama_step(path.states.back(), ctrl[n], p, dt, w.increments[n],
                                path.clamp_events, n));
    return path;
}

Ensemble simulate_ensemble(const StatePoint& x0, const ControlGrid& ctrl, const ParameterSet& p,
                           std::size_t n_paths, std::uint64_t base_seed, std::size_t threads) {
    if (n_paths == 0)
        throw DomainError("ensemble needs n_paths >= 1");
    const TimeGrid& grid = ctrl.grid();
    Ensemble e{std::vector<TrajectoryPath>(n_paths), std::vector<BrownianPath>(n_paths), base_seed};
    parallel_for(n_paths, threads, [&](std::size_t i) {
        e.noise[i] = sample_brownian(grid, derive_path_seed(base_seed, i));
        e.paths[i] = simulate_path(x0, ctrl, p, e.noise[i], grid);
    });
    return e;
}

Estimate empirical_sup_moment(const Ensemble& e, double theta) {
    if (e.paths.empty())
        throw DomainError("sup-moment of an empty ensemble");
    if (!(theta >= 0.0))
        throw DomainError("sup-moment exponent must be >= 0");
    std::vector<double> samples;
    samples.reserve(e.size());
    for (const auto& path : e.paths) {
        double sup = 0.0;
        for (const auto& x : path.states) {
            double v = 0.0;
            for (double c : x.as_array())
                v += std::pow(std::abs(c), theta);
            sup = std::max(sup, v);
        }
        samples.push_back(sup);
    }
    return estimate_from_samples(samples);
}

std::vector<StatePoint> mean_trajectory(const Ensemble& e) {
    if (e.paths.empty())
        throw DomainError("mean of an empty ensemble");
    const std::size_t nodes = e.paths.front().states.size();
    std::vector<Vec4> acc(nodes, Vec4{});
    for (const auto& path : e.paths)
        for (std::size_t n = 0; n < nodes; ++n)
            for (std::size_t i = 0; i < 4; ++i)
                acc[n][i] += path.states[n].as_array()[i];
    const auto count = static_cast<double>(e.size());
    std::vector<StatePoint> out;
    out.reserve(nodes);
    for (auto& a : acc) {
        for (double& v : a)
            v /= count;
        out.push_back(StatePoint::from_array(a));
    }
    return out;
}

} // namespace sica
