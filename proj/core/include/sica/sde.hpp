#pragma once

#include "sica/control.hpp"
#include "sica/grid.hpp"
#include "sica/interval.hpp"
#include "sica/model.hpp"
#include "sica/stats.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sica {

struct BrownianPath {
    std::vector<double> increments;  // N(0, dt) draws, one per step
    std::uint64_t seed = 0;
};

struct TrajectoryPath {
    std::vector<StatePoint> states;  // n_steps + 1 nodes, states[0] = x0
    std::size_t clamp_events = 0;
};

struct Ensemble {
    std::vector<TrajectoryPath> paths;
    std::vector<BrownianPath> noise;  // noise[i] drove paths[i]
    std::uint64_t base_seed = 0;

    std::size_t size() const noexcept { return paths.size(); }
};

/// Per-path seed: splitmix64(splitmix64(base_seed) ^ splitmix64(index + 1)).
std::uint64_t derive_path_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

// Independent N(0, dt) increments from a 64-bit Mersenne twister seeded with `seed`.
BrownianPath sample_brownian(const TimeGrid& grid, std::uint64_t seed);

/// One Euler-Maruyama step x + f(x,u)*dt + sigma(x)*dB. Negative components are
/// set to 0 and counted in clamp_events. Throws IntegrationError on a non-finite
/// component, reporting `step`.
StatePoint euler_maruyama_step(const StatePoint& x, double u, const ParameterSet& p, double dt,
                               double dB, std::size_t& clamp_events, std::size_t step = 0);
StatePoint euler_maruyama_step(const StatePoint& x, double u, const ParameterSet& p, double dt,
                               double dB);

// Throws DomainError if the noise length or control grid does not match `grid`.
TrajectoryPath simulate_path(const StatePoint& x0, const ControlGrid& ctrl, const ParameterSet& p,
                             const BrownianPath& w, const TimeGrid& grid);

/// n_paths trajectories, path i driven by sample_brownian(grid, derive_path_seed(base_seed, i)).
/// Reusing base_seed across controls gives common random numbers. Output is
/// independent of `threads`.
Ensemble simulate_ensemble(const StatePoint& x0, const ControlGrid& ctrl, const ParameterSet& p,
                           std::size_t n_paths, std::uint64_t base_seed, std::size_t threads = 1);

// Estimate of E sup_t (|S|^theta + |I|^theta + |C|^theta + |A|^theta).
Estimate empirical_sup_moment(const Ensemble& e, double theta);

// Node-wise ensemble mean.
std::vector<StatePoint> mean_trajectory(const Ensemble& e);

} // namespace sica
