#pragma once

#include "sica/grid.hpp"

#include <span>
#include <vector>

namespace sica {

/// Deterministic piecewise-constant control: values[i] acts on [t_i, t_{i+1}).
class ControlGrid {
public:
    // Throws DomainError if bounds are inverted, the length differs from
    // grid.n_steps(), or any value lies outside [u_lo, u_hi].
    ControlGrid(TimeGrid grid, std::vector<double> values, double u_lo, double u_hi);
    static ControlGrid constant(const TimeGrid& grid, double value, double u_lo, double u_hi);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t cell) const noexcept { return values_[cell]; }
    std::size_t size() const noexcept { return values_.size(); }
    double u_lo() const noexcept { return u_lo_; }
    double u_hi() const noexcept { return u_hi_; }
    double clamp(double v) const noexcept;

    // Value reported at a grid node; the final node repeats the last cell.
    double at_node(std::size_t node) const noexcept {
        return values_[node < values_.size() ? node : values_.size() - 1];
    }

    ControlGrid with_values(std::vector<double> values) const;

    friend bool operator==(const ControlGrid&, const ControlGrid&) = default;

private:
    TimeGrid grid_;
    std::vector<double> values_;
    double u_lo_;
    double u_hi_;
};

/// Lebesgue measure of the disagreement set: dt * #{i : |u_i - v_i| > tol}.
/// Throws DomainError when the grids differ.
double control_metric(const ControlGrid& u, const ControlGrid& v, double tol);

// Default per-cell tolerance 1e-6 * (u_hi - u_lo).
double default_cell_tol(const ControlGrid& u) noexcept;

} // namespace sica
