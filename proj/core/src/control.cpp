#include "sica/control.hpp"

#include "sica/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sica {

TimeGrid::TimeGrid(double t_end, std::size_t n_steps)
    : t_end_(t_end), n_steps_(n_steps), dt_(t_end / static_cast<double>(n_steps)) {
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw DomainError("time grid needs a finite t_end > 0");
    if (n_steps == 0)
        throw DomainError("time grid needs n_steps >= 1");
}

ControlGrid::ControlGrid(TimeGrid grid, std::vector<double> values, double u_lo, double u_hi)
    : grid_(grid), values_(std::move(values)), u_lo_(u_lo), u_hi_(u_hi) {
    if (!(u_lo <= u_hi))
        throw DomainError("control bounds must satisfy u_lo <= u_hi");
    if (values_.size() != grid_.n_steps())
        throw DomainError("control has " + std::to_string(values_.size()) + " cells, grid has " +
                          std::to_string(grid_.n_steps()));
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!(values_[i] >= u_lo && values_[i] <= u_hi))
            throw DomainError("control cell " + std::to_string(i) + " outside [u_lo, u_hi]");
}

ControlGrid ControlGrid::constant(const TimeGrid& grid, double value, double u_lo, double u_hi) {
    return {grid, std::vector<double>(grid.n_steps(), value), u_lo, u_hi};
}

double ControlGrid::clamp(double v) const noexcept { return std::clamp(v, u_lo_, u_hi_); }

ControlGrid ControlGrid::with_values(std::vector<double> values) const {
    return {grid_, std::move(values), u_lo_, u_hi_};
}

double control_metric(const ControlGrid& u, const ControlGrid& v, double tol) {
    if (!(u.grid() == v.grid()))
        throw DomainError("control metric needs controls on the same grid");
    std::size_t differing = 0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(u[i] - v[i]) > tol)
            ++differing;
    return u.grid().dt() * static_cast<double>(differing);
}

double default_cell_tol(const ControlGrid& u) noexcept { return 1e-6 * (u.u_hi() - u.u_lo()); }

} // namespace sica
