#pragma once

#include <cstddef>

namespace sica {

// Uniform grid on [0, t_end] with n_steps intervals and n_steps + 1 nodes.
class TimeGrid {
public:
    TimeGrid() = default;
    // Throws DomainError unless t_end > 0 and n_steps >= 1.
    TimeGrid(double t_end, std::size_t n_steps);

    double t_end() const noexcept { return t_end_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_nodes() const noexcept { return n_steps_ + 1; }
    double dt() const noexcept { return dt_; }
    double time(std::size_t node) const noexcept {
        return t_end_ * static_cast<double>(node) / static_cast<double>(n_steps_);
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t_end_ = 1.0;
    std::size_t n_steps_ = 1;
    double dt_ = 1.0;
};

} // namespace sica
