#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sica {

// Precondition violations on numeric inputs (bad interval, k outside [0,1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Forward integration produced a non-finite state.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& component, std::size_t step)
        : std::runtime_error("non-finite " + component + " at step " + std::to_string(step)),
          component_(component), step_(step) {}

    const std::string& component() const noexcept { return component_; }
    std::size_t step() const noexcept { return step_; }

private:
    std::string component_;
    std::size_t step_;
};

// Backward co-state solve produced a non-finite value.
class AdjointError : public std::runtime_error {
public:
    explicit AdjointError(std::size_t node)
        : std::runtime_error("adjoint blow-up at node " + std::to_string(node)), node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

class OptimizationError : public std::runtime_error {
public:
    OptimizationError(std::size_t iteration, const std::string& what)
        : std::runtime_error("sweep iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

} // namespace sica
