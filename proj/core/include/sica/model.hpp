#pragma once

#include "sica/interval.hpp"

#include <array>

namespace sica {

using Vec4 = std::array<double, 4>;

// Compartment sizes (S, I, C, A).
struct StatePoint {
    double S = 0.0;
    double I = 0.0;
    double C = 0.0;
    double A = 0.0;

    double total() const noexcept { return S + I + C + A; }
    Vec4 as_array() const noexcept { return {S, I, C, A}; }
    static StatePoint from_array(const Vec4& v) noexcept { return {v[0], v[1], v[2], v[3]}; }
    // All components finite and nonnegative.
    bool is_valid() const noexcept;

    friend bool operator==(const StatePoint&, const StatePoint&) = default;
};

// Force of infection factor I + eta_C*C + eta_A*A.
double infectious_load(const StatePoint& x, const ParameterSet& p) noexcept;

/// Saturating treatment flow m*u*I / (1 + gamma*I) moving I into C.
double treatment_term(const StatePoint& x, double u, const ParameterSet& p) noexcept;

// d/du of treatment_term: m*I / (1 + gamma*I).
double treatment_gain(const StatePoint& x, const ParameterSet& p) noexcept;

/// Controlled drift (f1, f2, f3, f4). Total on any input; no clamping.
Vec4 drift(const StatePoint& x, double u, const ParameterSet& p) noexcept;

/// Diffusion (sigma1, sigma2, 0, 0) with sigma1 = -delta*(I + eta_C*C + eta_A*A)*S = -sigma2.
Vec4 diffusion(const StatePoint& x, const ParameterSet& p) noexcept;

struct OmegaBounds {
    double n_low = 0.0;   // Lambda / (mu + d)
    double n_high = 0.0;  // Lambda / mu
};

// Throws DomainError when mu == 0.
OmegaBounds omega_bounds(const ParameterSet& p);

// Closed-region test on the total population with an absolute tolerance.
bool in_omega(const StatePoint& x, const OmegaBounds& b, double tol) noexcept;
bool in_omega(const StatePoint& x, const OmegaBounds& b) noexcept;

} // namespace sica
