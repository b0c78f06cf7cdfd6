#pragma once

#include <array>
#include <string_view>
#include <utility>

namespace sica {

// Closed interval [lower, upper]. Endpoints may be any finite reals; positivity is
// only required when the interval is realized through the geometric interval-valued
// function.
class IntervalNumber {
public:
    IntervalNumber() = default;
    IntervalNumber(double lower, double upper);
    static IntervalNumber degenerate(double value) { return {value, value}; }

    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    double width() const noexcept { return upper_ - lower_; }
    bool is_degenerate() const noexcept { return lower_ == upper_; }
    bool contains(double x) const noexcept { return lower_ <= x && x <= upper_; }

    friend bool operator==(const IntervalNumber&, const IntervalNumber&) = default;

private:
    double lower_ = 0.0;
    double upper_ = 0.0;
};

IntervalNumber operator+(const IntervalNumber& a, const IntervalNumber& b);
IntervalNumber operator-(const IntervalNumber& a, const IntervalNumber& b);
IntervalNumber operator*(const IntervalNumber& a, const IntervalNumber& b);
// Throws DomainError when b contains 0.
IntervalNumber operator/(const IntervalNumber& a, const IntervalNumber& b);

/// Interval-valued function h(k) = lower^(1-k) * upper^k.
///
/// Degenerate intervals [c, c] with c >= 0 return c exactly for every k. Otherwise
/// the lower endpoint must be strictly positive. The result is clamped into
/// [lower, upper] so floating point rounding never leaves the interval.
double realize(const IntervalNumber& a, double k);

// Biological rates of the SICA model. Instantiated with double for a realized
// parameter set and with IntervalNumber for the imprecise one.
template <class T>
struct RateFields {
    T recruitment{};          // Lambda
    T transmission{};         // beta
    T natural_death{};        // mu
    T chronic_infectivity{};  // eta_C
    T aids_infectivity{};     // eta_A
    T treatment_uptake{};     // phi: I -> C
    T aids_progression{};     // e:   I -> A
    T aids_treatment{};       // alpha: A -> I
    T treatment_default{};    // omega: C -> I
    T aids_death{};           // d
    T noise_intensity{};      // delta
    T control_efficacy{};     // m
    T saturation{};           // gamma

    friend bool operator==(const RateFields&, const RateFields&) = default;
};

using Rates = RateFields<double>;
using ImpreciseParameterSet = RateFields<IntervalNumber>;

// Config-facing names paired with the member they address.
template <class T>
constexpr auto rate_field_table() {
    using F = RateFields<T>;
    return std::array<std::pair<std::string_view, T F::*>, 13>{{
        {"Lambda", &F::recruitment},
        {"beta", &F::transmission},
        {"mu", &F::natural_death},
        {"eta_C", &F::chronic_infectivity},
        {"eta_A", &F::aids_infectivity},
        {"phi", &F::treatment_uptake},
        {"e", &F::aids_progression},
        {"alpha", &F::aids_treatment},
        {"omega", &F::treatment_default},
        {"d", &F::aids_death},
        {"delta", &F::noise_intensity},
        {"m", &F::control_efficacy},
        {"gamma", &F::saturation},
    }};
}

/// Realized (precise) parameters together with the derived exit rates
///   eps1 = alpha + mu + d,  eps2 = omega + mu,  eps3 = e + phi + mu.
class ParameterSet {
public:
    ParameterSet() = default;
    // Throws DomainError on a negative or non-finite rate.
    explicit ParameterSet(const Rates& rates);

    const Rates& rates() const noexcept { return rates_; }
    double aids_exit() const noexcept { return aids_exit_; }        // eps1
    double chronic_exit() const noexcept { return chronic_exit_; }  // eps2
    double infected_exit() const noexcept { return infected_exit_; } // eps3

    ParameterSet with(double Rates::*field, double value) const;

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

private:
    Rates rates_{};
    double aids_exit_ = 0.0;
    double chronic_exit_ = 0.0;
    double infected_exit_ = 0.0;
};

// Realizes every field with the same k; derived exit rates come from the realized
// constituents.
ParameterSet realize_set(const ImpreciseParameterSet& p, double k);

ImpreciseParameterSet degenerate_set(const Rates& r);
Rates lower_endpoints(const ImpreciseParameterSet& p);
Rates upper_endpoints(const ImpreciseParameterSet& p);

} // namespace sica
