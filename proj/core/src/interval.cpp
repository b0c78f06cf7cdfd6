#include "sica/interval.hpp"

#include "sica/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sica {

IntervalNumber::IntervalNumber(double lower, double upper) : lower_(lower), upper_(upper) {
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw DomainError("interval endpoints must be finite");
    if (lower > upper)
        throw DomainError("interval lower endpoint " + std::to_string(lower) +
                          " exceeds upper endpoint " + std::to_string(upper));
}

IntervalNumber operator+(const IntervalNumber& a, const IntervalNumber& b) {
    return {a.lower() + b.lower(), a.upper() + b.upper()};
}

IntervalNumber operator-(const IntervalNumber& a, const IntervalNumber& b) {
    return {a.lower() - b.upper(), a.upper() - b.lower()};
}

IntervalNumber operator*(const IntervalNumber& a, const IntervalNumber& b) {
    const std::array<double, 4> c{a.lower() * b.lower(), a.lower() * b.upper(),
                                  a.upper() * b.lower(), a.upper() * b.upper()};
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    return {*lo, *hi};
}

IntervalNumber operator/(const IntervalNumber& a, const IntervalNumber& b) {
    if (b.contains(0.0))
        throw DomainError("interval division by an interval containing 0");
    return a * IntervalNumber(1.0 / b.upper(), 1.0 / b.lower());
}

double realize(const IntervalNumber& a, double k) {
    if (!(k >= 0.0 && k <= 1.0))
        throw DomainError("realization index k must lie in [0, 1]");
    if (a.is_degenerate() && a.lower() >= 0.0)
        return a.lower();
    if (a.lower() <= 0.0)
        throw DomainError("realization needs a positive lower endpoint");
    if (k == 0.0)
        return a.lower();
    if (k == 1.0)
        return a.upper();
    const double v = std::pow(a.lower(), 1.0 - k) * std::pow(a.upper(), k);
    return std::clamp(v, a.lower(), a.upper());
}

ParameterSet::ParameterSet(const Rates& rates) : rates_(rates) {
    for (const auto& [name, field] : rate_field_table<double>()) {
        const double v = rates_.*field;
        if (!std::isfinite(v) || v < 0.0)
            throw DomainError("parameter " + std::string(name) + " must be finite and >= 0");
    }
    aids_exit_ = rates_.aids_treatment + rates_.natural_death + rates_.aids_death;
    chronic_exit_ = rates_.treatment_default + rates_.natural_death;
    infected_exit_ = rates_.aids_progression + rates_.treatment_uptake + rates_.natural_death;
}

ParameterSet ParameterSet::with(double Rates::*field, double value) const {
    Rates r = rates_;
    r.*field = value;
    return ParameterSet(r);
}

ParameterSet realize_set(const ImpreciseParameterSet& p, double k) {
    Rates r;
    const auto src = rate_field_table<IntervalNumber>();
    const auto dst = rate_field_table<double>();
    for (std::size_t i = 0; i < src.size(); ++i) {
        try {
            r.*(dst[i].second) = realize(p.*(src[i].second), k);
        } catch (const DomainError& e) {
            throw DomainError("parameter " + std::string(src[i].first) + ": " + e.what());
        }
    }
    return ParameterSet(r);
}

ImpreciseParameterSet degenerate_set(const Rates& r) {
    ImpreciseParameterSet out;
    const auto dst = rate_field_table<IntervalNumber>();
    const auto src = rate_field_table<double>();
    for (std::size_t i = 0; i < src.size(); ++i)
        out.*(dst[i].second) = IntervalNumber::degenerate(r.*(src[i].second));
    return out;
}

Rates lower_endpoints(const ImpreciseParameterSet& p) {
    Rates r;
    const auto src = rate_field_table<IntervalNumber>();
    const auto dst = rate_field_table<double>();
    for (std::size_t i = 0; i < src.size(); ++i)
        r.*(dst[i].second) = (p.*(src[i].second)).lower();
    return r;
}

Rates upper_endpoints(const ImpreciseParameterSet& p) {
    Rates r;
    const auto src = rate_field_table<IntervalNumber>();
    const auto dst = rate_field_table<double>();
    for (std::size_t i = 0; i < src.size(); ++i)
        r.*(dst[i].second) = (p.*(src[i].second)).upper();
    return r;
}

} // namespace sica
