#include "sica/stats.hpp"

#include "sica/errors.hpp"

#include <cmath>

namespace sica {

Estimate estimate_from_samples(std::span<const double> samples) {
    if (samples.empty())
        throw DomainError("estimate needs at least one sample");
    const auto n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double s : samples)
        sum += s;
    const double mean = sum / n;
    if (samples.size() == 1)
        return {mean, 0.0, 1};
    double ss = 0.0;
    for (double s : samples)
        ss += (s - mean) * (s - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n), samples.size()};
}

} // namespace sica
