#pragma once

#include <cstddef>
#include <span>

namespace sica {

// Monte Carlo estimate: sample mean and standard error (sample sd / sqrt(n)).
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;

    friend bool operator==(const Estimate&, const Estimate&) = default;
};

// Summation runs in index order so results do not depend on how the samples were
// produced. Throws DomainError on an empty sample.
Estimate estimate_from_samples(std::span<const double> samples);

} // namespace sica
