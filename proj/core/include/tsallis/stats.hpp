#pragma once

#include <span>

namespace tsallis {

struct Estimate {
    double value = 0.0;
    double se = 0.0;  // standard error
};

// Sample mean and standard error of the mean, reduced pairwise.
Estimate mean_se(std::span<const double> x);

// sqrt(a^2 + b^2), the standard error of a difference of independent estimates.
double combined_se(double a, double b);

}  // namespace tsallis
