#include "tsallis/stats.hpp"

#include <cmath>
#include <vector>

#include "tsallis/parallel.hpp"

namespace tsallis {

Estimate mean_se(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    const double m = pairwise_sum(x) / static_cast<double>(n);
    if (n == 1) return {m, 0.0};
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = (x[i] - m) * (x[i] - m);
    const double var = pairwise_sum(d2) / static_cast<double>(n - 1);
    return {m, std::sqrt(var / static_cast<double>(n))};
}

double combined_se(double a, double b) { return std::hypot(a, b); }

}  // namespace tsallis
