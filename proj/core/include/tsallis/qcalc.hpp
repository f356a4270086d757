#pragma once

#include <stdexcept>
#include <string>

namespace tsallis {

// Raised when an argument leaves the domain of a deformed function.
// value() is the offending input, bound() the limit it crossed.
class DomainError : public std::domain_error {
public:
    DomainError(const std::string& what, double value, double bound);
    double value() const noexcept { return value_; }
    double bound() const noexcept { return bound_; }

private:
    double value_;
    double bound_;
};

inline constexpr double kNearOneWidth = 1e-6;
inline constexpr double kDomainEps = 1e-12;

struct QGammaParams {
    double q;
    double gamma;

    // Throws std::invalid_argument unless q > 0, q != 1, gamma > 0.
    QGammaParams(double q, double gamma);

    bool near_one() const noexcept;
};

// Lambda = {y : mu(y) > 0}; one side is infinite.
struct LambdaDomain {
    double lower;
    double upper;

    static LambdaDomain of(const QGammaParams& p);
    bool contains(double y) const noexcept { return y > lower && y < upper; }
};

// exp_q(x) = [1 + (1-q)x]^{1/(1-q)}. q == 1 returns exp(x).
double q_exp(double x, double q);

// ln_q(x) = (x^{1-q} - 1)/(1-q). q == 1 returns log(x).
double q_ln(double x, double q);

// mu(y) = (1 - (1-q) gamma y)/q, positive exactly on Lambda.
double mu(double y, const QGammaParams& p);

// f(y) = gamma / (2 mu(y)), the coefficient of |Z_perp|^2 in the pricing driver.
double driver_f(double y, const QGammaParams& p);

// Largest/smallest x accepted by q_exp for this q (extended reals).
double q_exp_lower(double q) noexcept;
double q_exp_upper(double q) noexcept;

}  // namespace tsallis
