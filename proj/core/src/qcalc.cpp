#include "tsallis/qcalc.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tsallis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe(const char* fn, double x, double bound) {
    std::ostringstream os;
    os.precision(17);
    os << fn << ": argument " << x << " outside domain (bound " << bound << ")";
    return os.str();
}

}  // namespace

DomainError::DomainError(const std::string& what, double value, double bound)
    : std::domain_error(what), value_(value), bound_(bound) {}

QGammaParams::QGammaParams(double q_, double gamma_) : q(q_), gamma(gamma_) {
    if (!(q > 0.0) || !std::isfinite(q))
        throw std::invalid_argument("q must be a positive finite real");
    if (q == 1.0)
        throw std::invalid_argument("q must differ from 1 (use the KL route for q = 1)");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("gamma must be a positive finite real");
}

bool QGammaParams::near_one() const noexcept { return std::abs(q - 1.0) < kNearOneWidth; }

LambdaDomain LambdaDomain::of(const QGammaParams& p) {
    const double b = 1.0 / ((1.0 - p.q) * p.gamma);
    if (p.q < 1.0) return {-kInf, b};
    return {b, kInf};
}

double q_exp_lower(double q) noexcept {
    return q < 1.0 ? -1.0 / (1.0 - q) : -kInf;
}

double q_exp_upper(double q) noexcept {
    return q > 1.0 ? 1.0 / (q - 1.0) : kInf;
}

double q_exp(double x, double q) {
    const double e = 1.0 - q;
    if (std::abs(e) < kNearOneWidth) {
        // exp_q(x) = exp(log(1 + e x)/e), expanded to second order in e.
        if (e != 0.0 && 1.0 + e * x <= 0.0)
            throw DomainError(describe("q_exp", x, -1.0 / e), x, -1.0 / e);
        return std::exp(x - 0.5 * e * x * x + e * e * x * x * x / 3.0);
    }
    const double base = 1.0 + e * x;
    if (q < 1.0) {
        if (base < 0.0) throw DomainError(describe("q_exp", x, q_exp_lower(q)), x, q_exp_lower(q));
        return std::pow(base, 1.0 / e);
    }
    if (!(base > kDomainEps))
        throw DomainError(describe("q_exp", x, q_exp_upper(q)), x, q_exp_upper(q));
    return std::pow(base, 1.0 / e);
}

double q_ln(double x, double q) {
    const double e = 1.0 - q;
    if (std::isnan(x) || x < 0.0 || (x == 0.0 && q >= 1.0))
        throw DomainError(describe("q_ln", x, 0.0), x, 0.0);
    if (std::abs(e) < kNearOneWidth) {
        const double l = std::log(x);
        return l + 0.5 * e * l * l + e * e * l * l * l / 6.0;
    }
    return (std::pow(x, e) - 1.0) / e;
}

double mu(double y, const QGammaParams& p) {
    const double m = (1.0 - (1.0 - p.q) * p.gamma * y) / p.q;
    if (!(m > 0.0)) {
        const double b = 1.0 / ((1.0 - p.q) * p.gamma);
        throw DomainError(describe("mu", y, b), y, b);
    }
    return m;
}

double driver_f(double y, const QGammaParams& p) { return p.gamma / (2.0 * mu(y, p)); }

}  // namespace tsallis
