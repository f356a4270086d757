#pragma once

#include <map>
#include <memory>
#include <string>

#include "tsallis/market.hpp"
#include "tsallis/qcalc.hpp"

namespace tsallis {

struct Interval {
    double lo;
    double hi;
};

namespace detail {
struct Node;
}

// Bounded payoff of the terminal state (W_T, W_perp_T), built from the
// grammar
//   expr   := term (('+' | '-') term)*
//   term   := unary ('*' unary)*
//   unary  := '-' unary | atom
//   atom   := number | W | Wp | W[i] | Wp[i] | '(' expr ')'
//           | min(e, e) | max(e, e) | clamp(e, e, e) | ind(e) | ind(e, h) | tanh(e)
// ind(x) is 1{x > 0}; ind(x, h) ramps linearly from 0 at -h to 1 at h.
class Payoff {
public:
    static Payoff parse(const std::string& text, int m = 1, int n = 1);
    static Payoff constant(double c);

    // `smoothing` > 0 replaces every raw ind(x) by ind(x, smoothing).
    double eval(const double* w, const double* wp, double smoothing = 0.0) const;

    // Interval enclosure of the payoff over all states.
    Interval bounds() const;
    bool depends_on_w() const;
    bool depends_on_wp() const;
    bool has_raw_indicator() const;
    const std::string& text() const noexcept { return text_; }

    // a * self + b
    Payoff affine(double a, double b) const;
    // k * x + (1 - k) * y
    static Payoff mix(double k, const Payoff& x, const Payoff& y);

private:
    Payoff(std::shared_ptr<const detail::Node> root, std::string text);
    std::shared_ptr<const detail::Node> root_;
    std::string text_;
};

// Thrown for malformed payoff expressions; column() is 1-based.
class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& what, std::size_t column);
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

enum class HedgeClass { Attainable, Unhedged, General };

const char* hedge_name(HedgeClass h);

struct Claim {
    std::string id;
    Payoff payoff;
    double lo;
    double hi;
    HedgeClass hedge;

    // Bounds come from the payoff's interval enclosure and must be finite.
    // Payoffs depending on W only are attainable, on W_perp only unhedged;
    // constants count as attainable.
    static Claim make(std::string id, Payoff payoff);

    double operator()(const double* w, const double* wp, double smoothing = 0.0) const {
        return payoff.eval(w, wp, smoothing);
    }
    bool discontinuous() const { return payoff.has_raw_indicator(); }
    Claim affine(double a, double b, std::string new_id) const;
};

// Registry: constant{value}, digital_w{shift, scale}, digital_wperp{scale},
// smooth_mixed{scale}, custom{expr}. digital_w pays 1{W_T + shift > 0}; the
// default shift lambda*T makes it 1{S_T > S_0} for constant lambda.
Claim registry_claim(const std::string& name, const std::map<std::string, double>& params, const MarketModel& model,
                     const std::string& expr = "");

struct Admissibility {
    bool ok = false;
    double m1 = 0.0;  // q_exp(-gamma * hi)
    double m2 = 0.0;  // q_exp(-gamma * lo)
    std::string reason;
};

// Checks -gamma [lo, hi] inside Dom(q_exp) and [lo, hi] inside Lambda.
Admissibility check_admissible(const Claim& claim, const QGammaParams& params);

}  // namespace tsallis
