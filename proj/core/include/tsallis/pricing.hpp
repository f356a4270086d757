#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsallis/bsde.hpp"
#include "tsallis/lsmc.hpp"
#include "tsallis/market.hpp"
#include "tsallis/payoff.hpp"
#include "tsallis/pde.hpp"
#include "tsallis/qcalc.hpp"

namespace tsallis {

// Auto prices constants, attainable and unhedged claims by their closed
// forms and general claims by the PDE (m = n = 1) or LSMC. Pde and Lsmc
// force that scheme for every non-constant claim.
enum class SchemeChoice { Auto, Pde, Lsmc };

const char* scheme_choice_name(SchemeChoice s);

struct PricingSetup {
    MarketModel model;
    std::size_t paths = 100000;
    std::size_t steps = 50;      // Monte Carlo time steps
    double grading = 3.0;        // Monte Carlo time grid exponent
    std::uint64_t seed = 1;
    PdeConfig pde;
    LsmcConfig lsmc;
    SchemeChoice scheme = SchemeChoice::Auto;
    bool seller = true;          // also price -F0(-xi) when -xi is admissible
    // Constant candidate grids for the dual problems.
    double grid_lo = -2.0, grid_hi = 2.0;
    std::size_t grid_points = 21;
};

struct Quote {
    double value = 0.0;
    double se = 0.0;
    double scheme_tol = 0.0;
    std::string scheme;
    double tolerance() const;  // max(3 se, scheme_tol)
};

// One inequality or equality with its tolerance.
struct Check {
    std::string name;
    std::string relation;  // "<=", ">=", "=="
    double lhs = 0.0;
    double rhs = 0.0;
    double tol = 0.0;
    bool pass = false;
};

Check make_check(std::string name, double lhs, const char* relation, double rhs, double tol);

// max(3 sqrt(a.se^2 + b.se^2), a.scheme_tol, b.scheme_tol)
double pair_tolerance(const Quote& a, const Quote& b);

struct DualRecord {
    std::string problem;    // problem1, problem2, ce
    std::string candidate;  // description of the candidate measure
    bool optimizer = false; // analytic optimizer rather than a grid member
    double value = 0.0;
    double se = 0.0;
    double distorted = 0.0;  // E_Qmin[D_T^q xi] without the entropy term (problem1 and ce)
    double distorted_se = 0.0;
    double reference = 0.0;  // F0 or CE0
    double reference_se = 0.0;
    double gap = 0.0;        // value - reference
    double allowance = 0.0;
    bool pass = false;       // optimizers: |gap| <= allowance; others: gap >= -allowance
};

struct OptimizerSummary {
    double alpha_star0 = 0.0;  // at t = 0, W = W_perp = 0 (first component)
    double theta_star0 = 0.0;
    double martingale_estimate = 0.0;
    double martingale_se = 0.0;
    bool martingale_pass = false;
};

struct PriceReport {
    std::string claim_id;
    std::string payoff;
    std::string hedge;
    double lo = 0.0, hi = 0.0;
    double q = 0.0, gamma = 0.0;
    Quote F0;
    std::optional<Quote> seller;
    Quote CE0;
    Quote riskneutral0;
    std::vector<Check> checks;
    std::vector<DualRecord> duals;
    std::optional<OptimizerSummary> optimizers;
    std::vector<std::string> warnings;

    bool pass() const;
};

struct SweepRow {
    double gamma = 0.0;
    Quote F0, CE0, riskneutral0;
};

struct SweepReport {
    std::string claim_id;
    double q = 0.0;
    std::vector<SweepRow> rows;
    double distorted_infimum = 0.0;  // min over the alpha grid of E_Qmin[D^q xi]
    std::vector<Check> checks;
    bool pass() const;
};

struct BoundsReport {
    std::vector<PriceReport> claims;
    std::vector<Check> checks;
    bool pass() const;
};

struct PropertyReport {
    std::vector<Check> checks;
    bool pass() const;
};

// Holds the setup and one shared ensemble (common random numbers for every
// solve made through it).
class PricingEngine {
public:
    explicit PricingEngine(PricingSetup setup);

    const PricingSetup& setup() const { return setup_; }
    const MarketModel& model() const { return setup_.model; }
    const PathEnsemble& ensemble() const { return *ens_; }

    // Buyer price with CE and risk-neutral references and the sandwich checks.
    PriceReport price(const Claim& claim, const QGammaParams& params) const;

    // F0 alone, by the scheme price() would use.
    Quote buyer(const Claim& claim, const QGammaParams& params) const;
    Quote certainty_equivalent(const Claim& claim, const QGammaParams& params) const;
    Quote riskneutral(const Claim& claim) const;

    // -F0(-xi); nullopt when -xi is not admissible.
    std::optional<Quote> seller_price(const Claim& claim, const QGammaParams& params) const;

    // A solution carrying a value field (PDE when m = n = 1, else LSMC).
    BSDESolution solve_field(const Claim& claim, const QGammaParams& params,
                             Driver driver = Driver::Pricing) const;

    // E_Qmin[D^q xi + (q / (2 gamma)) int D^q (|beta|^2 + |alpha|^2) ds] for a
    // candidate measure given by its loadings against Qmin.
    DualRecord dual_objective(const MeasureSpec& candidate, const Claim& claim, const QGammaParams& params,
                              const Quote& reference, const char* problem, bool optimizer,
                              double extra_allowance = 0.0) const;

    DualRecord problem1_objective(const MeasureSpec& candidate, const Claim& claim, const QGammaParams& params,
                                  const Quote& F0, bool optimizer = false, double extra_allowance = 0.0) const;
    DualRecord problem2_value(const LoadingFn& theta, const std::string& label, const Claim& claim,
                              const QGammaParams& params, const Quote& F0, bool optimizer = false,
                              double extra_allowance = 0.0) const;
    DualRecord ce_dual_objective(const MeasureSpec& candidate, const Claim& claim, const QGammaParams& params,
                                 const Quote& CE0, bool optimizer = false, double extra_allowance = 0.0) const;

    // Constant-loading candidates on the configured grid.
    std::vector<double> grid() const;
    std::vector<DualRecord> problem1_grid(const Claim& claim, const QGammaParams& params, const Quote& F0) const;
    std::vector<DualRecord> problem2_grid(const Claim& claim, const QGammaParams& params, const Quote& F0) const;
    // (beta, alpha) pairs on a coarse square grid (every other grid point).
    std::vector<DualRecord> ce_grid(const Claim& claim, const QGammaParams& params, const Quote& CE0) const;

    // Optimizer records: Problem 1 at alpha*, Problem 2 at theta*, CE at
    // (beta*, alpha*), each against its reference; appended to the report.
    void add_duals(PriceReport& report, const Claim& claim, const QGammaParams& params, bool grids) const;

    // min over the alpha grid of E_Qmin[D^q xi].
    double distorted_infimum(const Claim& claim, const QGammaParams& params) const;

    BoundsReport bounds_report(const std::vector<Claim>& battery, const QGammaParams& params) const;

    SweepReport gamma_sweep(const Claim& claim, double q, const std::vector<double>& gammas) const;

    // F0(kappa xi, gamma) against kappa F0(xi, kappa gamma).
    Check scaling_identity(const Claim& claim, double kappa, const QGammaParams& params) const;

    PropertyReport property_suite(const QGammaParams& params) const;

private:
    PricingSetup setup_;
    std::shared_ptr<const PathEnsemble> ens_;
};

// constant, unhedged digital, attainable digital, smooth mixed, clamped affine.
std::vector<Claim> default_battery(const MarketModel& model);

}  // namespace tsallis
