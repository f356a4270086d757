#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsallis/field.hpp"
#include "tsallis/lsmc.hpp"
#include "tsallis/market.hpp"
#include "tsallis/payoff.hpp"
#include "tsallis/pde.hpp"
#include "tsallis/qcalc.hpp"

namespace tsallis {

enum class Scheme { ClosedForm, MonteCarlo, Pde, Lsmc };

const char* scheme_name(Scheme s);

struct BSDESolution {
    Scheme scheme = Scheme::ClosedForm;
    Driver driver = Driver::Pricing;
    double Y0 = 0.0;
    double se = 0.0;          // Monte Carlo standard error, 0 for deterministic schemes
    double scheme_tol = 0.0;  // discretization error estimate
    std::shared_ptr<const ValueField> field;  // null when only Y0 is available
    std::shared_ptr<const PdeSolution> pde;
    std::shared_ptr<const LsmcSolution> lsmc;
    std::vector<std::string> warnings;

    // Tolerance for a single estimate: max(3 se, scheme_tol).
    double tolerance() const;
};

// F_0 = -(1/gamma) ln_q E_Qmin[exp_q(-gamma xi)] for a claim of W_perp only,
// by Monte Carlo on the ensemble (W_perp has the same law under P and Qmin).
// The standard error uses the delta method.
BSDESolution solve_unhedged(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                            const QGammaParams& params);

// Same by adaptive quadrature against the Gaussian law of W_perp_T, at time t
// from state wp_t (n = 1). Accurate to about 1e-12.
double unhedged_quadrature(const Claim& claim, const QGammaParams& params, double T, double t = 0.0,
                           double wp_t = 0.0);

// E_Qmin[xi] for a claim of W only, by Monte Carlo in the Qmin frame, or in
// the P frame reweighted by dQmin/dP. Z_perp vanishes identically.
BSDESolution solve_attainable(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                              Frame frame = Frame::Qmin);

// E_Qmin[xi] for any claim, Qmin frame.
BSDESolution risk_neutral(const Claim& claim, const MarketModel& model, const PathEnsemble& ens);

// CE_0 = -(1/gamma) ln_q E_Qmin[exp_q(-gamma xi)] by Monte Carlo.
BSDESolution solve_ce(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                      const QGammaParams& params);

// CE by the PDE with driver f(u)(u_w^2 + u_wp^2).
BSDESolution solve_ce_pde(const Claim& claim, const MarketModel& model, const QGammaParams& params,
                          const PdeConfig& config);

// Pricing BSDE by the PDE or by regression.
BSDESolution solve_pde_bsde(const Claim& claim, const MarketModel& model, const QGammaParams& params,
                            const PdeConfig& config);
BSDESolution solve_lsmc_bsde(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                             const QGammaParams& params, const LsmcConfig& config);

// Optimal measures implied by a solution field (Y, Z, Z_perp):
//   theta* = -gamma Z_perp / mu(Y)        loading on W_perp
//   alpha* = theta* / q                   Problem 1 optimizer
//   beta*  = -gamma Z / (q mu(Y))         CE optimizer on W^{-lambda}
//   Q^xi:  (-lambda, -gamma Z_perp / (2 mu(Y))) against P
class OptimalControls {
public:
    OptimalControls(std::shared_ptr<const ValueField> field, MarketModel model, QGammaParams params,
                    double mu_min = 1e-8);

    void theta_star(double t, const double* w, const double* wp, double* out) const;
    void alpha_star(double t, const double* w, const double* wp, double* out) const;
    void beta_star(double t, const double* w, const double* wp, double* out) const;
    // Loadings of dQ^xi/dP on W (m) and W_perp (n).
    void qxi_loadings(double t, const double* w, const double* wp, double* on_w, double* on_wp) const;

    MeasureSpec alpha_measure() const;    // alpha*, no beta
    MeasureSpec theta_measure() const;    // theta* on W_perp, no beta
    MeasureSpec ce_measure() const;       // (beta*, alpha*)
    IntegrandFn qxi_integrand() const;

    const ValueField& field() const { return *field_; }

private:
    // Y, Z, Z_perp at a state; throws DomainError when mu(Y) < mu_min.
    double load(double t, const double* w, const double* wp, double* z, double* zp) const;
    std::shared_ptr<const ValueField> field_;
    MarketModel model_;
    QGammaParams params_;
    double mu_min_;
};

OptimalControls extract_optimizers(const BSDESolution& solution, const MarketModel& model,
                                   const QGammaParams& params, double mu_min = 1e-8);

struct YthetaResult {
    double Y0 = 0.0;            // mean of xi + sum mu(Y_k)|theta_k|^2 dt / (2 gamma)
    double se = 0.0;
    double Y0_regressed = 0.0;  // Y at step 0
    std::string basis;
};

// Backward recursion Y_k = E_k[Y_{k+1}] + mu(Y_k) |theta_k|^2 dt_k / (2 gamma)
// on Qmin-frame paths drifted into Q^theta (W_perp drift theta). mu is affine
// in y, so each step is solved exactly. Errors when 1 + (1-q)|theta|^2 dt/(2q)
// is not positive, where the implicit step has no solution.
YthetaResult backward_recursion_Ytheta(const LoadingFn& theta, const Claim& claim, const MarketModel& model,
                                       const PathEnsemble& ens, const QGammaParams& params,
                                       const LsmcConfig& config = {});

struct MartingaleReport {
    double estimate = 0.0;  // E_P[D^{Q^xi,P}_T xi]
    double se = 0.0;
    double Y0 = 0.0;
    double allowance = 0.0;  // 4 combined se + solution scheme tolerance
    bool pass = false;
};

// Checks Y_0 = E_{Q^xi}[xi] by reweighting P-frame paths with the Q^xi density.
MartingaleReport martingale_check_qxi(const BSDESolution& solution, const Claim& claim, const MarketModel& model,
                                      const PathEnsemble& ens, const QGammaParams& params);

}  // namespace tsallis
