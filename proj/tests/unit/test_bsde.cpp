#include <gtest/gtest.h>

#include <cmath>

#include "tsallis/bsde.hpp"

using namespace tsallis;

namespace {

MarketModel model() {
    MarketModel mk;
    mk.lambda = LambdaSpec::constant({0.6});
    return mk;
}

const Claim& digital() {
    static const Claim c = Claim::make("d", Payoff::parse("ind(Wp[0])"));
    return c;
}

}  // namespace

TEST(Bsde, UnhedgedDigitalQuadrature) {
    EXPECT_NEAR(unhedged_quadrature(digital(), QGammaParams(2.0, 1.0), 1.0), 1.0 / 3.0, 1e-12);
    // Closed form for a general (q, gamma): -ln_q((exp_q(-gamma) + 1)/2)/gamma.
    for (double q : {0.5, 3.0})
        for (double g : {0.1, 1.5}) {
            const double ref = -q_ln(0.5 * q_exp(-g, q) + 0.5, q) / g;
            EXPECT_NEAR(unhedged_quadrature(digital(), QGammaParams(q, g), 1.0), ref, 1e-11);
        }
}

TEST(Bsde, UnhedgedMonteCarlo) {
    const MarketModel mk = model();
    const PathEnsemble ens = simulate(mk, TimeGrid::uniform(1.0, 5), 100000, 12);
    const BSDESolution s = solve_unhedged(digital(), mk, ens, QGammaParams(2.0, 1.0));
    EXPECT_EQ(s.scheme, Scheme::ClosedForm);
    EXPECT_LT(std::abs(s.Y0 - 1.0 / 3.0), 3.0 * s.se);
}

TEST(Bsde, AttainableFramesAgree) {
    const MarketModel mk = model();
    const PathEnsemble ens = simulate(mk, TimeGrid::uniform(1.0, 5), 100000, 13);
    const Claim c = Claim::make("dw", Payoff::parse("ind(W[0] + 0.6)"));
    const BSDESolution a = solve_attainable(c, mk, ens, Frame::Qmin);
    const BSDESolution b = solve_attainable(c, mk, ens, Frame::P);
    EXPECT_LT(std::abs(a.Y0 - 0.5), 3.0 * a.se);
    EXPECT_LT(std::abs(b.Y0 - 0.5), 3.0 * b.se);
}

TEST(Bsde, CeBelowPriceBelowRiskNeutral) {
    const MarketModel mk = model();
    const PathEnsemble ens = simulate(mk, TimeGrid::uniform(1.0, 5), 50000, 14);
    const QGammaParams p(2.0, 1.0);
    const Claim c = Claim::make("dw", Payoff::parse("ind(W[0] + 0.6)"));
    const BSDESolution ce = solve_ce(c, mk, ens, p);
    const BSDESolution rn = risk_neutral(c, mk, ens);
    EXPECT_LT(ce.Y0, rn.Y0);
}

TEST(Bsde, YthetaAtZeroIsRiskNeutral) {
    const MarketModel mk = model();
    const PathEnsemble ens = simulate(mk, TimeGrid::graded(1.0, 10, 3.0), 20000, 15);
    const Claim c = Claim::make("s", Payoff::parse("0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0])"));
    const LoadingFn zero = [](double, const double*, const double*, double* out) { out[0] = 0.0; };
    const YthetaResult y = backward_recursion_Ytheta(zero, c, mk, ens, QGammaParams(2.0, 1.0));
    const BSDESolution rn = risk_neutral(c, mk, ens);
    EXPECT_NEAR(y.Y0, rn.Y0, 1e-12);
}

TEST(Bsde, OptimizerFormulas) {
    const MarketModel mk = model();
    const QGammaParams p(2.0, 1.0);
    PdeConfig cfg;
    cfg.points = 101;
    cfg.steps = 100;
    const Claim c = Claim::make("s", Payoff::parse("0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0])"));
    const BSDESolution s = solve_pde_bsde(c, mk, p, cfg);
    const OptimalControls oc = extract_optimizers(s, mk, p);
    double w = 0.1, wp = -0.3, z = 0, zp = 0, th = 0, al = 0, be = 0, ow = 0, owp = 0;
    const double t = 0.4;
    const double y = s.field->value(t, &w, &wp);
    s.field->gradient(t, &w, &wp, &z, &zp);
    oc.theta_star(t, &w, &wp, &th);
    oc.alpha_star(t, &w, &wp, &al);
    oc.beta_star(t, &w, &wp, &be);
    oc.qxi_loadings(t, &w, &wp, &ow, &owp);
    const double m = mu(y, p);
    EXPECT_NEAR(th, -p.gamma * zp / m, 1e-14);
    EXPECT_NEAR(al, th / p.q, 1e-14);
    EXPECT_NEAR(be, -p.gamma * z / (p.q * m), 1e-14);
    EXPECT_NEAR(ow, -0.6, 1e-14);
    EXPECT_NEAR(owp, th / 2.0, 1e-14);
}

TEST(Bsde, QxiMartingale) {
    const MarketModel mk = model();
    const QGammaParams p(2.0, 1.0);
    PdeConfig cfg;
    cfg.points = 101;
    cfg.steps = 100;
    const Claim c = Claim::make("s", Payoff::parse("0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0])"));
    const BSDESolution s = solve_pde_bsde(c, mk, p, cfg);
    const PathEnsemble ens = simulate(mk, TimeGrid::graded(1.0, 50, 3.0), 20000, 16);
    const MartingaleReport r = martingale_check_qxi(s, c, mk, ens, p);
    EXPECT_TRUE(r.pass) << r.estimate << " vs " << r.Y0 << " allowance " << r.allowance;
}
