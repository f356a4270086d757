#include <gtest/gtest.h>

#include <cmath>

#include "tsallis/pricing.hpp"

using namespace tsallis;

namespace {

PricingSetup small_setup(std::size_t paths = 40000) {
    PricingSetup s;
    s.model.lambda = LambdaSpec::constant({0.6});
    s.paths = paths;
    s.steps = 20;
    s.pde.points = 101;
    s.pde.steps = 100;
    s.grid_points = 5;
    return s;
}

double digital_closed_form(double q, double g, double scale = 1.0) {
    return -q_ln(0.5 * q_exp(-g * scale, q) + 0.5, q) / g;
}

}  // namespace

TEST(Pricing, MakeCheckRelations) {
    EXPECT_TRUE(make_check("a", 1.0, "<=", 0.9, 0.2).pass);
    EXPECT_FALSE(make_check("a", 1.0, "<=", 0.9, 0.05).pass);
    EXPECT_TRUE(make_check("b", 0.9, ">=", 1.0, 0.2).pass);
    EXPECT_TRUE(make_check("c", 1.0, "==", 1.05, 0.1).pass);
    EXPECT_FALSE(make_check("c", 1.0, "==", 1.2, 0.1).pass);
    EXPECT_THROW(make_check("d", 1.0, "<", 2.0, 0.0), std::invalid_argument);
}

TEST(Pricing, PairTolerance) {
    Quote a{1.0, 0.03, 0.0, "mc"}, b{1.0, 0.04, 0.2, "pde"};
    EXPECT_NEAR(pair_tolerance(a, b), 0.2, 1e-15);
    b.scheme_tol = 0.0;
    EXPECT_NEAR(pair_tolerance(a, b), 0.15, 1e-15);
    EXPECT_NEAR(a.tolerance(), 0.09, 1e-15);
}

TEST(Pricing, ZeroClaim) {
    const PricingEngine eng(small_setup(1000));
    const PriceReport r = eng.price(Claim::make("zero", Payoff::constant(0.0)), QGammaParams(2.0, 1.0));
    EXPECT_EQ(r.F0.value, 0.0);
    EXPECT_EQ(r.CE0.value, 0.0);
    EXPECT_EQ(r.riskneutral0.value, 0.0);
    EXPECT_TRUE(r.pass());
}

TEST(Pricing, UnhedgedDigitalReport) {
    const PricingEngine eng(small_setup());
    const PriceReport r = eng.price(registry_claim("digital_wperp", {}, eng.model()), QGammaParams(2.0, 1.0));
    EXPECT_NEAR(r.F0.value, 1.0 / 3.0, std::max(3.0 * r.F0.se, 1e-3));
    EXPECT_EQ(r.F0.value, r.CE0.value);
    EXPECT_TRUE(r.pass());
    EXPECT_FALSE(r.seller.has_value());
    ASSERT_FALSE(r.warnings.empty());
}

TEST(Pricing, SellerIntervalForHalfDigital) {
    // 0.5 * 1{W_perp > 0} at q = 2, gamma = 1: buyer 0.2, seller 1/3.
    const PricingEngine eng(small_setup());
    const Claim c = registry_claim("digital_wperp", {{"scale", 0.5}}, eng.model());
    const PriceReport r = eng.price(c, QGammaParams(2.0, 1.0));
    ASSERT_TRUE(r.seller.has_value());
    EXPECT_NEAR(r.F0.value, 0.2, r.F0.tolerance());
    EXPECT_NEAR(r.seller->value, 1.0 / 3.0, r.seller->tolerance());
    EXPECT_LE(r.F0.value, r.riskneutral0.value);
    EXPECT_LE(r.riskneutral0.value, r.seller->value);
    EXPECT_TRUE(r.pass());
}

TEST(Pricing, ScaledDigitalPricesAtOneHalf) {
    const PricingEngine eng(small_setup());
    const Claim c = registry_claim("digital_wperp", {{"scale", 2.0}}, eng.model());
    const Quote f = eng.buyer(c, QGammaParams(2.0, 1.0));
    EXPECT_NEAR(digital_closed_form(2.0, 1.0, 2.0), 0.5, 1e-15);
    EXPECT_NEAR(f.value, 0.5, f.tolerance());
}

TEST(Pricing, GammaSweepMatchesClosedForm) {
    const PricingEngine eng(small_setup());
    const Claim c = registry_claim("digital_wperp", {}, eng.model());
    const SweepReport r = eng.gamma_sweep(c, 2.0, {0.01, 0.1, 1.0, 10.0, 100.0});
    ASSERT_EQ(r.rows.size(), 5u);
    for (const auto& row : r.rows)
        EXPECT_NEAR(row.F0.value, digital_closed_form(2.0, row.gamma), row.F0.tolerance()) << row.gamma;
    for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LE(r.rows[i].F0.value, r.rows[i - 1].F0.value);
    EXPECT_TRUE(r.pass());
}

TEST(Pricing, ScalingIdentityClosedForm) {
    const PricingEngine eng(small_setup());
    const Claim c = registry_claim("digital_wperp", {}, eng.model());
    for (double k : {0.5, 2.0}) {
        const Check ch = eng.scaling_identity(c, k, QGammaParams(2.0, 1.0));
        EXPECT_TRUE(ch.pass) << ch.lhs << " vs " << ch.rhs;
        EXPECT_LE(ch.tol, 1e-12);
    }
}

TEST(Pricing, SchemesAgreeOnSmoothClaim) {
    PricingSetup s = small_setup();
    const QGammaParams p(2.0, 1.0);
    const Claim c = registry_claim("smooth_mixed", {}, s.model);
    const Quote pde = PricingEngine(s).buyer(c, p);
    s.scheme = SchemeChoice::Lsmc;
    const Quote lsmc = PricingEngine(s).buyer(c, p);
    EXPECT_EQ(pde.scheme, "pde");
    EXPECT_EQ(lsmc.scheme, "lsmc");
    EXPECT_NEAR(pde.value, lsmc.value, std::max(0.01, 3.0 * lsmc.se));
}

TEST(Pricing, MonotoneInClaim) {
    const PricingEngine eng(small_setup());
    const QGammaParams p(0.5, 1.0);
    const Claim a = Claim::make("a", Payoff::parse("0.5*ind(Wp[0])"));
    const Claim b = Claim::make("b", Payoff::parse("0.5*ind(Wp[0]) + 0.1"));
    EXPECT_LT(eng.buyer(a, p).value, eng.buyer(b, p).value);
}

TEST(Pricing, RejectsInadmissibleClaims) {
    const PricingEngine eng(small_setup(1000));
    const Claim c = Claim::make("big", Payoff::parse("2*ind(Wp[0])"));
    EXPECT_THROW(eng.price(c, QGammaParams(0.5, 1.0)), std::invalid_argument);
}

TEST(Pricing, DefaultBatteryShape) {
    MarketModel mk;
    mk.lambda = LambdaSpec::constant({0.6});
    const auto b = default_battery(mk);
    ASSERT_EQ(b.size(), 5u);
    int unhedged = 0, attainable = 0;
    for (const auto& c : b) {
        unhedged += c.hedge == HedgeClass::Unhedged;
        attainable += c.hedge == HedgeClass::Attainable;
    }
    EXPECT_EQ(unhedged, 1);
    EXPECT_EQ(attainable, 2);
}
