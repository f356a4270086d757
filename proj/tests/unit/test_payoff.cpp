#include <gtest/gtest.h>

#include "tsallis/payoff.hpp"

using namespace tsallis;

TEST(Payoff, ParsesAndEvaluates) {
    const Payoff p = Payoff::parse("clamp(0.5+0.3*W[0]-0.2*Wp[0], 0, 1)");
    double w = 1.0, wp = 0.5;
    EXPECT_DOUBLE_EQ(p.eval(&w, &wp), 0.7);
    w = 10.0;
    EXPECT_DOUBLE_EQ(p.eval(&w, &wp), 1.0);
    const Interval b = p.bounds();
    EXPECT_DOUBLE_EQ(b.lo, 0.0);
    EXPECT_DOUBLE_EQ(b.hi, 1.0);
}

TEST(Payoff, IndicatorAndRamp) {
    const Payoff p = Payoff::parse("ind(Wp)");
    double w = 0.0, wp = 0.01;
    EXPECT_EQ(p.eval(&w, &wp), 1.0);
    EXPECT_NEAR(p.eval(&w, &wp, 0.1), 0.55, 1e-15);
    wp = 0.0;
    EXPECT_EQ(p.eval(&w, &wp), 0.0);
    EXPECT_TRUE(p.has_raw_indicator());
    EXPECT_FALSE(Payoff::parse("ind(Wp, 0.1)").has_raw_indicator());
}

TEST(Payoff, UnboundedExpressionsAreRejectedByClaims) {
    EXPECT_THROW(Claim::make("lin", Payoff::parse("W + 1")), std::invalid_argument);
    EXPECT_NO_THROW(Claim::make("tanh", Payoff::parse("tanh(W) + 1")));
}

TEST(Payoff, ParseErrorsReportColumn) {
    try {
        (void)Payoff::parse("1 + * W");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.column(), 5u);
    }
    EXPECT_THROW((void)Payoff::parse("W[1]"), ParseError);
    EXPECT_THROW((void)Payoff::parse("exp(W)"), ParseError);
    EXPECT_THROW((void)Payoff::parse("min(W)"), ParseError);
}

TEST(Payoff, HedgeClassification) {
    MarketModel mk;
    mk.lambda = LambdaSpec::constant({0.6});
    EXPECT_EQ(registry_claim("digital_wperp", {}, mk).hedge, HedgeClass::Unhedged);
    EXPECT_EQ(registry_claim("digital_w", {}, mk).hedge, HedgeClass::Attainable);
    EXPECT_EQ(registry_claim("smooth_mixed", {}, mk).hedge, HedgeClass::General);
    EXPECT_EQ(registry_claim("constant", {{"value", 0.3}}, mk).hedge, HedgeClass::Attainable);
    EXPECT_THROW(registry_claim("digital_wperp", {{"shift", 1.0}}, mk), std::invalid_argument);
    EXPECT_THROW(registry_claim("nope", {}, mk), std::invalid_argument);
}

TEST(Payoff, DigitalWDefaultShiftIsSAboveS0) {
    MarketModel mk;
    mk.lambda = LambdaSpec::constant({0.6});
    const Claim c = registry_claim("digital_w", {}, mk);
    double w = -0.59, wp = 0.0;
    EXPECT_EQ(c(&w, &wp), 1.0);
    w = -0.61;
    EXPECT_EQ(c(&w, &wp), 0.0);
}

TEST(Payoff, AffineAndMixBounds) {
    const Claim c = Claim::make("d", Payoff::parse("ind(Wp)"));
    const Claim a = c.affine(2.0, -0.5, "a");
    EXPECT_DOUBLE_EQ(a.lo, -0.5);
    EXPECT_DOUBLE_EQ(a.hi, 1.5);
    const Payoff m = Payoff::mix(0.25, Payoff::constant(1.0), Payoff::parse("ind(W)"));
    double w = -1.0, wp = 0.0;
    EXPECT_DOUBLE_EQ(m.eval(&w, &wp), 0.25);
}

TEST(Payoff, Admissibility) {
    const Claim d = Claim::make("d", Payoff::parse("ind(Wp)"));
    EXPECT_TRUE(check_admissible(d, QGammaParams(2.0, 1.0)).ok);
    // -xi with q = 2, gamma = 1 reaches the pole of exp_q.
    EXPECT_FALSE(check_admissible(d.affine(-1.0, 0.0, "m"), QGammaParams(2.0, 1.0)).ok);
    EXPECT_TRUE(check_admissible(d.affine(-0.5, 0.0, "m"), QGammaParams(2.0, 1.0)).ok);
}
