#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tsallis/entropy.hpp"
#include "tsallis/stats.hpp"

using namespace tsallis;

namespace {

struct Scenario {
    MarketModel mk;
    PathEnsemble ens;
    Scenario(double lam, std::size_t N, std::size_t K, std::uint64_t seed)
        : mk(make(lam)), ens(simulate(mk, TimeGrid::uniform(1.0, K), N, seed)) {}
    static MarketModel make(double lam) {
        MarketModel m;
        m.lambda = LambdaSpec::constant({lam});
        return m;
    }
};

}  // namespace

TEST(Entropy, ClosedForm) {
    EXPECT_NEAR(tsallis_closed_form(2.0, 1.0, 1.0), std::exp(1.0) - 1.0, 1e-14);
    EXPECT_NEAR(tsallis_closed_form(0.5, 1.0, 1.0), (std::exp(-0.125) - 1.0) / -0.5, 1e-14);
    EXPECT_DOUBLE_EQ(tsallis_closed_form(1.0, 1.0, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(tsallis_closed_form(2.0, 0.0, 1.0), 0.0);
}

TEST(Entropy, ZeroLoadingsGiveZero) {
    Scenario s(0.0, 2000, 10, 1);
    const MeasureSpec ms = MeasureSpec::constant("zero", {0.0});
    const DensityPaths d = density_vs_p(ms, s.mk, s.ens);
    for (double q : {0.5, 2.0}) {
        EXPECT_EQ(tsallis_definitional(d, q).value, 0.0);
        EXPECT_EQ(tsallis_integral(s.mk, s.ens, ms, q).value, 0.0);
    }
}

TEST(Entropy, BothRoutesMatchClosedForm) {
    Scenario s(0.6, 40000, 50, 21);
    const MeasureSpec ms = MeasureSpec::constant("a08", {0.8});
    const DensityPaths d = density_vs_p(ms, s.mk, s.ens);
    for (double q : {0.5, 2.0}) {
        const double exact = tsallis_closed_form(q, 1.0, 1.0);
        const EntropyEstimate def = tsallis_definitional(d, q);
        const EntropyEstimate integ = tsallis_integral(s.mk, s.ens, ms, q);
        EXPECT_LT(std::abs(def.value - exact), 4.0 * def.se) << "q=" << q;
        EXPECT_LT(std::abs(integ.value - exact), 4.0 * integ.se) << "q=" << q;
        EXPECT_LT(std::abs(def.value - integ.value), 4.0 * combined_se(def.se, integ.se));
        EXPECT_LT(def.form_gap, 1e-10);
    }
}

TEST(Entropy, EntropyIsNonNegativeAndQminIsZero) {
    Scenario s(0.6, 20000, 20, 2);
    const MeasureSpec mn = MeasureSpec::minimal(1);
    for (double q : {0.5, 2.0}) EXPECT_EQ(tsallis_q_vs_qmin(s.mk, s.ens, mn, q).value, 0.0);
    const MeasureSpec ms = MeasureSpec::constant("a", {0.3});
    EXPECT_GT(tsallis_q_vs_qmin(s.mk, s.ens, ms, 2.0).value, 0.0);
}

TEST(Entropy, KlBracket) {
    Scenario s(0.6, 40000, 50, 9);
    const MeasureSpec ms = MeasureSpec::constant("a08", {0.8});
    const KlLimitReport r = kl_limit_check(s.mk, s.ens, ms, 0.01, 1.0);
    ASSERT_TRUE(r.kl_exact.has_value());
    EXPECT_DOUBLE_EQ(*r.kl_exact, 0.5);
    EXPECT_LT(*r.below_exact, 0.5);
    EXPECT_GT(*r.above_exact, 0.5);
    EXPECT_TRUE(r.closed_form_ok);
    EXPECT_TRUE(r.bracket);
}

TEST(Entropy, SubmartingaleHolds) {
    Scenario s(0.6, 500, 20, 13);
    const MeasureSpec ms = MeasureSpec::constant("a08", {0.8});
    const SubmartingaleReport r = submartingale_check(s.mk, s.ens, ms, 2.0, 10, 128, 500);
    EXPECT_EQ(r.paths, 500u);
    EXPECT_TRUE(r.pass);
    EXPECT_LT(r.fraction, 0.01);
}

TEST(Entropy, CsvHeader) {
    std::ostringstream os;
    write_entropy_csv(os, {});
    EXPECT_EQ(os.str(), "q,measure,base,route,estimate,stderr\n");
}
