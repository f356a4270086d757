#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tsallis/bsde.hpp"
#include "tsallis/pde.hpp"

using namespace tsallis;

namespace {

MarketModel model() {
    MarketModel mk;
    mk.lambda = LambdaSpec::constant({0.6});
    return mk;
}

PdeConfig coarse() {
    PdeConfig c;
    c.points = 101;
    c.steps = 100;
    return c;
}

}  // namespace

TEST(Pde, SmoothedDigitalTargets) {
    // Unhedged digital with ind() replaced by a ramp of half-width h.
    const QGammaParams p(2.0, 1.0);
    const double targets[][2] = {{0.025, 0.3353523}, {0.05, 0.3373767}, {0.1, 0.3414384}, {0.2, 0.3495920}};
    for (const auto& [h, v] : targets) {
        std::ostringstream e;
        e << "ind(Wp[0], " << h << ")";
        const Claim c = Claim::make("ramp", Payoff::parse(e.str()));
        EXPECT_NEAR(unhedged_quadrature(c, p, 1.0), v, 5e-8) << "h=" << h;
    }
}

TEST(Pde, UnhedgedDigitalMatchesSmoothedTarget) {
    const MarketModel mk = model();
    const Claim c = Claim::make("d", Payoff::parse("ind(Wp[0])"));
    const PdeSolution s = solve_pde(c, mk, QGammaParams(2.0, 1.0), coarse());
    EXPECT_FALSE(s.extrapolated);
    EXPECT_DOUBLE_EQ(s.smoothing, s.h);
    const Claim ramp = Claim::make("r", Payoff::parse("ind(Wp[0], " + std::to_string(s.h) + ")"));
    EXPECT_NEAR(s.Y0, unhedged_quadrature(ramp, QGammaParams(2.0, 1.0), 1.0), 1e-3);
    EXPECT_NEAR(s.Y0, 1.0 / 3.0, 0.01);
}

TEST(Pde, LinearDriverIsQminExpectation) {
    // E_Qmin[tanh(W_T) + 1] with W = B - lambda t under Qmin.
    const MarketModel mk = model();
    const Claim c = Claim::make("t", Payoff::parse("1 + tanh(W[0])"));
    const PdeSolution s = solve_pde(c, mk, QGammaParams(2.0, 1.0), coarse(), Driver::Linear);
    // Gauss-Hermite reference, 1e-10 accurate.
    double ref = 0.0;
    const int n = 4000;
    const double L = 10.0, dx = 2.0 * L / n;
    for (int i = 0; i <= n; ++i) {
        const double x = -L + dx * i;
        const double wgt = (i == 0 || i == n) ? 0.5 : 1.0;
        ref += wgt * dx * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) * (1.0 + std::tanh(x - 0.6));
    }
    EXPECT_TRUE(s.extrapolated);
    EXPECT_NEAR(s.Y0, ref, 1e-4);
}

TEST(Pde, AttainableClaimHasNoOrthogonalGradient) {
    const MarketModel mk = model();
    const Claim c = Claim::make("t", Payoff::parse("0.5 + 0.5*tanh(W[0])"));
    const PdeSolution s = solve_pde(c, mk, QGammaParams(2.0, 1.0), coarse());
    double w = 0.3, wp = -0.2, z = 0.0, zp = 0.0;
    s.gradient(0.5, &w, &wp, &z, &zp);
    EXPECT_GT(z, 0.05);
    EXPECT_NEAR(zp, 0.0, 1e-10);
}

TEST(Pde, ConstantClaimIsExact) {
    const Claim c = Claim::make("c", Payoff::constant(0.3));
    const PdeSolution s = solve_pde(c, model(), QGammaParams(0.5, 2.0), coarse());
    EXPECT_NEAR(s.Y0, 0.3, 1e-12);
}

TEST(Pde, RestartReproducesSlice) {
    const MarketModel mk = model();
    const QGammaParams p(2.0, 1.0);
    PdeConfig cfg = coarse();
    cfg.richardson = Richardson::Off;
    const Claim c = Claim::make("s", Payoff::parse("0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0])"));
    const PdeSolution full = solve_pde(c, mk, p, cfg);
    const std::size_t mid = full.knots.size() / 2;
    const std::vector<double> sub(full.knots.begin(), full.knots.begin() + static_cast<long>(mid) + 1);
    const PdeSolution part = solve_pde_from(full.slice_at(mid), sub, full.L, full.points, mk, p, cfg, Driver::Pricing);
    EXPECT_NEAR(part.Y0, full.Y0, 1e-9);
}

TEST(Pde, CsvHeader) {
    PdeConfig cfg = coarse();
    cfg.snapshot_stride = 0;
    const PdeSolution s = solve_pde(Claim::make("c", Payoff::constant(0.1)), model(), QGammaParams(2.0, 1.0), cfg);
    std::ostringstream os;
    s.write_csv(os, 50);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,w,wp,Y,Z,Zperp");
}
