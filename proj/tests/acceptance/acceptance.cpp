// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// below; run with criterion numbers as arguments to select a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "tsallis/bsde.hpp"
#include "tsallis/entropy.hpp"
#include "tsallis/parallel.hpp"
#include "tsallis/pricing.hpp"
#include "tsallis/stats.hpp"

using namespace tsallis;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kEntropySigmas = 4.0;        // 1, 2
constexpr double kPriceSigmas = 3.0;          // 3
constexpr double kPriceFloor = 1e-3;          // 3
constexpr double kZperpNoiseRatio = 3.0;      // 3: |Z_perp| within this many noise floors
constexpr double kAgreementRange = 0.01;      // 4: fraction of the payoff range
constexpr double kAgreementSigmas = 3.0;      // 4
constexpr double kRefinementRatio = 0.25;     // 4
constexpr double kDualSigmas = 4.0;           // 5
constexpr double kSmallGammaGap = 0.01;       // 7
constexpr double kScalingClosedForm = 1e-12;  // 7
constexpr double kScalingPde = 1e-3;          // 7
constexpr double kTimeConsistency = 1e-8;     // 8
constexpr double kViolationRate = 0.01;       // 9

constexpr double kLambda = 0.6;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

MarketModel market(double lam = kLambda) {
    MarketModel mk;
    mk.lambda = LambdaSpec::constant({lam});
    return mk;
}

PricingSetup base_setup() {
    PricingSetup s;
    s.model = market();
    s.paths = 100000;
    s.steps = 50;
    s.seed = kSeed;
    return s;
}

std::string g(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

const QGammaParams kQ2G1(2.0, 1.0);

Claim unhedged_digital(const MarketModel& mk) { return registry_claim("digital_wperp", {}, mk); }
Claim smooth_mixed(const MarketModel& mk) { return registry_claim("smooth_mixed", {}, mk); }

// 1. Entropy representations against the lognormal-moment closed form.
void criterion1(Outcome& o) {
    const MarketModel mk = market();
    const PathEnsemble ens = simulate(mk, TimeGrid::uniform(1.0, 200), 200000, kSeed + 1);
    const MeasureSpec ms = MeasureSpec::constant("alpha=0.8", {0.8});
    const DensityPaths d = density_vs_p(ms, mk, ens, 0);
    for (double q : {0.5, 2.0}) {
        const double exact = tsallis_closed_form(q, 1.0, 1.0);
        const EntropyEstimate def = tsallis_definitional(d, q);
        const EntropyEstimate integ = tsallis_integral(mk, ens, ms, q);
        o.detail << " q=" << q << ": exact " << g(exact) << " def " << g(def.value) << "+-" << g(def.se) << " int "
                 << g(integ.value) << "+-" << g(integ.se) << ";";
        o.require(std::abs(def.value - exact) <= kEntropySigmas * def.se, "definitional vs closed form");
        o.require(std::abs(integ.value - exact) <= kEntropySigmas * integ.se, "integral vs closed form");
        o.require(std::abs(def.value - integ.value) <= kEntropySigmas * combined_se(def.se, integ.se),
                  "definitional vs integral");
    }
}

// 2. q -> 1: H_{0.99} and H_{1.01} bracket the relative entropy cT/2.
void criterion2(Outcome& o) {
    const MarketModel mk = market();
    const PathEnsemble ens = simulate(mk, TimeGrid::uniform(1.0, 200), 200000, kSeed + 1);
    const MeasureSpec ms = MeasureSpec::constant("alpha=0.8", {0.8});
    const KlLimitReport r = kl_limit_check(mk, ens, ms, 0.01, 1.0);
    const double kl = 0.5;
    o.detail << " H_0.99 " << g(r.below.value) << "+-" << g(r.below.se) << " (exact " << g(*r.below_exact) << "), H_1.01 "
             << g(r.above.value) << "+-" << g(r.above.se) << " (exact " << g(*r.above_exact) << "), KL " << kl;
    o.require(std::abs(r.below.value - *r.below_exact) <= kEntropySigmas * r.below.se, "q=0.99 closed form");
    o.require(std::abs(r.above.value - *r.above_exact) <= kEntropySigmas * r.above.se, "q=1.01 closed form");
    o.require(r.below.value - kEntropySigmas * r.below.se <= kl, "q=0.99 below KL");
    o.require(r.above.value + kEntropySigmas * r.above.se >= kl, "q=1.01 above KL");
    o.require(*r.below_exact < kl && kl < *r.above_exact, "closed forms bracket KL");
}

// 3. Closed-form prices by independent schemes.
void criterion3(Outcome& o) {
    const PricingSetup s = base_setup();
    const MarketModel& mk = s.model;
    const PathEnsemble ens = simulate(mk, TimeGrid::graded(mk.T, s.steps, s.grading), s.paths, s.seed);
    const Claim dig = unhedged_digital(mk);
    const double third = 1.0 / 3.0;

    const BSDESolution mc = solve_unhedged(dig, mk, ens, kQ2G1);
    const BSDESolution ls = solve_lsmc_bsde(dig, mk, ens, kQ2G1, s.lsmc);
    const BSDESolution pde = solve_pde_bsde(dig, mk, kQ2G1, s.pde);
    const Claim ramp = Claim::make("ramp", Payoff::parse("ind(Wp[0], " + std::to_string(pde.pde->smoothing) + ")"));
    const double smoothed = unhedged_quadrature(ramp, kQ2G1, mk.T);
    auto tol = [](const BSDESolution& x) { return std::max(kPriceSigmas * x.se, kPriceFloor); };
    o.detail << " unhedged: closed-form MC " << g(mc.Y0) << "+-" << g(mc.se) << ", LSMC " << g(ls.Y0) << "+-"
             << g(ls.se) << ", PDE " << g(pde.Y0) << " vs smoothed target " << g(smoothed) << ";";
    o.require(std::abs(mc.Y0 - third) <= tol(mc), "solve_unhedged");
    o.require(std::abs(ls.Y0 - third) <= tol(ls), "solve_lsmc");
    o.require(std::abs(pde.Y0 - smoothed) <= tol(pde), "solve_pde");

    const Claim att = registry_claim("digital_w", {}, mk);
    const BSDESolution la = solve_lsmc_bsde(att, mk, ens, kQ2G1, s.lsmc);
    const BSDESolution ca = solve_attainable(att, mk, ens);
    o.detail << " attainable: LSMC " << g(la.Y0) << "+-" << g(la.se) << ", closed-form MC " << g(ca.Y0) << "+-"
             << g(ca.se) << ", |Zperp|/noise " << g(la.lsmc->zperp_ratio());
    o.require(std::abs(la.Y0 - 0.5) <= kPriceSigmas * la.se, "attainable LSMC");
    o.require(std::abs(ca.Y0 - 0.5) <= kPriceSigmas * ca.se, "attainable closed form");
    o.require(la.lsmc->zperp_ratio() <= kZperpNoiseRatio, "Z_perp under noise floor");
}

// 4. PDE and LSMC agree on a smooth mixed claim; the mesh sequence converges.
void criterion4(Outcome& o) {
    const PricingSetup s = base_setup();
    const MarketModel& mk = s.model;
    const Claim c = smooth_mixed(mk);
    PdeConfig cfg = s.pde;
    std::vector<double> y;
    for (std::size_t pts : {101u, 201u, 401u}) {
        cfg.points = pts;
        cfg.steps = pts - 1;
        y.push_back(solve_pde_bsde(c, mk, kQ2G1, cfg).Y0);
    }
    const PathEnsemble ens = simulate(mk, TimeGrid::graded(mk.T, s.steps, s.grading), s.paths, s.seed);
    LsmcConfig lc = s.lsmc;
    lc.basis = LsmcBasis::Polynomial;
    lc.degree = 3;
    const BSDESolution ls = solve_lsmc_bsde(c, mk, ens, kQ2G1, lc);
    const double tol = std::max(kAgreementRange * (c.hi - c.lo), kAgreementSigmas * ls.se);
    const double d1 = std::abs(y[1] - y[0]), d2 = std::abs(y[2] - y[1]);
    o.detail << " PDE 101/201/401: " << g(y[0]) << " " << g(y[1]) << " " << g(y[2]) << " (changes " << g(d1) << ", "
             << g(d2) << "), LSMC deg 3 " << g(ls.Y0) << "+-" << g(ls.se) << ", tol " << g(tol);
    o.require(std::abs(y[1] - ls.Y0) <= tol, "PDE vs LSMC");
    o.require(d2 < kRefinementRatio * d1, "refinement ratio");
}

// 5. Duality at the optimizers and on constant candidate grids.
void criterion5(Outcome& o) {
    const PricingEngine eng(base_setup());
    for (const Claim& c : {smooth_mixed(eng.model()), unhedged_digital(eng.model())}) {
        PriceReport r = eng.price(c, kQ2G1);
        const bool optimizers = c.id == "smooth_mixed";
        if (optimizers) {
            eng.add_duals(r, c, kQ2G1, false);
            for (const auto& d : r.duals) {
                if (d.problem == "ce") continue;
                o.detail << ' ' << c.id << ' ' << d.problem << " at optimizer " << g(d.value) << " vs F0 "
                         << g(r.F0.value) << " (gap " << g(d.gap) << ", allowance " << g(d.allowance) << ");";
                o.require(d.pass, c.id + " " + d.problem + " optimizer");
            }
        }
        std::vector<DualRecord> grid = eng.problem1_grid(c, kQ2G1, r.F0);
        const auto g2 = eng.problem2_grid(c, kQ2G1, r.F0);
        grid.insert(grid.end(), g2.begin(), g2.end());
        double worst = INFINITY;
        std::size_t undercut = 0;
        for (const auto& d : grid) {
            const double slack = d.gap + kDualSigmas * combined_se(d.se, d.reference_se);
            worst = std::min(worst, slack);
            if (!d.pass) ++undercut;
        }
        o.detail << ' ' << c.id << " grids: " << grid.size() << " candidates, " << undercut
                 << " undercut, min slack " << g(worst) << ";";
        o.require(undercut == 0, c.id + " candidate grid");
    }
}

// 6. CE0 <= F0 <= riskneutral0 on the battery, equalities at the extremes.
void criterion6(Outcome& o) {
    const PricingEngine eng(base_setup());
    const BoundsReport r = eng.bounds_report(default_battery(eng.model()), kQ2G1);
    std::size_t failed = 0;
    for (const auto& k : r.checks)
        if (!k.pass) {
            ++failed;
            o.detail << " failed " << k.name << ": " << g(k.lhs) << ' ' << k.relation << ' ' << g(k.rhs) << " tol "
                     << g(k.tol) << ';';
        }
    bool unhedged = false, attainable = false;
    for (const auto& k : r.checks) {
        if (k.name.find("unhedged_ce_equals_price") != std::string::npos) unhedged = k.pass;
        if (k.name.find("attainable_price_equals_riskneutral") != std::string::npos &&
            k.name.find("constant") == std::string::npos)
            attainable = k.pass;
    }
    for (const auto& c : r.claims)
        o.detail << ' ' << c.claim_id << ": CE0 " << g(c.CE0.value) << " F0 " << g(c.F0.value) << " RN "
                 << g(c.riskneutral0.value) << ';';
    o.detail << ' ' << r.checks.size() << " checks";
    o.require(failed == 0, "bounds checks");
    o.require(unhedged, "unhedged CE0 = F0");
    o.require(attainable, "attainable F0 = riskneutral0");
}

// 7. Behaviour in gamma and the scaling identity.
void criterion7(Outcome& o) {
    const PricingEngine eng(base_setup());
    const Claim dig = unhedged_digital(eng.model());
    const SweepReport sw = eng.gamma_sweep(dig, 2.0, {0.01, 0.1, 1.0, 10.0, 100.0});
    o.detail << " F0 over gamma:";
    for (const auto& row : sw.rows) o.detail << ' ' << g(row.F0.value);
    o.detail << ", riskneutral0 " << g(sw.rows.front().riskneutral0.value) << ", distorted inf "
             << g(sw.distorted_infimum) << ';';
    for (const auto& k : sw.checks) {
        if (k.name == "small_gamma_limit") o.require(k.tol <= kSmallGammaGap, "small-gamma tolerance");
        o.require(k.pass, k.name);
    }
    const QGammaParams p(2.0, 1.0);
    for (const Claim& c : {dig, registry_claim("digital_w", {}, eng.model()), smooth_mixed(eng.model())}) {
        for (double k : {0.5, 2.0}) {
            const Check ch = eng.scaling_identity(c, k, p);
            const double cap = c.hedge == HedgeClass::General ? kScalingPde : kScalingClosedForm;
            o.detail << " scaling " << c.id << " k=" << k << ": |diff| " << g(std::abs(ch.lhs - ch.rhs)) << ';';
            o.require(ch.pass && std::abs(ch.lhs - ch.rhs) <= cap, "scaling " + c.id);
        }
    }
}

// 8. Property matrix on the battery.
void criterion8(Outcome& o) {
    const PricingEngine eng(base_setup());
    const PropertyReport r = eng.property_suite(kQ2G1);
    std::size_t failed = 0;
    double tc = 0.0;
    for (const auto& k : r.checks) {
        if (k.name.rfind("time_consistency", 0) == 0) {
            tc = std::max(tc, std::abs(k.lhs - k.rhs));
            o.require(k.tol <= kTimeConsistency, "time-consistency tolerance");
        }
        if (!k.pass) {
            ++failed;
            o.detail << " failed " << k.name << ": " << g(k.lhs) << ' ' << k.relation << ' ' << g(k.rhs) << " tol "
                     << g(k.tol) << ';';
        }
    }
    o.detail << ' ' << r.checks.size() << " checks, max time-consistency gap " << g(tc);
    o.require(failed == 0, "property checks");
}

// 9. Nested-simulation submartingale check.
void criterion9(Outcome& o) {
    const MarketModel mk = market();
    const PathEnsemble ens = simulate(mk, TimeGrid::uniform(1.0, 40), 2000, kSeed + 9);
    const MeasureSpec ms = MeasureSpec::constant("alpha=0.8", {0.8});
    for (double q : {0.5, 2.0})
        for (std::size_t k : {10u, 20u}) {
            const SubmartingaleReport r = submartingale_check(mk, ens, ms, q, k, 256, 2000);
            o.detail << " q=" << q << " t=" << ens.grid()[k] << ": " << r.violations << '/' << r.paths << ';';
            o.require(r.fraction < kViolationRate, "violation rate");
        }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// 10. Report files are byte-identical across runs and thread counts.
void criterion10(Outcome& o) {
    const std::string market_block = "market: {m: 1, n: 1, lambda: {kind: constant, level: [0.6]}}\n";
    const std::string params = "params: {q: 2.0, gamma: 1.0}\n";
    struct Case {
        std::string command, claim, extra;
    };
    const std::vector<Case> cases = {
        {"price", "claim: {name: smooth_mixed}\n", "numerics: {paths: 20000, steps: 20, scheme: lsmc}\n"},
        {"price", "claim: {name: digital_wperp}\n", "numerics: {paths: 20000, steps: 20}\n"},
        {"entropy", "claim: {name: constant}\n",
         "numerics: {paths: 20000, steps: 40}\nentropy: {measures: [{label: a, alpha: [0.8]}], kl_delta: 0.01, "
         "submartingale: {times: [0.5], inner: 64, outer: 200}}\n"},
        {"dual", "claim: {name: smooth_mixed}\n",
         "numerics: {paths: 10000, steps: 20, pde: {points: 61, steps: 60}, grid: {points: 3}}\ndual: {grids: true}\n"},
        {"sweep", "claim: {name: digital_wperp}\n", "numerics: {paths: 20000, steps: 20}\n"},
        {"properties", "claim: {name: digital_wperp}\n",
         "numerics: {paths: 5000, steps: 10, pde: {points: 41, steps: 40}, grid: {points: 3}}\n"},
    };
    const fs::path root = fs::temp_directory_path() / "tsallis_acceptance_repro";
    fs::remove_all(root);
    std::size_t files = 0, mismatches = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& cs = cases[i];
        const app::ScenarioConfig cfg =
            app::parse_config(market_block + params + cs.claim + cs.extra, "case" + std::to_string(i) + ".yaml");
        std::vector<fs::path> dirs;
        for (unsigned threads : {1u, 4u, 1u}) {
            const fs::path dir = root / (std::to_string(i) + "_" + std::to_string(dirs.size()));
            set_thread_count(threads);
            std::ostringstream log;
            app::run_command(cfg, app::RunOptions{cs.command, dir.string(), false, threads}, log);
            dirs.push_back(dir);
        }
        set_thread_count(1);
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            const auto name = e.path().filename();
            if (name == "metadata.json") continue;
            ++files;
            const std::string ref = slurp(e.path());
            for (std::size_t j = 1; j < dirs.size(); ++j)
                if (slurp(dirs[j] / name) != ref) {
                    ++mismatches;
                    o.detail << " mismatch " << cs.command << '/' << name.string() << ';';
                }
        }
    }
    o.detail << ' ' << cases.size() << " scenarios, " << files << " files compared over 3 runs (threads 1, 4, 1), "
             << mismatches << " mismatches";
    o.require(files >= cases.size() * 2 && mismatches == 0, "byte identity");
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {"entropy representation equivalence", criterion1},
        {"q -> 1 bracket of the relative entropy", criterion2},
        {"closed-form prices by independent schemes", criterion3},
        {"PDE / LSMC scheme agreement and mesh convergence", criterion4},
        {"duality at optimizers and candidate grids", criterion5},
        {"sandwich bounds on the claim battery", criterion6},
        {"gamma monotonicity, limits and scaling", criterion7},
        {"property matrix", criterion8},
        {"submartingale property", criterion9},
        {"reproducibility across runs and threads", criterion10},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    set_thread_count(1);
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [error: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d %s  %s (%.1f s):%s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
