#include "tsallis/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tsallis/parallel.hpp"
#include "tsallis/stats.hpp"

namespace tsallis {

const char* scheme_choice_name(SchemeChoice s) {
    switch (s) {
        case SchemeChoice::Auto: return "auto";
        case SchemeChoice::Pde: return "pde";
        case SchemeChoice::Lsmc: return "lsmc";
    }
    return "auto";
}

double Quote::tolerance() const { return std::max(3.0 * se, scheme_tol); }

Check make_check(std::string name, double lhs, const char* relation, double rhs, double tol) {
    Check c{std::move(name), relation, lhs, rhs, tol, false};
    const std::string r = relation;
    if (r == "<=")
        c.pass = lhs <= rhs + tol;
    else if (r == ">=")
        c.pass = lhs >= rhs - tol;
    else if (r == "==")
        c.pass = std::abs(lhs - rhs) <= tol;
    else
        throw std::invalid_argument("make_check: unknown relation " + r);
    return c;
}

double pair_tolerance(const Quote& a, const Quote& b) {
    return std::max({3.0 * combined_se(a.se, b.se), a.scheme_tol, b.scheme_tol});
}

namespace {

bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Quote to_quote(const BSDESolution& s) { return Quote{s.Y0, s.se, s.scheme_tol, scheme_name(s.scheme)}; }

bool is_constant(const Claim& c) { return !c.payoff.depends_on_w() && !c.payoff.depends_on_wp(); }

double constant_value(const Claim& c) {
    const double zeros[kMaxDim] = {};
    return c(zeros, zeros);
}

Quote exact(double v) { return Quote{v, 0.0, 0.0, scheme_name(Scheme::ClosedForm)}; }

}  // namespace

bool PriceReport::pass() const {
    return all_pass(checks) && std::all_of(duals.begin(), duals.end(), [](const DualRecord& d) { return d.pass; });
}

bool SweepReport::pass() const { return all_pass(checks); }

bool BoundsReport::pass() const {
    return all_pass(checks) &&
           std::all_of(claims.begin(), claims.end(), [](const PriceReport& r) { return r.pass(); });
}

bool PropertyReport::pass() const { return all_pass(checks); }

PricingEngine::PricingEngine(PricingSetup setup) : setup_(std::move(setup)) {
    setup_.model.validate();
    if (setup_.paths < 2) throw std::invalid_argument("pricing: need at least 2 paths");
    if (setup_.steps < 1) throw std::invalid_argument("pricing: need at least 1 time step");
    if (setup_.grid_points < 1) throw std::invalid_argument("pricing: candidate grid is empty");
    ens_ = std::make_shared<const PathEnsemble>(simulate(
        setup_.model, TimeGrid::graded(setup_.model.T, setup_.steps, setup_.grading), setup_.paths, setup_.seed));
}

BSDESolution PricingEngine::solve_field(const Claim& claim, const QGammaParams& params, Driver driver) const {
    const auto& mk = setup_.model;
    const bool pde = setup_.scheme != SchemeChoice::Lsmc && mk.m == 1 && mk.n == 1;
    if (setup_.scheme == SchemeChoice::Pde && !pde) throw std::invalid_argument("pricing: the PDE needs m = n = 1");
    if (pde) {
        return driver == Driver::CertaintyEquivalent ? solve_ce_pde(claim, mk, params, setup_.pde)
                                                     : solve_pde_bsde(claim, mk, params, setup_.pde);
    }
    if (driver == Driver::CertaintyEquivalent) {
        LsmcSolution sol = solve_lsmc(claim, mk, *ens_, params, setup_.lsmc, Driver::CertaintyEquivalent);
        BSDESolution s;
        s.scheme = Scheme::Lsmc;
        s.driver = driver;
        s.Y0 = sol.Y0;
        s.se = sol.se;
        s.warnings = sol.diag.warnings;
        auto p = std::make_shared<const LsmcSolution>(std::move(sol));
        s.lsmc = p;
        s.field = p;
        return s;
    }
    return solve_lsmc_bsde(claim, mk, *ens_, params, setup_.lsmc);
}

namespace {

BSDESolution buyer_solution(const PricingEngine& eng, const Claim& claim, const QGammaParams& params) {
    const Admissibility adm = check_admissible(claim, params);
    if (!adm.ok) throw std::invalid_argument("claim '" + claim.id + "' not admissible: " + adm.reason);
    if (is_constant(claim)) {
        BSDESolution s;
        s.Y0 = constant_value(claim);
        return s;
    }
    if (eng.setup().scheme == SchemeChoice::Auto) {
        if (claim.hedge == HedgeClass::Attainable) return solve_attainable(claim, eng.model(), eng.ensemble());
        if (claim.hedge == HedgeClass::Unhedged) return solve_unhedged(claim, eng.model(), eng.ensemble(), params);
    }
    return eng.solve_field(claim, params, Driver::Pricing);
}

}  // namespace

Quote PricingEngine::buyer(const Claim& claim, const QGammaParams& params) const {
    return to_quote(buyer_solution(*this, claim, params));
}

Quote PricingEngine::certainty_equivalent(const Claim& claim, const QGammaParams& params) const {
    if (is_constant(claim)) return exact(constant_value(claim));
    return to_quote(solve_ce(claim, setup_.model, *ens_, params));
}

Quote PricingEngine::riskneutral(const Claim& claim) const {
    if (is_constant(claim)) return exact(constant_value(claim));
    return to_quote(risk_neutral(claim, setup_.model, *ens_));
}

std::optional<Quote> PricingEngine::seller_price(const Claim& claim, const QGammaParams& params) const {
    const Claim neg = claim.affine(-1.0, 0.0, claim.id + "_negated");
    if (!check_admissible(neg, params).ok) return std::nullopt;
    Quote q = buyer(neg, params);
    q.value = 0.0 - q.value;  // no negative zero in reports
    return q;
}

PriceReport PricingEngine::price(const Claim& claim, const QGammaParams& params) const {
    PriceReport r;
    r.claim_id = claim.id;
    r.payoff = claim.payoff.text();
    r.hedge = hedge_name(claim.hedge);
    r.lo = claim.lo;
    r.hi = claim.hi;
    r.q = params.q;
    r.gamma = params.gamma;

    const BSDESolution sol = buyer_solution(*this, claim, params);
    r.F0 = to_quote(sol);
    r.warnings = sol.warnings;
    r.CE0 = certainty_equivalent(claim, params);
    r.riskneutral0 = riskneutral(claim);

    r.checks.push_back(make_check("ce_below_price", r.CE0.value, "<=", r.F0.value, pair_tolerance(r.CE0, r.F0)));
    r.checks.push_back(make_check("price_below_riskneutral", r.F0.value, "<=", r.riskneutral0.value,
                                  pair_tolerance(r.F0, r.riskneutral0)));
    if (is_constant(claim)) {
        const double c = constant_value(claim);
        r.checks.push_back(make_check("constant_exact", r.F0.value, "==", c, 0.0));
    } else if (claim.hedge == HedgeClass::Unhedged) {
        r.checks.push_back(make_check("unhedged_ce_equals_price", r.F0.value, "==", r.CE0.value,
                                      pair_tolerance(r.F0, r.CE0)));
    } else if (claim.hedge == HedgeClass::Attainable) {
        r.checks.push_back(make_check("attainable_price_equals_riskneutral", r.F0.value, "==", r.riskneutral0.value,
                                      pair_tolerance(r.F0, r.riskneutral0)));
    }
    if (setup_.seller) {
        r.seller = seller_price(claim, params);
        if (r.seller)
            r.checks.push_back(
                make_check("buyer_below_seller", r.F0.value, "<=", r.seller->value, pair_tolerance(r.F0, *r.seller)));
        else
            r.warnings.push_back("seller price skipped: -xi is not admissible for these (q, gamma)");
    }
    if (sol.field) {
        const OptimalControls oc = extract_optimizers(sol, setup_.model, params);
        const double zeros[kMaxDim] = {};
        double a[kMaxDim], th[kMaxDim];
        oc.alpha_star(0.0, zeros, zeros, a);
        oc.theta_star(0.0, zeros, zeros, th);
        OptimizerSummary s;
        s.alpha_star0 = a[0];
        s.theta_star0 = th[0];
        const MartingaleReport mr = martingale_check_qxi(sol, claim, setup_.model, *ens_, params);
        s.martingale_estimate = mr.estimate;
        s.martingale_se = mr.se;
        s.martingale_pass = mr.pass;
        r.optimizers = s;
        r.checks.push_back(make_check("qxi_martingale", mr.estimate, "==", mr.Y0, mr.allowance));
    }
    return r;
}

DualRecord PricingEngine::dual_objective(const MeasureSpec& candidate, const Claim& claim,
                                         const QGammaParams& params, const Quote& reference, const char* problem,
                                         bool optimizer, double extra_allowance) const {
    const auto& mk = setup_.model;
    const int m = mk.m, n = mk.n;
    const std::size_t N = ens_->size(), K = ens_->steps();
    const auto& grid = ens_->grid();
    const double q = params.q, w = q / (2.0 * params.gamma);
    std::vector<double> obj(N), dist(N);
    parallel_for(N, [&](std::size_t b, std::size_t e) {
        PathBuffer buf;
        double tb[kMaxDim], ta[kMaxDim];
        auto loads = [&](std::size_t k) {
            const double t = grid[k];
            if (candidate.has_beta())
                candidate.beta(t, buf.w_at(k, m), buf.wp_at(k, n), tb);
            else
                std::fill_n(tb, m, 0.0);
            candidate.alpha(t, buf.w_at(k, m), buf.wp_at(k, n), ta);
            double sq = 0.0;
            for (int j = 0; j < m; ++j) sq += tb[j] * tb[j];
            for (int j = 0; j < n; ++j) sq += ta[j] * ta[j];
            if (!std::isfinite(sq)) throw std::domain_error("dual objective: non-finite candidate loading");
            return sq;
        };
        for (std::size_t i = b; i < e; ++i) {
            load_path(mk, *ens_, i, Frame::Qmin, buf);
            double logd = 0.0, integral = 0.0;
            double sq = loads(0), left = sq;  // D_0 = 1
            for (std::size_t k = 0; k < K; ++k) {
                double dot = 0.0;
                for (int j = 0; j < m; ++j) dot += tb[j] * buf.dB[k * m + j];
                for (int j = 0; j < n; ++j) dot += ta[j] * buf.dBp[k * n + j];
                logd += dot - 0.5 * sq * grid.dt(k);
                sq = loads(k + 1);
                const double right = std::exp(q * logd) * sq;
                integral += 0.5 * (left + right) * grid.dt(k);
                left = right;
            }
            const double xi = claim(buf.w_at(K, m), buf.wp_at(K, n));
            dist[i] = std::exp(q * logd) * xi;
            obj[i] = dist[i] + w * integral;
        }
    });
    const Estimate eo = mean_se(obj), ed = mean_se(dist);
    DualRecord r;
    r.problem = problem;
    r.candidate = candidate.label;
    r.optimizer = optimizer;
    r.value = eo.value;
    r.se = eo.se;
    r.distorted = ed.value;
    r.distorted_se = ed.se;
    r.reference = reference.value;
    r.reference_se = reference.se;
    r.gap = r.value - r.reference;
    r.allowance = std::max(4.0 * combined_se(r.se, reference.se), reference.scheme_tol) + extra_allowance;
    r.pass = optimizer ? std::abs(r.gap) <= r.allowance : r.gap >= -r.allowance;
    return r;
}

DualRecord PricingEngine::problem1_objective(const MeasureSpec& candidate, const Claim& claim,
                                             const QGammaParams& params, const Quote& F0, bool optimizer,
                                             double extra_allowance) const {
    if (candidate.has_beta()) throw std::invalid_argument("problem 1: candidate must be a martingale measure (no beta)");
    return dual_objective(candidate, claim, params, F0, "problem1", optimizer, extra_allowance);
}

DualRecord PricingEngine::ce_dual_objective(const MeasureSpec& candidate, const Claim& claim,
                                            const QGammaParams& params, const Quote& CE0, bool optimizer,
                                            double extra_allowance) const {
    return dual_objective(candidate, claim, params, CE0, "ce", optimizer, extra_allowance);
}

DualRecord PricingEngine::problem2_value(const LoadingFn& theta, const std::string& label, const Claim& claim,
                                         const QGammaParams& params, const Quote& F0, bool optimizer,
                                         double extra_allowance) const {
    const YthetaResult y = backward_recursion_Ytheta(theta, claim, setup_.model, *ens_, params, setup_.lsmc);
    DualRecord r;
    r.problem = "problem2";
    r.candidate = label;
    r.optimizer = optimizer;
    r.value = y.Y0;
    r.se = y.se;
    r.reference = F0.value;
    r.reference_se = F0.se;
    r.gap = r.value - r.reference;
    r.allowance = std::max(4.0 * combined_se(r.se, F0.se), F0.scheme_tol) + extra_allowance;
    r.pass = optimizer ? std::abs(r.gap) <= r.allowance : r.gap >= -r.allowance;
    return r;
}

std::vector<double> PricingEngine::grid() const {
    const std::size_t P = setup_.grid_points;
    std::vector<double> g(P);
    for (std::size_t i = 0; i < P; ++i)
        g[i] = P == 1 ? setup_.grid_lo
                      : setup_.grid_lo + (setup_.grid_hi - setup_.grid_lo) * static_cast<double>(i) /
                                             static_cast<double>(P - 1);
    return g;
}

namespace {

std::string fmt_loading(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::vector<DualRecord> PricingEngine::problem1_grid(const Claim& claim, const QGammaParams& params,
                                                     const Quote& F0) const {
    std::vector<DualRecord> out;
    for (double a : grid()) {
        const MeasureSpec c =
            MeasureSpec::constant("alpha=" + fmt_loading(a), std::vector<double>(setup_.model.n, a));
        out.push_back(problem1_objective(c, claim, params, F0));
    }
    return out;
}

std::vector<DualRecord> PricingEngine::problem2_grid(const Claim& claim, const QGammaParams& params,
                                                     const Quote& F0) const {
    std::vector<DualRecord> out;
    const int n = setup_.model.n;
    for (double a : grid()) {
        const LoadingFn th = [a, n](double, const double*, const double*, double* o) { std::fill_n(o, n, a); };
        out.push_back(problem2_value(th, "theta=" + fmt_loading(a), claim, params, F0));
    }
    return out;
}

std::vector<DualRecord> PricingEngine::ce_grid(const Claim& claim, const QGammaParams& params,
                                               const Quote& CE0) const {
    std::vector<DualRecord> out;
    const std::vector<double> g = grid();
    for (std::size_t i = 0; i < g.size(); i += 2)
        for (std::size_t j = 0; j < g.size(); j += 2) {
            const MeasureSpec c = MeasureSpec::constant(
                "beta=" + fmt_loading(g[i]) + ",alpha=" + fmt_loading(g[j]),
                std::vector<double>(setup_.model.n, g[j]), std::vector<double>(setup_.model.m, g[i]));
            out.push_back(ce_dual_objective(c, claim, params, CE0));
        }
    return out;
}

void PricingEngine::add_duals(PriceReport& report, const Claim& claim, const QGammaParams& params,
                              bool grids) const {
    const BSDESolution sol = solve_field(claim, params, Driver::Pricing);
    const OptimalControls oc = extract_optimizers(sol, setup_.model, params);
    // The optimizer is only as good as the field it is read from.
    const double extra = sol.scheme_tol;
    report.duals.push_back(problem1_objective(oc.alpha_measure(), claim, params, report.F0, true, extra));
    const MeasureSpec th = oc.theta_measure();
    report.duals.push_back(problem2_value(th.alpha, th.label, claim, params, report.F0, true, extra));

    const BSDESolution ce = solve_field(claim, params, Driver::CertaintyEquivalent);
    const OptimalControls oce = extract_optimizers(ce, setup_.model, params);
    report.duals.push_back(ce_dual_objective(oce.ce_measure(), claim, params, report.CE0, true, ce.scheme_tol));

    if (grids) {
        for (auto& d : problem1_grid(claim, params, report.F0)) report.duals.push_back(std::move(d));
        for (auto& d : problem2_grid(claim, params, report.F0)) report.duals.push_back(std::move(d));
        for (auto& d : ce_grid(claim, params, report.CE0)) report.duals.push_back(std::move(d));
    }
}

double PricingEngine::distorted_infimum(const Claim& claim, const QGammaParams& params) const {
    double best = INFINITY;
    for (const DualRecord& d : problem1_grid(claim, params, Quote{})) best = std::min(best, d.distorted);
    return best;
}

BoundsReport PricingEngine::bounds_report(const std::vector<Claim>& battery, const QGammaParams& params) const {
    BoundsReport out;
    for (const Claim& c : battery) {
        PriceReport r = price(c, params);
        double inf = INFINITY, inf_se = 0.0;
        for (const DualRecord& d : problem1_grid(c, params, r.F0))
            if (d.distorted < inf) {
                inf = d.distorted;
                inf_se = d.distorted_se;
            }
        const Quote qi{inf, inf_se, 0.0, "monte_carlo"};
        out.checks.push_back(make_check(c.id + ":distorted_infimum_below_price", inf, "<=", r.F0.value,
                                        pair_tolerance(qi, r.F0)));
        for (const Check& k : r.checks) {
            Check named = k;
            named.name = c.id + ":" + k.name;
            out.checks.push_back(named);
        }
        out.claims.push_back(std::move(r));
    }
    return out;
}

SweepReport PricingEngine::gamma_sweep(const Claim& claim, double q, const std::vector<double>& gammas) const {
    if (gammas.empty()) throw std::invalid_argument("gamma sweep: no gamma values");
    std::vector<double> g = gammas;
    std::sort(g.begin(), g.end());
    SweepReport out;
    out.claim_id = claim.id;
    out.q = q;
    for (double gm : g) {
        const QGammaParams p(q, gm);
        SweepRow row;
        row.gamma = gm;
        row.F0 = buyer(claim, p);
        row.CE0 = certainty_equivalent(claim, p);
        row.riskneutral0 = riskneutral(claim);
        out.rows.push_back(row);
    }
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
        const auto& a = out.rows[i];
        const auto& b = out.rows[i + 1];
        std::ostringstream name;
        name << "nonincreasing:gamma=" << a.gamma << "->" << b.gamma;
        out.checks.push_back(make_check(name.str(), b.F0.value, "<=", a.F0.value, pair_tolerance(a.F0, b.F0)));
    }
    out.distorted_infimum = distorted_infimum(claim, QGammaParams(q, g.front()));
    const auto& lo = out.rows.front();
    if (lo.gamma <= 0.01 + 1e-15)
        out.checks.push_back(make_check("small_gamma_limit", lo.F0.value, "==", lo.riskneutral0.value, 0.01));
    const auto& hi = out.rows.back();
    if (hi.gamma >= 100.0 - 1e-12) {
        // The infimum over all measures is approached at rate 1/gamma; the
        // grid only samples it.
        const double tol = std::max(hi.F0.tolerance(), 1.0 / hi.gamma);
        out.checks.push_back(make_check("large_gamma_limit", hi.F0.value, "==", out.distorted_infimum, tol));
    }
    return out;
}

Check PricingEngine::scaling_identity(const Claim& claim, double kappa, const QGammaParams& params) const {
    if (!(kappa > 0.0)) throw std::invalid_argument("scaling identity: kappa must be positive");
    std::ostringstream id;
    id << claim.id << "_x" << kappa;
    const Claim scaled = claim.affine(kappa, 0.0, id.str());
    const Quote lhs = buyer(scaled, params);
    Quote rhs = buyer(claim, QGammaParams(params.q, kappa * params.gamma));
    rhs.value *= kappa;
    rhs.se *= kappa;
    rhs.scheme_tol *= kappa;
    double tol;
    if (lhs.scheme == scheme_name(Scheme::ClosedForm) && rhs.scheme == lhs.scheme)
        tol = 1e-12;  // same random numbers, same arithmetic up to rounding
    else if (lhs.scheme == scheme_name(Scheme::Pde))
        tol = 1e-3;
    else
        tol = pair_tolerance(lhs, rhs);
    std::ostringstream name;
    name << "scaling_identity:" << claim.id << ":kappa=" << kappa;
    return make_check(name.str(), lhs.value, "==", rhs.value, tol);
}

PropertyReport PricingEngine::property_suite(const QGammaParams& params) const {
    const auto& mk = setup_.model;
    PropertyReport out;
    auto& C = out.checks;
    auto claim = [&](const std::string& id, const std::string& expr) {
        return Claim::make(id, Payoff::parse(expr, mk.m, mk.n));
    };
    const Claim zero = Claim::make("zero", Payoff::constant(0.0));
    const Claim ud = claim("digital_wperp", "ind(Wp[0])");
    const Claim ud_low = claim("digital_wperp_shifted", "ind(Wp[0]-0.5)");
    const Claim uh = claim("tanh_wperp", "0.5+0.5*tanh(Wp[0])");
    const Claim sm = claim("smooth_mixed", "0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0])");
    const Claim sm_low = claim("smooth_mixed_shifted", "0.5+0.25*tanh(W[0])+0.25*tanh(Wp[0]-0.5)");
    const Claim sm2 = claim("smooth_mixed_alt", "0.5+0.4*tanh(2*Wp[0])-0.1*tanh(W[0])");

    auto F = [&](const Claim& c, const QGammaParams& p) { return buyer(c, p); };

    // normalization
    C.push_back(make_check("normalization", F(zero, params).value, "==", 0.0, 0.0));

    // monotonicity
    for (auto [hi, lo] : {std::pair{&ud, &ud_low}, std::pair{&sm, &sm_low}}) {
        const Quote a = F(*hi, params), b = F(*lo, params);
        C.push_back(make_check("monotonicity:" + hi->id + ">=" + lo->id, a.value, ">=", b.value, pair_tolerance(a, b)));
    }

    // concavity
    for (auto [x, y] : {std::pair{&ud, &uh}, std::pair{&sm, &sm2}}) {
        const Quote fx = F(*x, params), fy = F(*y, params);
        for (double k : {0.25, 0.5, 0.75}) {
            std::ostringstream id;
            id << "mix_" << x->id << "_" << y->id << "_" << k;
            const Claim mixc = Claim::make(id.str(), Payoff::mix(k, x->payoff, y->payoff));
            const Quote fm = F(mixc, params);
            Quote rhs{k * fx.value + (1 - k) * fy.value, k * fx.se + (1 - k) * fy.se,
                      std::max(fx.scheme_tol, fy.scheme_tol), fx.scheme};
            std::ostringstream name;
            name << "concavity:" << x->id << "," << y->id << ":kappa=" << k;
            C.push_back(make_check(name.str(), fm.value, ">=", rhs.value, pair_tolerance(fm, rhs)));
        }
    }

    // scaling: kappa < 1 superlinear, kappa > 1 sublinear
    for (const Claim* c : {&ud, &sm}) {
        const Quote base = F(*c, params);
        for (double k : {0.5, 2.0}) {
            std::ostringstream id;
            id << c->id << "_x" << k;
            const Claim s = c->affine(k, 0.0, id.str());
            if (!check_admissible(s, params).ok) continue;
            const Quote fs = F(s, params);
            Quote rhs{k * base.value, k * base.se, k * base.scheme_tol, base.scheme};
            std::ostringstream name;
            name << "scaling:" << c->id << ":kappa=" << k;
            C.push_back(make_check(name.str(), fs.value, k < 1.0 ? ">=" : "<=", rhs.value, pair_tolerance(fs, rhs)));
        }
    }

    // cash additivity by quadrant of (q - 1, c)
    for (double q : {0.5, 2.0}) {
        const QGammaParams p(q, params.gamma);
        for (const Claim* c : {&ud, &sm}) {
            if (!check_admissible(*c, p).ok) continue;
            const Quote base = F(*c, p);
            for (double cash : {0.2, -0.2}) {
                std::ostringstream id;
                id << c->id << (cash > 0 ? "_plus" : "_minus");
                const Claim s = c->affine(1.0, cash, id.str());
                if (!check_admissible(s, p).ok) continue;
                const Quote fs = F(s, p);
                const bool super = (q < 1.0 && cash <= 0.0) || (q > 1.0 && cash >= 0.0);
                Quote rhs{base.value + cash, base.se, base.scheme_tol, base.scheme};
                std::ostringstream name;
                name << "cash:" << c->id << ":q=" << q << ":c=" << cash;
                C.push_back(make_check(name.str(), fs.value, super ? ">=" : "<=", rhs.value, pair_tolerance(fs, rhs)));
            }
        }
    }

    // time consistency: restart the PDE from u(t, .) with the same knots
    if (mk.m == 1 && mk.n == 1) {
        PdeConfig cfg = setup_.pde;
        cfg.richardson = Richardson::Off;
        cfg.snapshot_stride = 1;
        const PdeSolution full = solve_pde(sm, mk, params, cfg, Driver::Pricing);
        const std::size_t kt = full.knots.size() / 2;
        const std::vector<double> sub(full.knots.begin(), full.knots.begin() + static_cast<std::ptrdiff_t>(kt) + 1);
        PdeConfig rc = cfg;
        rc.snapshot_stride = 0;
        const PdeSolution restart =
            solve_pde_from(full.slice_at(kt), sub, full.L, full.points, mk, params, rc, Driver::Pricing);
        const auto& a = full.slice_at(0);
        const auto& b = restart.slice_at(0);
        double gap = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
        C.push_back(make_check("time_consistency:max_abs_gap", gap, "<=", 0.0, 1e-8));
    }
    return out;
}

std::vector<Claim> default_battery(const MarketModel& model) {
    std::vector<Claim> b;
    b.push_back(registry_claim("constant", {{"value", 0.3}}, model));
    b.push_back(registry_claim("digital_wperp", {}, model));
    std::map<std::string, double> dw;
    if (!model.lambda.is_constant()) dw["shift"] = 0.0;
    b.push_back(registry_claim("digital_w", dw, model));
    b.push_back(registry_claim("smooth_mixed", {}, model));
    Claim c = Claim::make("clamped_affine", Payoff::parse("clamp(0.5+0.3*W[0]-0.2*Wp[0], 0, 1)", model.m, model.n));
    b.push_back(c);
    return b;
}

}  // namespace tsallis
