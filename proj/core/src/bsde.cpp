#include "tsallis/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tsallis/parallel.hpp"
#include "tsallis/stats.hpp"

namespace tsallis {

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ClosedForm: return "closed_form";
        case Scheme::MonteCarlo: return "monte_carlo";
        case Scheme::Pde: return "pde";
        case Scheme::Lsmc: return "lsmc";
    }
    return "closed_form";
}

double BSDESolution::tolerance() const { return std::max(3.0 * se, scheme_tol); }

namespace {

void require_admissible(const Claim& claim, const QGammaParams& params, const char* who) {
    const Admissibility adm = check_admissible(claim, params);
    if (!adm.ok) throw std::invalid_argument(std::string(who) + ": claim not admissible: " + adm.reason);
}

std::vector<double> terminal_payoffs(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                                     Frame frame) {
    const std::vector<double> st = terminal_states(model, ens, frame);
    const int m = model.m, d = model.m + model.n;
    std::vector<double> xi(ens.size());
    for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = claim(&st[i * d], &st[i * d + m]);
    return xi;
}

// -(1/gamma) ln_q E[exp_q(-gamma xi)] with delta-method standard error.
BSDESolution certainty_equivalent(const std::vector<double>& xi, const QGammaParams& params, Scheme scheme,
                                  Driver driver) {
    std::vector<double> u(xi.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = q_exp(-params.gamma * xi[i], params.q);
    const Estimate e = mean_se(u);
    if (!(e.value > 0.0)) throw DomainError("certainty equivalent: E[exp_q(-gamma xi)] outside Dom(ln_q)", e.value, 0.0);
    BSDESolution s;
    s.scheme = scheme;
    s.driver = driver;
    s.Y0 = -q_ln(e.value, params.q) / params.gamma;
    s.se = std::pow(e.value, -params.q) * e.se / params.gamma;
    return s;
}

// Adaptive Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    // Split first so a narrow feature cannot hide between the initial nodes.
    const int pieces = 64;
    double sum = 0.0;
    for (int p = 0; p < pieces; ++p) {
        const double lo = a + (b - a) * p / pieces, hi = a + (b - a) * (p + 1) / pieces;
        const double flo = f(lo), fhi = f(hi), fm = f(0.5 * (lo + hi));
        sum += simpson(f, lo, hi, flo, fm, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi), tol / pieces, 50);
    }
    return sum;
}

}  // namespace

BSDESolution solve_unhedged(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                            const QGammaParams& params) {
    if (claim.payoff.depends_on_w()) throw std::invalid_argument("solve_unhedged: claim depends on W");
    require_admissible(claim, params, "solve_unhedged");
    BSDESolution s = certainty_equivalent(terminal_payoffs(claim, model, ens, Frame::Qmin), params,
                                          Scheme::ClosedForm, Driver::Pricing);
    return s;
}

double unhedged_quadrature(const Claim& claim, const QGammaParams& params, double T, double t, double wp_t) {
    if (claim.payoff.depends_on_w()) throw std::invalid_argument("unhedged_quadrature: claim depends on W");
    require_admissible(claim, params, "unhedged_quadrature");
    if (!(t >= 0.0 && t <= T)) throw std::invalid_argument("unhedged_quadrature: t outside [0, T]");
    const double w0 = 0.0;
    if (t == T) return claim(&w0, &wp_t);
    const double sd = std::sqrt(T - t);
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    auto f = [&](double z) {
        const double wp = wp_t + sd * z;
        return q_exp(-params.gamma * claim(&w0, &wp), params.q) * inv_sqrt_2pi * std::exp(-0.5 * z * z);
    };
    const double E = integrate(f, -9.0, 9.0, 1e-14);
    return -q_ln(E, params.q) / params.gamma;
}

BSDESolution solve_attainable(const Claim& claim, const MarketModel& model, const PathEnsemble& ens, Frame frame) {
    if (claim.payoff.depends_on_wp()) throw std::invalid_argument("solve_attainable: claim depends on W_perp");
    BSDESolution s;
    s.scheme = Scheme::ClosedForm;
    s.driver = Driver::Linear;
    const std::vector<double> xi = terminal_payoffs(claim, model, ens, frame);
    Estimate e;
    if (frame == Frame::Qmin) {
        e = mean_se(xi);
    } else {
        const DensityPaths d = minimal_density(model, ens, 0);
        e = reweighted_expectation(xi, d, 1.0);
    }
    s.Y0 = e.value;
    s.se = e.se;
    return s;
}

BSDESolution risk_neutral(const Claim& claim, const MarketModel& model, const PathEnsemble& ens) {
    BSDESolution s;
    s.scheme = Scheme::MonteCarlo;
    s.driver = Driver::Linear;
    const Estimate e = mean_se(terminal_payoffs(claim, model, ens, Frame::Qmin));
    s.Y0 = e.value;
    s.se = e.se;
    return s;
}

BSDESolution solve_ce(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                      const QGammaParams& params) {
    require_admissible(claim, params, "solve_ce");
    return certainty_equivalent(terminal_payoffs(claim, model, ens, Frame::Qmin), params, Scheme::MonteCarlo,
                                Driver::CertaintyEquivalent);
}

namespace {

BSDESolution wrap_pde(PdeSolution sol, const Claim& claim, Driver driver) {
    BSDESolution s;
    s.scheme = Scheme::Pde;
    s.driver = driver;
    s.Y0 = sol.Y0;
    // A smoothed indicator moves the target by O(ramp width); bound it by
    // the ramp half-width times the payoff range.
    s.scheme_tol = sol.extrapolated ? sol.scheme_tol : sol.smoothing * (claim.hi - claim.lo);
    auto p = std::make_shared<const PdeSolution>(std::move(sol));
    s.pde = p;
    s.field = p;
    return s;
}

}  // namespace

BSDESolution solve_ce_pde(const Claim& claim, const MarketModel& model, const QGammaParams& params,
                          const PdeConfig& config) {
    return wrap_pde(solve_pde(claim, model, params, config, Driver::CertaintyEquivalent), claim,
                    Driver::CertaintyEquivalent);
}

BSDESolution solve_pde_bsde(const Claim& claim, const MarketModel& model, const QGammaParams& params,
                            const PdeConfig& config) {
    return wrap_pde(solve_pde(claim, model, params, config, Driver::Pricing), claim, Driver::Pricing);
}

BSDESolution solve_lsmc_bsde(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                             const QGammaParams& params, const LsmcConfig& config) {
    LsmcSolution sol = solve_lsmc(claim, model, ens, params, config, Driver::Pricing);
    BSDESolution s;
    s.scheme = Scheme::Lsmc;
    s.driver = Driver::Pricing;
    s.Y0 = sol.Y0;
    s.se = sol.se;
    s.warnings = sol.diag.warnings;
    auto p = std::make_shared<const LsmcSolution>(std::move(sol));
    s.lsmc = p;
    s.field = p;
    return s;
}

OptimalControls::OptimalControls(std::shared_ptr<const ValueField> field, MarketModel model, QGammaParams params,
                                 double mu_min)
    : field_(std::move(field)), model_(std::move(model)), params_(params), mu_min_(mu_min) {
    if (!field_) throw std::invalid_argument("OptimalControls: solution has no value field");
    if (field_->m() != model_.m || field_->n() != model_.n)
        throw std::invalid_argument("OptimalControls: field dimensions differ from the model");
}

double OptimalControls::load(double t, const double* w, const double* wp, double* z, double* zp) const {
    const double y = field_->value(t, w, wp);
    field_->gradient(t, w, wp, z, zp);
    const double mu_y = (1.0 - (1.0 - params_.q) * params_.gamma * y) / params_.q;
    if (!(mu_y >= mu_min_)) throw DomainError("optimal controls: mu(Y) below floor", mu_y, mu_min_);
    return mu_y;
}

void OptimalControls::theta_star(double t, const double* w, const double* wp, double* out) const {
    double z[kMaxDim], zp[kMaxDim];
    const double mu_y = load(t, w, wp, z, zp);
    for (int j = 0; j < model_.n; ++j) out[j] = -params_.gamma * zp[j] / mu_y;
}

void OptimalControls::alpha_star(double t, const double* w, const double* wp, double* out) const {
    theta_star(t, w, wp, out);
    for (int j = 0; j < model_.n; ++j) out[j] /= params_.q;
}

void OptimalControls::beta_star(double t, const double* w, const double* wp, double* out) const {
    double z[kMaxDim], zp[kMaxDim];
    const double mu_y = load(t, w, wp, z, zp);
    for (int j = 0; j < model_.m; ++j) out[j] = -params_.gamma * z[j] / (params_.q * mu_y);
}

void OptimalControls::qxi_loadings(double t, const double* w, const double* wp, double* on_w,
                                   double* on_wp) const {
    double z[kMaxDim], zp[kMaxDim];
    const double mu_y = load(t, w, wp, z, zp);
    model_.lambda.eval(t, w, on_w);
    for (int j = 0; j < model_.m; ++j) on_w[j] = -on_w[j];
    for (int j = 0; j < model_.n; ++j) on_wp[j] = -params_.gamma * zp[j] / (2.0 * mu_y);
}

MeasureSpec OptimalControls::alpha_measure() const {
    MeasureSpec s;
    s.label = "alpha_star";
    OptimalControls self = *this;
    s.alpha = [self](double t, const double* w, const double* wp, double* out) { self.alpha_star(t, w, wp, out); };
    return s;
}

MeasureSpec OptimalControls::theta_measure() const {
    MeasureSpec s;
    s.label = "theta_star";
    OptimalControls self = *this;
    s.alpha = [self](double t, const double* w, const double* wp, double* out) { self.theta_star(t, w, wp, out); };
    return s;
}

MeasureSpec OptimalControls::ce_measure() const {
    MeasureSpec s;
    s.label = "ce_star";
    OptimalControls self = *this;
    s.alpha = [self](double t, const double* w, const double* wp, double* out) { self.alpha_star(t, w, wp, out); };
    s.beta = [self](double t, const double* w, const double* wp, double* out) { self.beta_star(t, w, wp, out); };
    return s;
}

IntegrandFn OptimalControls::qxi_integrand() const {
    OptimalControls self = *this;
    return [self](double t, const double* w, const double* wp, double* tw, double* tp) {
        self.qxi_loadings(t, w, wp, tw, tp);
    };
}

OptimalControls extract_optimizers(const BSDESolution& solution, const MarketModel& model,
                                   const QGammaParams& params, double mu_min) {
    return OptimalControls(solution.field, model, params, mu_min);
}

YthetaResult backward_recursion_Ytheta(const LoadingFn& theta, const Claim& claim, const MarketModel& model,
                                       const PathEnsemble& ens, const QGammaParams& params,
                                       const LsmcConfig& config) {
    model.validate();
    const int m = model.m, n = model.n, d = m + n;
    const std::size_t N = ens.size(), K = ens.steps();
    const auto& grid = ens.grid();
    const double q = params.q, gamma = params.gamma;
    const LsmcBasis basis = config.basis != LsmcBasis::Auto
                                ? config.basis
                                : (claim.discontinuous() ? LsmcBasis::LocalLinear : LsmcBasis::Polynomial);
    const std::size_t B = basis == LsmcBasis::LocalLinear ? auto_cells(N, d, config) : 1;

    MeasureSpec under;
    under.label = "theta";
    under.alpha = theta;

    // states and |theta|^2 per step along Q^theta paths
    std::vector<std::vector<double>> Xs(K + 1, std::vector<double>(N * d));
    std::vector<std::vector<double>> th2(K, std::vector<double>(N));
    parallel_for(N, [&](std::size_t b, std::size_t e) {
        PathBuffer buf;
        double tp[kMaxDim];
        for (std::size_t i = b; i < e; ++i) {
            load_path(model, ens, i, Frame::Qmin, buf, &under);
            for (std::size_t k = 0; k <= K; ++k) {
                std::copy_n(buf.w_at(k, m), m, &Xs[k][i * d]);
                std::copy_n(buf.wp_at(k, n), n, &Xs[k][i * d + m]);
                if (k < K) {
                    theta(grid[k], buf.w_at(k, m), buf.wp_at(k, n), tp);
                    double s = 0.0;
                    for (int j = 0; j < n; ++j) s += tp[j] * tp[j];
                    if (!std::isfinite(s)) throw std::domain_error("Y^theta: non-finite theta loading");
                    th2[k][i] = s;
                }
            }
        }
    });

    std::vector<double> xi(N), Y(N), acc(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) xi[i] = claim(&Xs[K][i * d], &Xs[K][i * d + m]);
    Y = xi;
    for (std::size_t k = K; k-- > 0;) {
        const double dt = grid.dt(k);
        const StepRegression reg = StepRegression::fit_mean(basis, config, B, d, Xs[k], Y, k);
        parallel_for(N, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                const double E = reg.eval(&Xs[k][i * d], nullptr);
                const double a = th2[k][i] * dt;
                const double denom = 1.0 + (1.0 - q) * a / (2.0 * q);
                if (!(denom > 0.0)) {
                    std::ostringstream os;
                    os << "Y^theta recursion: no solution at step " << k << " (|theta|^2 dt too large)";
                    throw std::domain_error(os.str());
                }
                const double y = (E + a / (2.0 * gamma * q)) / denom;
                acc[i] += y - E;  // mu(y) |theta|^2 dt / (2 gamma)
                Y[i] = y;
            }
        });
    }
    std::vector<double> R(N);
    for (std::size_t i = 0; i < N; ++i) R[i] = xi[i] + acc[i];
    const Estimate est = mean_se(R);
    YthetaResult out;
    out.Y0 = est.value;
    out.se = est.se;
    out.Y0_regressed = pairwise_sum(Y) / static_cast<double>(N);
    out.basis = basis_name(basis);
    return out;
}

MartingaleReport martingale_check_qxi(const BSDESolution& solution, const Claim& claim, const MarketModel& model,
                                      const PathEnsemble& ens, const QGammaParams& params) {
    const OptimalControls oc = extract_optimizers(solution, model, params);
    const DensityPaths dens = stochastic_exponential(model, ens, Frame::P, oc.qxi_integrand(), 0, "Qxi", "P");
    const std::vector<double> xi = terminal_payoffs(claim, model, ens, Frame::P);
    const Estimate e = reweighted_expectation(xi, dens, 1.0);
    MartingaleReport r;
    r.estimate = e.value;
    r.se = e.se;
    r.Y0 = solution.Y0;
    r.allowance = 4.0 * combined_se(e.se, solution.se) + solution.scheme_tol;
    r.pass = std::abs(r.estimate - r.Y0) <= r.allowance;
    return r;
}

}  // namespace tsallis
