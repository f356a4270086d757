#include "tsallis/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tsallis/parallel.hpp"
#include "tsallis/qcalc.hpp"
#include "tsallis/random.hpp"

namespace tsallis {

namespace {

// x^q ln_q x written as (x - x^q)/(1 - q); x ln x at q = 1.
double f_q(double x, double q) {
    if (q == 1.0) return x > 0.0 ? x * std::log(x) : 0.0;
    return (x - std::pow(x, q)) / (1.0 - q);
}

// Per-path (q/2) int D_s^q |theta_s|^2 ds with the trapezoidal rule.
std::vector<double> integral_terms(const MarketModel& model, const PathEnsemble& ens, Frame frame,
                                   const IntegrandFn& integrand, double q) {
    const std::size_t K = ens.steps(), N = ens.size();
    const int m = model.m, n = model.n;
    const auto& grid = ens.grid();
    std::vector<double> out(N);
    parallel_for(N, [&](std::size_t b, std::size_t e) {
        PathBuffer buf;
        std::vector<double> tw(m), tp(n);
        for (std::size_t i = b; i < e; ++i) {
            load_path(model, ens, i, frame, buf);
            double logd = 0.0, acc = 0.0, prev = 0.0;
            for (std::size_t k = 0; k <= K; ++k) {
                const double t = k < K ? grid[k] : grid.T();
                integrand(t, buf.w_at(k, m), buf.wp_at(k, n), tw.data(), tp.data());
                double sq = 0.0, dot = 0.0;
                for (int j = 0; j < m; ++j) sq += tw[j] * tw[j];
                for (int j = 0; j < n; ++j) sq += tp[j] * tp[j];
                const double cur = std::exp(q * logd) * sq;
                if (k > 0) acc += 0.5 * (prev + cur) * grid.dt(k - 1);
                prev = cur;
                if (k == K) break;
                for (int j = 0; j < m; ++j) dot += tw[j] * buf.dB[k * m + j];
                for (int j = 0; j < n; ++j) dot += tp[j] * buf.dBp[k * n + j];
                logd += dot - 0.5 * sq * grid.dt(k);
            }
            out[i] = 0.5 * q * acc;
        }
    });
    return out;
}

// Runs one inner continuation from grid index k0 and returns log D_T given
// log D_{k0}. Inner substreams are tagged by 1 + k0.
double continue_path(const MarketModel& model, const PathEnsemble& ens, Frame frame, const IntegrandFn& integrand,
                     std::size_t k0, const double* w0, const double* wp0, double logd, std::uint64_t index) {
    const std::size_t K = ens.steps();
    const int m = model.m, n = model.n;
    const auto& grid = ens.grid();
    double w[kMaxDim], wp[kMaxDim], tw[kMaxDim], tp[kMaxDim], lam[kMaxDim];
    std::copy_n(w0, m, w);
    std::copy_n(wp0, n, wp);
    NormalStream rng(ens.seed(), static_cast<std::uint32_t>(1 + k0), index);
    for (std::size_t k = k0; k < K; ++k) {
        const double t = grid[k], dt = grid.dt(k), s = std::sqrt(dt);
        integrand(t, w, wp, tw, tp);
        if (frame == Frame::Qmin) model.lambda.eval(t, w, lam);
        double dot = 0.0, sq = 0.0;
        for (int j = 0; j < m; ++j) {
            const double db = s * rng.next();
            dot += tw[j] * db;
            sq += tw[j] * tw[j];
            w[j] += db - (frame == Frame::Qmin ? lam[j] * dt : 0.0);
        }
        for (int j = 0; j < n; ++j) {
            const double db = s * rng.next();
            dot += tp[j] * db;
            sq += tp[j] * tp[j];
            wp[j] += db;
        }
        logd += dot - 0.5 * sq * dt;
    }
    return logd;
}

// log D at grid index k0 along path i of the ensemble, plus the state there.
double log_density_at(const MarketModel& model, const PathEnsemble& ens, Frame frame, const IntegrandFn& integrand,
                      std::size_t i, std::size_t k0, PathBuffer& buf) {
    const int m = model.m, n = model.n;
    const auto& grid = ens.grid();
    load_path(model, ens, i, frame, buf);
    double tw[kMaxDim], tp[kMaxDim];
    double logd = 0.0;
    for (std::size_t k = 0; k < k0; ++k) {
        integrand(grid[k], buf.w_at(k, m), buf.wp_at(k, n), tw, tp);
        double dot = 0.0, sq = 0.0;
        for (int j = 0; j < m; ++j) {
            dot += tw[j] * buf.dB[k * m + j];
            sq += tw[j] * tw[j];
        }
        for (int j = 0; j < n; ++j) {
            dot += tp[j] * buf.dBp[k * n + j];
            sq += tp[j] * tp[j];
        }
        logd += dot - 0.5 * sq * grid.dt(k);
    }
    return logd;
}

struct NestedStats {
    double mean;
    double se;
    double f_t;   // f(D_t)
    double d_tq;  // D_t^q
};

template <class Fn>
void for_each_nested(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure, double q,
                     std::size_t t_index, std::size_t M, std::size_t outer, Frame base, Fn&& fn) {
    if (M < 2) throw std::invalid_argument("nested estimate: need at least 2 inner paths");
    if (t_index > ens.steps()) throw std::out_of_range("nested estimate: t_index beyond the grid");
    const std::size_t N = outer == 0 ? ens.size() : std::min(outer, ens.size());
    const IntegrandFn integrand = density_integrand(model, measure, base);
    const int m = model.m, n = model.n;
    parallel_for(N, [&](std::size_t b, std::size_t e) {
        PathBuffer buf;
        std::vector<double> fv(M);
        for (std::size_t i = b; i < e; ++i) {
            const double logd_t = log_density_at(model, ens, base, integrand, i, t_index, buf);
            for (std::size_t j = 0; j < M; ++j) {
                const double logd_T = continue_path(model, ens, base, integrand, t_index, buf.w_at(t_index, m),
                                                    buf.wp_at(t_index, n), logd_t, i * M + j);
                fv[j] = f_q(std::exp(logd_T), q);
            }
            const Estimate est = mean_se(fv);
            const double d_t = std::exp(logd_t);
            fn(i, NestedStats{est.value, est.se, f_q(d_t, q), std::pow(d_t, q)});
        }
    });
}

}  // namespace

const char* route_name(EntropyRoute r) { return r == EntropyRoute::Definitional ? "definitional" : "integral"; }

double tsallis_closed_form(double q, double c, double T) {
    if (q == 1.0) return 0.5 * c * T;
    return std::expm1(0.5 * q * (q - 1.0) * c * T) / (q - 1.0);
}

EntropyEstimate tsallis_definitional(const DensityPaths& density, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("tsallis_definitional: q must be positive");
    const std::size_t N = density.N;
    std::vector<double> v(N), dq(N);
    double gap = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double d = density.terminal(i);
        if (q == 1.0) {
            v[i] = d * std::log(d);
            continue;
        }
        const double lhs = std::pow(d, q) * q_ln(d, q);
        v[i] = f_q(d, q);
        dq[i] = std::pow(d, q);
        const double scale = std::max({std::abs(lhs), std::abs(v[i]), 1.0});
        gap = std::max(gap, std::abs(lhs - v[i]) / scale);
    }
    const Estimate est = mean_se(v);
    EntropyEstimate out;
    out.value = est.value;
    out.se = est.se;
    out.route = EntropyRoute::Definitional;
    out.q = q;
    out.measure = density.source;
    out.base = density.target;
    out.form_gap = gap;
    out.moment_form = q == 1.0 ? est.value : (pairwise_sum(dq) / static_cast<double>(N) - 1.0) / (q - 1.0);
    return out;
}

EntropyEstimate tsallis_integral(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure,
                                 double q) {
    const auto v = integral_terms(model, ens, Frame::P, density_integrand(model, measure, Frame::P), q);
    const Estimate est = mean_se(v);
    EntropyEstimate out;
    out.value = est.value;
    out.se = est.se;
    out.route = EntropyRoute::Integral;
    out.q = q;
    out.measure = measure.label;
    out.base = "P";
    return out;
}

EntropyEstimate tsallis_q_vs_qmin(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure,
                                  double q) {
    const auto v = integral_terms(model, ens, Frame::Qmin, density_integrand(model, measure, Frame::Qmin), q);
    const Estimate est = mean_se(v);
    EntropyEstimate out;
    out.value = est.value;
    out.se = est.se;
    out.route = EntropyRoute::Integral;
    out.q = q;
    out.measure = measure.label;
    out.base = "Qmin";
    return out;
}

ConditionalEntropy tsallis_conditional(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure,
                                       double q, std::size_t t_index, std::size_t M, std::size_t outer, Frame base) {
    ConditionalEntropy out;
    out.t_index = t_index;
    out.inner = M;
    const std::size_t N = outer == 0 ? ens.size() : std::min(outer, ens.size());
    out.value.resize(N);
    out.se.resize(N);
    for_each_nested(model, ens, measure, q, t_index, M, outer, base, [&](std::size_t i, const NestedStats& s) {
        out.value[i] = (s.mean - s.f_t) / s.d_tq;
        out.se[i] = s.se / s.d_tq;
    });
    return out;
}

SubmartingaleReport submartingale_check(const MarketModel& model, const PathEnsemble& ens,
                                        const MeasureSpec& measure, double q, std::size_t t_index, std::size_t M,
                                        std::size_t outer) {
    const std::size_t N = outer == 0 ? ens.size() : std::min(outer, ens.size());
    std::vector<unsigned char> bad(N, 0);
    for_each_nested(model, ens, measure, q, t_index, M, outer, Frame::P, [&](std::size_t i, const NestedStats& s) {
        bad[i] = (s.f_t - s.mean > 3.0 * s.se) ? 1 : 0;
    });
    SubmartingaleReport r;
    r.t_index = t_index;
    r.paths = N;
    r.violations = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
    r.fraction = static_cast<double>(r.violations) / static_cast<double>(N);
    r.pass = r.fraction < 0.01;
    return r;
}

KlLimitReport kl_limit_check(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure,
                             double delta, std::optional<double> c) {
    if (!(delta > 0.0 && delta <= 0.1)) throw std::invalid_argument("kl_limit_check: delta must lie in (0, 0.1]");
    const DensityPaths d = density_vs_p(measure, model, ens, 0);
    KlLimitReport r;
    r.delta = delta;
    r.kl = tsallis_definitional(d, 1.0);
    r.below = tsallis_definitional(d, 1.0 - delta);
    r.above = tsallis_definitional(d, 1.0 + delta);
    r.slope = std::max(std::abs(r.below.value - r.kl.value), std::abs(r.above.value - r.kl.value)) / delta;
    const double h1 = c ? tsallis_closed_form(1.0, *c, model.T) : r.kl.value;
    r.bracket = r.below.value - 4.0 * r.below.se <= h1 && h1 <= r.above.value + 4.0 * r.above.se;
    if (c) {
        r.kl_exact = h1;
        r.below_exact = tsallis_closed_form(1.0 - delta, *c, model.T);
        r.above_exact = tsallis_closed_form(1.0 + delta, *c, model.T);
        r.closed_form_ok = std::abs(r.kl.value - *r.kl_exact) <= 4.0 * r.kl.se &&
                           std::abs(r.below.value - *r.below_exact) <= 4.0 * r.below.se &&
                           std::abs(r.above.value - *r.above_exact) <= 4.0 * r.above.se;
    }
    return r;
}

void write_entropy_csv(std::ostream& os, std::span<const EntropyEstimate> rows) {
    os << "q,measure,base,route,estimate,stderr\n";
    const auto old = os.precision(17);
    for (const auto& r : rows)
        os << r.q << ',' << r.measure << ',' << r.base << ',' << route_name(r.route) << ',' << r.value << ','
           << r.se << '\n';
    os.precision(old);
}

}  // namespace tsallis
