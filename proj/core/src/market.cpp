#include "tsallis/market.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tsallis/parallel.hpp"
#include "tsallis/random.hpp"

namespace tsallis {

LambdaSpec LambdaSpec::constant(std::vector<double> level) {
    LambdaSpec s;
    s.kind_ = Kind::Constant;
    s.slope_.assign(level.size(), 0.0);
    s.level_ = std::move(level);
    return s;
}

LambdaSpec LambdaSpec::tanh(std::vector<double> level, std::vector<double> slope) {
    if (level.size() != slope.size()) throw std::invalid_argument("lambda: level/slope size mismatch");
    LambdaSpec s;
    s.kind_ = Kind::Tanh;
    s.level_ = std::move(level);
    s.slope_ = std::move(slope);
    return s;
}

void LambdaSpec::eval(double, const double* w, double* out) const {
    for (std::size_t j = 0; j < level_.size(); ++j)
        out[j] = kind_ == Kind::Constant ? level_[j] : level_[j] + slope_[j] * std::tanh(w[j]);
}

double LambdaSpec::bound() const {
    double s = 0.0;
    for (std::size_t j = 0; j < level_.size(); ++j) {
        const double b = std::abs(level_[j]) + std::abs(slope_[j]);
        s += b * b;
    }
    return std::sqrt(s);
}

void MarketModel::validate() const {
    if (m < 1 || n < 1) throw std::invalid_argument("market: m and n must be >= 1");
    if (m > kMaxDim || n > kMaxDim) throw std::invalid_argument("market: m and n must be <= 8");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("market: T must be positive");
    if (lambda.dim() != static_cast<std::size_t>(m))
        throw std::invalid_argument("market: lambda dimension must equal m");
    if (S0.size() != static_cast<std::size_t>(m)) throw std::invalid_argument("market: S0 dimension must equal m");
    for (double v : lambda.level())
        if (!std::isfinite(v)) throw std::invalid_argument("market: lambda must be finite");
    for (double v : lambda.slope())
        if (!std::isfinite(v)) throw std::invalid_argument("market: lambda must be finite");
}

TimeGrid::TimeGrid(std::vector<double> t) : t_(std::move(t)) {
    if (t_.size() < 2 || t_.front() != 0.0) throw std::invalid_argument("time grid: need t_0 = 0 and K >= 1");
    for (std::size_t k = 1; k < t_.size(); ++k)
        if (!(t_[k] > t_[k - 1])) throw std::invalid_argument("time grid: knots must increase strictly");
}

TimeGrid TimeGrid::uniform(double T, std::size_t K) { return graded(T, K, 1.0); }

TimeGrid TimeGrid::graded(double T, std::size_t K, double beta) {
    if (K == 0) throw std::invalid_argument("time grid: K must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("time grid: T must be positive");
    if (!(beta >= 1.0)) throw std::invalid_argument("time grid: grading exponent must be >= 1");
    std::vector<double> t(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        const double s = 1.0 - static_cast<double>(k) / static_cast<double>(K);
        t[k] = beta == 1.0 ? T * static_cast<double>(k) / static_cast<double>(K) : T * (1.0 - std::pow(s, beta));
    }
    t[K] = T;
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::custom(std::vector<double> knots) { return TimeGrid(std::move(knots)); }

std::size_t TimeGrid::index_of(double t) const {
    const auto it = std::lower_bound(t_.begin(), t_.end(), t);
    if (it == t_.begin()) return 0;
    if (it == t_.end()) return t_.size() - 1;
    const std::size_t k = static_cast<std::size_t>(it - t_.begin());
    return (t - t_[k - 1] < t_[k] - t) ? k - 1 : k;
}

PathEnsemble::PathEnsemble(int m, int n, TimeGrid grid, std::size_t N, std::uint64_t seed)
    : m_(m), n_(n), grid_(std::move(grid)), N_(N), seed_(seed) {
    if (m < 1 || n < 1 || m > kMaxDim || n > kMaxDim)
        throw std::invalid_argument("ensemble: m and n must lie in [1, 8]");
    if (N == 0) throw std::invalid_argument("ensemble: N must be >= 1");
}

void PathEnsemble::increments(std::size_t i, double* dB, double* dBp) const {
    const std::size_t K = steps();
    const std::size_t d = static_cast<std::size_t>(m_ + n_);
    if (!cache_.empty()) {
        const double* src = cache_.data() + i * K * d;
        for (std::size_t k = 0; k < K; ++k) {
            std::copy_n(src + k * d, m_, dB + k * m_);
            std::copy_n(src + k * d + m_, n_, dBp + k * n_);
        }
        return;
    }
    NormalStream rng(seed_, 0, i);
    for (std::size_t k = 0; k < K; ++k) {
        const double s = std::sqrt(grid_.dt(k));
        for (int j = 0; j < m_; ++j) dB[k * m_ + j] = s * rng.next();
        for (int j = 0; j < n_; ++j) dBp[k * n_ + j] = s * rng.next();
    }
}

void PathEnsemble::materialize() {
    if (!cache_.empty()) return;
    const std::size_t K = steps();
    const std::size_t d = static_cast<std::size_t>(m_ + n_);
    std::vector<double> cache(N_ * K * d);
    parallel_for(N_, [&](std::size_t b, std::size_t e) {
        std::vector<double> dB(K * m_), dBp(K * n_);
        for (std::size_t i = b; i < e; ++i) {
            increments(i, dB.data(), dBp.data());
            double* dst = cache.data() + i * K * d;
            for (std::size_t k = 0; k < K; ++k) {
                std::copy_n(dB.data() + k * m_, m_, dst + k * d);
                std::copy_n(dBp.data() + k * n_, n_, dst + k * d + m_);
            }
        }
    });
    cache_ = std::move(cache);
}

double PathEnsemble::moment_zscore() const {
    const std::size_t K = steps();
    const std::size_t d = static_cast<std::size_t>(m_ + n_);
    const std::size_t cols = K * d;
    const std::size_t blocks = (N_ + kBlockSize - 1) / kBlockSize;
    std::vector<double> s1(blocks * cols, 0.0), s2(blocks * cols, 0.0);
    parallel_for(N_, [&](std::size_t b, std::size_t e) {
        const std::size_t blk = b / kBlockSize;
        std::vector<double> dB(K * m_), dBp(K * n_);
        for (std::size_t i = b; i < e; ++i) {
            increments(i, dB.data(), dBp.data());
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t j = 0; j < d; ++j) {
                    const double x = j < static_cast<std::size_t>(m_) ? dB[k * m_ + j] : dBp[k * n_ + j - m_];
                    s1[blk * cols + k * d + j] += x;
                    s2[blk * cols + k * d + j] += x * x;
                }
        }
    });
    const double N = static_cast<double>(N_);
    double worst = 0.0;
    std::vector<double> c1(blocks), c2(blocks);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t b = 0; b < blocks; ++b) {
            c1[b] = s1[b * cols + c];
            c2[b] = s2[b * cols + c];
        }
        const double dt = grid_.dt(c / d);
        const double mean = pairwise_sum(c1) / N;
        const double var = (pairwise_sum(c2) - N * mean * mean) / std::max(1.0, N - 1.0);
        const double z_mean = mean / std::sqrt(dt / N);
        const double z_var = N > 1 ? (var - dt) / (dt * std::sqrt(2.0 / (N - 1.0))) : 0.0;
        worst = std::max({worst, std::abs(z_mean), std::abs(z_var)});
    }
    return worst;
}

void PathEnsemble::write_csv(std::ostream& os, std::size_t max_paths) const {
    const std::size_t K = steps();
    std::vector<double> dB(K * m_), dBp(K * n_);
    os << "path,step,component,increment\n";
    os.precision(17);
    for (std::size_t i = 0; i < std::min(N_, max_paths); ++i) {
        increments(i, dB.data(), dBp.data());
        for (std::size_t k = 0; k < K; ++k) {
            for (int j = 0; j < m_; ++j) os << i << ',' << k << ",W" << j << ',' << dB[k * m_ + j] << '\n';
            for (int j = 0; j < n_; ++j) os << i << ',' << k << ",Wp" << j << ',' << dBp[k * n_ + j] << '\n';
        }
    }
}

PathEnsemble simulate(const MarketModel& model, const TimeGrid& grid, std::size_t N, std::uint64_t seed) {
    model.validate();
    if (std::abs(grid.T() - model.T) > 1e-12 * model.T)
        throw std::invalid_argument("simulate: grid horizon differs from model T");
    return PathEnsemble(model.m, model.n, grid, N, seed);
}

const char* frame_name(Frame f) { return f == Frame::P ? "P" : "Qmin"; }

MeasureSpec MeasureSpec::minimal(int n) {
    return constant("Qmin", std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

MeasureSpec MeasureSpec::constant(std::string label, std::vector<double> alpha, std::vector<double> beta) {
    MeasureSpec s;
    s.label = std::move(label);
    s.alpha = [a = std::move(alpha)](double, const double*, const double*, double* out) {
        std::copy(a.begin(), a.end(), out);
    };
    if (!beta.empty())
        s.beta = [b = std::move(beta)](double, const double*, const double*, double* out) {
            std::copy(b.begin(), b.end(), out);
        };
    return s;
}

void load_path(const MarketModel& model, const PathEnsemble& ens, std::size_t i, Frame frame, PathBuffer& buf,
               const MeasureSpec* under) {
    const std::size_t K = ens.steps();
    const int m = model.m, n = model.n;
    if (under && frame != Frame::Qmin) throw std::invalid_argument("load_path: measure drifts need the Qmin frame");
    buf.dB.resize(K * m);
    buf.dBp.resize(K * n);
    buf.w.assign((K + 1) * m, 0.0);
    buf.wp.assign((K + 1) * n, 0.0);
    ens.increments(i, buf.dB.data(), buf.dBp.data());
    double lam[kMaxDim], a[kMaxDim], be[kMaxDim];
    const auto& grid = ens.grid();
    for (std::size_t k = 0; k < K; ++k) {
        const double t = grid[k], dt = grid.dt(k);
        const double* w = buf.w.data() + k * m;
        const double* wp = buf.wp.data() + k * n;
        double* w1 = buf.w.data() + (k + 1) * m;
        double* wp1 = buf.wp.data() + (k + 1) * n;
        if (frame == Frame::Qmin) model.lambda.eval(t, w, lam);
        if (under) {
            under->alpha(t, w, wp, a);
            if (under->has_beta()) under->beta(t, w, wp, be);
        }
        for (int j = 0; j < m; ++j) {
            double drift = 0.0;
            if (frame == Frame::Qmin) drift -= lam[j];
            if (under && under->has_beta()) drift += be[j];
            w1[j] = w[j] + buf.dB[k * m + j] + drift * dt;
        }
        for (int j = 0; j < n; ++j) wp1[j] = wp[j] + buf.dBp[k * n + j] + (under ? a[j] * dt : 0.0);
    }
}

std::vector<double> terminal_states(const MarketModel& model, const PathEnsemble& ens, Frame frame,
                                    const MeasureSpec* under) {
    const std::size_t K = ens.steps(), N = ens.size();
    const int m = model.m, n = model.n;
    std::vector<double> out(N * (m + n));
    parallel_for(N, [&](std::size_t b, std::size_t e) {
        PathBuffer buf;
        for (std::size_t i = b; i < e; ++i) {
            load_path(model, ens, i, frame, buf, under);
            std::copy_n(buf.w_at(K, m), m, out.data() + i * (m + n));
            std::copy_n(buf.wp_at(K, n), n, out.data() + i * (m + n) + m);
        }
    });
    return out;
}

double DensityPaths::at(std::size_t i, std::size_t k) const {
    const auto it = std::lower_bound(kept.begin(), kept.end(), k);
    if (it == kept.end() || *it != k) throw std::out_of_range("density: time index not retained");
    return values[i * kept.size() + static_cast<std::size_t>(it - kept.begin())];
}

std::vector<double> DensityPaths::terminal_values() const {
    std::vector<double> out(N);
    for (std::size_t i = 0; i < N; ++i) out[i] = terminal(i);
    return out;
}

DensityPaths stochastic_exponential(const MarketModel& model, const PathEnsemble& ens, Frame frame,
                                    const IntegrandFn& integrand, std::size_t keep_every, std::string source,
                                    std::string target) {
    const std::size_t K = ens.steps(), N = ens.size();
    const int m = model.m, n = model.n;
    DensityPaths out;
    out.N = N;
    out.source = std::move(source);
    out.target = std::move(target);
    for (std::size_t k = 0; k <= K; ++k)
        if (k == 0 || k == K || (keep_every > 0 && k % keep_every == 0)) out.kept.push_back(k);
    const std::size_t nk = out.kept.size();
    out.values.resize(N * nk);
    const auto& grid = ens.grid();

    parallel_for(N, [&](std::size_t b, std::size_t e) {
        PathBuffer buf;
        std::vector<double> tw(m), tp(n);
        for (std::size_t i = b; i < e; ++i) {
            load_path(model, ens, i, frame, buf);
            double logd = 0.0;
            std::size_t slot = 0;
            double* row = out.values.data() + i * nk;
            row[slot++] = 1.0;
            for (std::size_t k = 0; k < K; ++k) {
                integrand(grid[k], buf.w_at(k, m), buf.wp_at(k, n), tw.data(), tp.data());
                double dot = 0.0, sq = 0.0;
                for (int j = 0; j < m; ++j) {
                    dot += tw[j] * buf.dB[k * m + j];
                    sq += tw[j] * tw[j];
                }
                for (int j = 0; j < n; ++j) {
                    dot += tp[j] * buf.dBp[k * n + j];
                    sq += tp[j] * tp[j];
                }
                if (!std::isfinite(dot) || !std::isfinite(sq)) {
                    std::ostringstream os;
                    os << "stochastic_exponential: non-finite loading on path " << i << " at step " << k;
                    throw std::domain_error(os.str());
                }
                logd += dot - 0.5 * sq * grid.dt(k);
                if (slot < nk && out.kept[slot] == k + 1) row[slot++] = std::exp(logd);
            }
        }
    });
    return out;
}

DensityPaths minimal_density(const MarketModel& model, const PathEnsemble& ens, std::size_t keep_every) {
    const int m = model.m, n = model.n;
    return stochastic_exponential(
        model, ens, Frame::P,
        [&](double t, const double* w, const double*, double* tw, double* tp) {
            model.lambda.eval(t, w, tw);
            for (int j = 0; j < m; ++j) tw[j] = -tw[j];
            for (int j = 0; j < n; ++j) tp[j] = 0.0;
        },
        keep_every, "Qmin", "P");
}

IntegrandFn density_integrand(const MarketModel& model, const MeasureSpec& measure, Frame base) {
    const int m = model.m;
    if (base == Frame::P) {
        if (measure.has_beta()) throw std::invalid_argument("density vs P: measure must lie in M (no beta loading)");
        return [&model, &measure, m](double t, const double* w, const double* wp, double* tw, double* tp) {
            model.lambda.eval(t, w, tw);
            for (int j = 0; j < m; ++j) tw[j] = -tw[j];
            measure.alpha(t, w, wp, tp);
        };
    }
    return [&measure, m](double t, const double* w, const double* wp, double* tw, double* tp) {
        if (measure.has_beta())
            measure.beta(t, w, wp, tw);
        else
            std::fill_n(tw, m, 0.0);
        measure.alpha(t, w, wp, tp);
    };
}

DensityPaths density_ratio(const MeasureSpec& measure, const MarketModel& model, const PathEnsemble& ens,
                           std::size_t keep_every) {
    return stochastic_exponential(model, ens, Frame::Qmin, density_integrand(model, measure, Frame::Qmin),
                                  keep_every, measure.label, "Qmin");
}

DensityPaths density_vs_p(const MeasureSpec& measure, const MarketModel& model, const PathEnsemble& ens,
                          std::size_t keep_every) {
    return stochastic_exponential(model, ens, Frame::P, density_integrand(model, measure, Frame::P), keep_every,
                                  measure.label, "P");
}

Estimate reweighted_expectation(std::span<const double> payoff, const DensityPaths& density, double power) {
    if (payoff.size() != density.N) throw std::invalid_argument("reweighted_expectation: length mismatch");
    std::vector<double> v(payoff.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = (power == 0.0 ? 1.0 : std::pow(density.terminal(i), power)) * payoff[i];
    return mean_se(v);
}

std::vector<double> asset_paths(const MarketModel& model, const PathEnsemble& ens) {
    const std::size_t K = ens.steps(), N = ens.size();
    const int m = model.m;
    std::vector<double> out(N * (K + 1) * m);
    const auto& grid = ens.grid();
    parallel_for(N, [&](std::size_t b, std::size_t e) {
        PathBuffer buf;
        std::vector<double> lam(m);
        for (std::size_t i = b; i < e; ++i) {
            load_path(model, ens, i, Frame::P, buf);
            double* s = out.data() + i * (K + 1) * m;
            for (int j = 0; j < m; ++j) s[j] = model.S0[j];
            for (std::size_t k = 0; k < K; ++k) {
                model.lambda.eval(grid[k], buf.w_at(k, m), lam.data());
                for (int j = 0; j < m; ++j)
                    s[(k + 1) * m + j] = s[k * m + j] + lam[j] * grid.dt(k) + buf.dB[k * m + j];
            }
        }
    });
    return out;
}

}  // namespace tsallis
