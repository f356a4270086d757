#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tsallis/stats.hpp"

namespace tsallis {

inline constexpr int kMaxDim = 8;

// Market price of risk lambda(t, W). Either constant, or
// lambda_i = level_i + slope_i * tanh(W_i).
class LambdaSpec {
public:
    enum class Kind { Constant, Tanh };

    static LambdaSpec constant(std::vector<double> level);
    static LambdaSpec tanh(std::vector<double> level, std::vector<double> slope);

    Kind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return level_.size(); }
    const std::vector<double>& level() const noexcept { return level_; }
    const std::vector<double>& slope() const noexcept { return slope_; }
    bool is_constant() const noexcept { return kind_ == Kind::Constant; }

    void eval(double t, const double* w, double* out) const;
    // Declared uniform bound on |lambda|.
    double bound() const;

private:
    Kind kind_ = Kind::Constant;
    std::vector<double> level_;
    std::vector<double> slope_;
};

struct MarketModel {
    int m = 1;
    int n = 1;
    LambdaSpec lambda = LambdaSpec::constant({0.0});
    double T = 1.0;
    std::vector<double> S0 = {0.0};

    // Throws std::invalid_argument on inconsistent dimensions or T <= 0.
    void validate() const;
};

class TimeGrid {
public:
    static TimeGrid uniform(double T, std::size_t K);
    // t_k = T (1 - (1 - k/K)^beta): steps shrink towards maturity for beta > 1.
    static TimeGrid graded(double T, std::size_t K, double beta);
    static TimeGrid custom(std::vector<double> knots);

    std::size_t steps() const noexcept { return t_.size() - 1; }
    double T() const noexcept { return t_.back(); }
    double operator[](std::size_t k) const { return t_[k]; }
    double dt(std::size_t k) const { return t_[k + 1] - t_[k]; }
    const std::vector<double>& knots() const noexcept { return t_; }
    // Index of the knot closest to t.
    std::size_t index_of(double t) const;

private:
    explicit TimeGrid(std::vector<double> t);
    std::vector<double> t_;
};

// Seeded Brownian increments. Path i is a pure function of (seed, i), so the
// ensemble can be regenerated lazily per path or materialized once.
class PathEnsemble {
public:
    PathEnsemble(int m, int n, TimeGrid grid, std::size_t N, std::uint64_t seed);

    int m() const noexcept { return m_; }
    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return N_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t steps() const noexcept { return grid_.steps(); }

    // dB has K*m entries and dBp K*n entries, step-major.
    void increments(std::size_t i, double* dB, double* dBp) const;

    void materialize();
    bool materialized() const noexcept { return !cache_.empty(); }

    // Largest |z| over steps and dimensions of (mean - dt)/se and
    // (var - dt)/se_var for the per-step increment moments.
    double moment_zscore() const;

    // path,step,component,increment rows.
    void write_csv(std::ostream& os, std::size_t max_paths) const;

private:
    int m_, n_;
    TimeGrid grid_;
    std::size_t N_;
    std::uint64_t seed_;
    std::vector<double> cache_;
};

PathEnsemble simulate(const MarketModel& model, const TimeGrid& grid, std::size_t N, std::uint64_t seed);

// Coordinates the increments are read in. Under P the increments drive W
// directly. Under Qmin they drive W^{-lambda} = W + int lambda, so
// W = B - int lambda; W_perp is the same Brownian motion in both.
enum class Frame { P, Qmin };

const char* frame_name(Frame f);

using LoadingFn = std::function<void(double t, const double* w, const double* wp, double* out)>;

// A measure given by its density against Qmin,
// E(beta . W^{-lambda} + alpha . W_perp). Without beta it lies in M.
struct MeasureSpec {
    std::string label;
    LoadingFn alpha;  // n outputs
    LoadingFn beta;   // m outputs, optional

    bool has_beta() const noexcept { return static_cast<bool>(beta); }

    static MeasureSpec minimal(int n);
    static MeasureSpec constant(std::string label, std::vector<double> alpha,
                                std::vector<double> beta = {});
};

// One path's increments and reconstructed states.
struct PathBuffer {
    std::vector<double> dB, dBp;  // K*m, K*n
    std::vector<double> w, wp;    // (K+1)*m, (K+1)*n

    const double* w_at(std::size_t k, int m) const { return w.data() + k * m; }
    const double* wp_at(std::size_t k, int n) const { return wp.data() + k * n; }
};

// Rebuilds states of path i. With `under`, W_perp and W^{-lambda} receive the
// drifts alpha and beta of that measure (the increments are then its Brownian
// motion); requires frame Qmin.
void load_path(const MarketModel& model, const PathEnsemble& ens, std::size_t i, Frame frame,
               PathBuffer& buf, const MeasureSpec* under = nullptr);

// Terminal (W_T, W_perp_T) for every path, row-major N x (m+n).
std::vector<double> terminal_states(const MarketModel& model, const PathEnsemble& ens, Frame frame,
                                    const MeasureSpec* under = nullptr);

struct DensityPaths {
    std::size_t N = 0;
    std::vector<std::size_t> kept;  // retained grid indices, increasing, first 0, last K
    std::vector<double> values;     // N x kept.size()
    std::string source, target;

    double at(std::size_t i, std::size_t k) const;
    double terminal(std::size_t i) const { return values[(i + 1) * kept.size() - 1]; }
    std::vector<double> terminal_values() const;
};

// Per-step loadings (theta_w on the m increments, theta_wp on the n increments).
using IntegrandFn = std::function<void(double t, const double* w, const double* wp, double* theta_w,
                                       double* theta_wp)>;

// Loadings of dQ/d(base) for a measure: under P (-lambda, alpha), under Qmin
// (beta or 0, alpha). The P case requires a measure without beta.
IntegrandFn density_integrand(const MarketModel& model, const MeasureSpec& measure, Frame base);

// Log-Euler stochastic exponential of the integrand against the ensemble's
// increments in `frame`. keep_every = 0 retains only t_0 and t_K.
DensityPaths stochastic_exponential(const MarketModel& model, const PathEnsemble& ens, Frame frame,
                                    const IntegrandFn& integrand, std::size_t keep_every = 1,
                                    std::string source = "Q", std::string target = "base");

// dQmin/dP = E(-lambda . W) on P-frame paths.
DensityPaths minimal_density(const MarketModel& model, const PathEnsemble& ens, std::size_t keep_every = 1);

// D^{Q,Qmin} on Qmin-frame paths.
DensityPaths density_ratio(const MeasureSpec& measure, const MarketModel& model, const PathEnsemble& ens,
                           std::size_t keep_every = 1);

// D^{Q,P} = E(-lambda . W + alpha . W_perp) on P-frame paths; requires no beta.
DensityPaths density_vs_p(const MeasureSpec& measure, const MarketModel& model, const PathEnsemble& ens,
                          std::size_t keep_every = 1);

// Mean of D_T^power * payoff with its standard error.
Estimate reweighted_expectation(std::span<const double> payoff, const DensityPaths& density, double power);

// S_t = S0 + int lambda + W on P-frame paths, N x (K+1) x m.
std::vector<double> asset_paths(const MarketModel& model, const PathEnsemble& ens);

}  // namespace tsallis
