#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "tsallis/field.hpp"
#include "tsallis/market.hpp"
#include "tsallis/payoff.hpp"
#include "tsallis/qcalc.hpp"

namespace tsallis {

enum class LsmcBasis {
    Auto,         // LocalLinear for claims with a raw indicator, else Polynomial
    Polynomial,   // total degree `degree` in the standardized state
    LocalLinear,  // affine per cell of an equiprobable tensor partition
};

const char* basis_name(LsmcBasis b);

struct LsmcConfig {
    LsmcBasis basis = LsmcBasis::Auto;
    int degree = 3;
    int z_degree = 2;                  // polynomial degree of the gradient fields
    std::size_t paths_per_cell = 40;   // LocalLinear sizing target
    std::size_t max_cells_per_dim = 64;
    double ridge = 1e-8;               // relative to the Gram diagonal
    Frame frame = Frame::Qmin;
    int picard_passes = 1;
    bool clamp = true;
    double clamp_warn_rate = 0.05;
};

// One time step's joint regression
//   Y_{k+1} ~ phi(x)'a + sum_d dB_d psi(x)'c_d,
// giving E_k[Y_{k+1}] = phi'a and gradient loadings Z_d = psi'c_d.
class StepRegression {
public:
    // X is N x d states, dB is N x d increments, Y has N entries.
    static StepRegression fit(LsmcBasis basis, const LsmcConfig& cfg, std::size_t cells_per_dim, int d,
                              const std::vector<double>& X, const std::vector<double>& dB,
                              const std::vector<double>& Y, std::size_t step);

    // Conditional expectation and gradient loadings (d entries) at x.
    double eval(const double* x, double* z) const;

    // Mean over the sample of the OLS variance of each Z_d estimate.
    const std::vector<double>& z_noise_var() const { return z_noise_; }

    // Gradient-free variant used for plain conditional expectations.
    static StepRegression fit_mean(LsmcBasis basis, const LsmcConfig& cfg, std::size_t cells_per_dim, int d,
                                   const std::vector<double>& X, const std::vector<double>& Y, std::size_t step);

    struct Impl;

private:
    std::shared_ptr<const Impl> impl_;
    std::vector<double> z_noise_;
};

struct LsmcDiagnostics {
    std::string basis;
    std::size_t cells_per_dim = 0;
    double clamp_rate = 0.0;
    std::vector<double> z_rms;    // time-weighted RMS of each fitted gradient component
    std::vector<double> z_floor;  // same for the OLS standard error
    std::vector<std::string> warnings;
};

class LsmcSolution : public ValueField {
public:
    int m() const override { return m_; }
    int n() const override { return n_; }
    double value(double t, const double* w, const double* wp) const override;
    void gradient(double t, const double* w, const double* wp, double* z, double* zp) const override;

    double Y0 = 0.0;  // mean of xi - sum g dt along paths
    double se = 0.0;
    double Y0_regressed = 0.0;  // Y at step 0 from the fitted model
    Frame frame = Frame::Qmin;
    LsmcDiagnostics diag;

    // Norm of fitted Z (W part) and Z_perp relative to their noise floors.
    double z_ratio() const;
    double zperp_ratio() const;

private:
    friend LsmcSolution solve_lsmc(const Claim&, const MarketModel&, const PathEnsemble&, const QGammaParams&,
                                   const LsmcConfig&, Driver);
    std::size_t step_of(double t) const;
    int m_ = 1, n_ = 1;
    std::vector<double> knots_;
    std::vector<StepRegression> steps_;
    std::shared_ptr<const Claim> claim_;
    QGammaParams params_{2.0, 1.0};
    Driver driver_ = Driver::Pricing;
    MarketModel model_;
    double lo_ = 0.0, hi_ = 0.0;
    bool clamp_ = true;
    int picard_ = 1;
};

// Backward regression scheme on the ensemble's grid. In frame Qmin the state
// is simulated under Qmin and the driver is g; in frame P it is lambda.Z + g.
LsmcSolution solve_lsmc(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                        const QGammaParams& params, const LsmcConfig& config, Driver driver = Driver::Pricing);

// Cells per dimension for the LocalLinear basis.
std::size_t auto_cells(std::size_t N, int d, const LsmcConfig& cfg);

}  // namespace tsallis
