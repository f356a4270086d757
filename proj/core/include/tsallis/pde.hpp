#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "tsallis/field.hpp"
#include "tsallis/market.hpp"
#include "tsallis/payoff.hpp"
#include "tsallis/qcalc.hpp"

namespace tsallis {

enum class Richardson { Auto, On, Off };

struct PdeConfig {
    std::size_t points = 201;   // nodes per space dimension, odd
    std::size_t steps = 200;    // time steps
    double half_width = 0.0;    // L; 0 selects 5 sqrt(T)
    double grading = 2.0;       // time grid exponent, see TimeGrid::graded
    double picard_tol = 1e-10;
    int picard_max = 50;
    double mu_min = 1e-8;
    double smoothing_cells = 1.0;  // raw ind() becomes a ramp of half-width this many cells
    std::size_t snapshot_stride = 1;  // keep every k-th time slice; 0 keeps t_0 and T only
    // Auto extrapolates unless the claim has a raw indicator.
    Richardson richardson = Richardson::Auto;
};

class PdeError : public std::runtime_error {
public:
    PdeError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

struct PdeDiagnostics {
    int max_picard = 0;
    double max_residual = 0.0;
    double min_mu = 0.0;
};

class PdeSolution : public ValueField {
public:
    int m() const override { return 1; }
    int n() const override { return 1; }
    double value(double t, const double* w, const double* wp) const override;
    void gradient(double t, const double* w, const double* wp, double* z, double* zp) const override;

    double Y0 = 0.0;       // reported value at (0, 0, 0)
    double Y0_fine = 0.0;  // fine-mesh value before extrapolation
    double scheme_tol = 0.0;  // |fine - coarse| / 3 when extrapolated
    bool extrapolated = false;
    double smoothing = 0.0;   // ramp half-width applied to raw indicators
    PdeDiagnostics diag;

    std::size_t points = 0;
    double L = 0.0;
    double h = 0.0;
    std::vector<double> knots;          // full time grid
    std::vector<std::size_t> kept;      // indices of stored slices
    std::vector<std::vector<double>> slices;  // points x points, w-major

    const std::vector<double>& slice_at(std::size_t k) const;
    double node(std::size_t i) const { return -L + h * static_cast<double>(i); }

    // t,w,wp,Y,Z,Zperp rows for the stored slices, every `stride`-th node.
    void write_csv(std::ostream& os, std::size_t stride = 1) const;
};

PdeSolution solve_pde(const Claim& claim, const MarketModel& model, const QGammaParams& params,
                      const PdeConfig& config, Driver driver = Driver::Pricing);

// Backward solve from terminal node values on [0, knots.back()] with the given
// time knots (no extrapolation). Used for restarts from an intermediate slice.
PdeSolution solve_pde_from(const std::vector<double>& terminal, const std::vector<double>& knots, double L,
                           std::size_t points, const MarketModel& model, const QGammaParams& params,
                           const PdeConfig& config, Driver driver);

}  // namespace tsallis
