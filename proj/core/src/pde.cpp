#include "tsallis/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace tsallis {

namespace {

// Thomas algorithm; lo/di/up/rhs are overwritten.
void solve_tridiagonal(std::vector<double>& lo, std::vector<double>& di, std::vector<double>& up,
                       std::vector<double>& rhs) {
    const std::size_t n = di.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lo[i] / di[i - 1];
        di[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

class Stepper {
public:
    Stepper(const MarketModel& model, const QGammaParams& params, const PdeConfig& cfg, Driver driver,
            std::size_t P, double L)
        : model_(model), params_(params), cfg_(cfg), driver_(driver), P_(P), L_(L),
          h_(2.0 * L / static_cast<double>(P - 1)), lam_(P) {}

    double h() const { return h_; }

    // One backward step from U (time t1) to V (time t0).
    int step(const std::vector<double>& U, std::vector<double>& V, double t0, double t1, PdeDiagnostics& diag) {
        const double dt = t1 - t0;
        const double tm = 0.5 * (t0 + t1);
        for (std::size_t i = 0; i < P_; ++i) {
            const double w = -L_ + h_ * static_cast<double>(i);
            model_.lambda.eval(tm, &w, &lam_[i]);
        }
        const std::size_t NN = P_ * P_;
        a1u_.assign(NN, 0.0);
        a2u_.assign(NN, 0.0);
        apply_a1(U, a1u_);
        apply_a2(U, a2u_);
        nu_.assign(NN, 0.0);
        nonlinear(U, nu_, diag);

        V = U;
        std::vector<double>& nv = nv_;
        nv.assign(NN, 0.0);
        y_.assign(NN, 0.0);
        double diff = 0.0;
        for (int it = 1; it <= cfg_.picard_max; ++it) {
            nonlinear(V, nv, diag);
            for (std::size_t i = 1; i + 1 < P_; ++i)
                for (std::size_t j = 1; j + 1 < P_; ++j) {
                    const std::size_t c = i * P_ + j;
                    y_[c] = U[c] + dt * (a1u_[c] + a2u_[c] + 0.5 * (nu_[c] + nv[c])) - 0.5 * dt * a1u_[c];
                }
            sweep_w(y_, dt);
            for (std::size_t i = 1; i + 1 < P_; ++i)
                for (std::size_t j = 1; j + 1 < P_; ++j) y_[i * P_ + j] -= 0.5 * dt * a2u_[i * P_ + j];
            sweep_p(y_, dt);
            extrapolate(y_);
            diff = 0.0;
            for (std::size_t c = 0; c < NN; ++c) diff = std::max(diff, std::abs(y_[c] - V[c]));
            V.swap(y_);
            if (diff < cfg_.picard_tol) {
                diag.max_picard = std::max(diag.max_picard, it);
                diag.max_residual = std::max(diag.max_residual, diff);
                return it;
            }
        }
        std::ostringstream os;
        os << "PDE Picard iteration did not converge in " << cfg_.picard_max << " iterations at t=" << t0
           << " (residual " << diff << ")";
        throw PdeError(os.str(), diff);
    }

private:
    // A1 u = u_ww / 2 - lambda u_w on interior nodes.
    void apply_a1(const std::vector<double>& u, std::vector<double>& out) const {
        const double c2 = 0.5 / (h_ * h_), c1 = 0.5 / h_;
        for (std::size_t i = 1; i + 1 < P_; ++i)
            for (std::size_t j = 1; j + 1 < P_; ++j) {
                const double um = u[(i - 1) * P_ + j], u0 = u[i * P_ + j], up = u[(i + 1) * P_ + j];
                out[i * P_ + j] = c2 * (up - 2.0 * u0 + um) - lam_[i] * c1 * (up - um);
            }
    }

    void apply_a2(const std::vector<double>& u, std::vector<double>& out) const {
        const double c2 = 0.5 / (h_ * h_);
        for (std::size_t i = 1; i + 1 < P_; ++i)
            for (std::size_t j = 1; j + 1 < P_; ++j) {
                const std::size_t c = i * P_ + j;
                out[c] = c2 * (u[c + 1] - 2.0 * u[c] + u[c - 1]);
            }
    }

    // Minus the driver g(u, grad u) on interior nodes.
    void nonlinear(const std::vector<double>& u, std::vector<double>& out, PdeDiagnostics& diag) const {
        if (driver_ == Driver::Linear) return;
        const double inv2h = 0.5 / h_;
        const double a = (1.0 - params_.q) * params_.gamma;
        for (std::size_t i = 1; i + 1 < P_; ++i)
            for (std::size_t j = 1; j + 1 < P_; ++j) {
                const std::size_t c = i * P_ + j;
                const double mu_v = (1.0 - a * u[c]) / params_.q;
                if (!(mu_v >= cfg_.mu_min)) {
                    std::ostringstream os;
                    os << "PDE: mu(u) = " << mu_v << " below mu_min at node (" << -L_ + h_ * static_cast<double>(i)
                       << ", " << -L_ + h_ * static_cast<double>(j) << "), u = " << u[c];
                    throw DomainError(os.str(), u[c], 1.0 / a);
                }
                diag.min_mu = std::min(diag.min_mu, mu_v);
                const double f = params_.gamma / (2.0 * mu_v);
                const double zp = (u[c + 1] - u[c - 1]) * inv2h;
                double g = zp * zp;
                if (driver_ == Driver::CertaintyEquivalent) {
                    const double zw = (u[c + P_] - u[c - P_]) * inv2h;
                    g += zw * zw;
                }
                out[c] = -f * g;
            }
    }

    // (I - dt/2 A1) along w for every interior p line.
    void sweep_w(std::vector<double>& y, double dt) {
        const std::size_t n = P_ - 2;
        const double c2 = 0.5 / (h_ * h_), c1 = 0.5 / h_;
        for (std::size_t j = 1; j + 1 < P_; ++j) {
            lo_.resize(n);
            di_.resize(n);
            up_.resize(n);
            rhs_.resize(n);
            for (std::size_t r = 0; r < n; ++r) {
                const std::size_t i = r + 1;
                const double a = c2 + lam_[i] * c1, c = c2 - lam_[i] * c1;
                lo_[r] = -0.5 * dt * a;
                di_[r] = 1.0 + 0.5 * dt * 2.0 * c2;
                up_[r] = -0.5 * dt * c;
                rhs_[r] = y[i * P_ + j];
            }
            close_ends();
            solve_tridiagonal(lo_, di_, up_, rhs_);
            for (std::size_t r = 0; r < n; ++r) y[(r + 1) * P_ + j] = rhs_[r];
        }
    }

    void sweep_p(std::vector<double>& y, double dt) {
        const std::size_t n = P_ - 2;
        const double c2 = 0.5 / (h_ * h_);
        for (std::size_t i = 1; i + 1 < P_; ++i) {
            lo_.assign(n, -0.5 * dt * c2);
            di_.assign(n, 1.0 + dt * c2);
            up_.assign(n, -0.5 * dt * c2);
            rhs_.resize(n);
            for (std::size_t r = 0; r < n; ++r) rhs_[r] = y[i * P_ + r + 1];
            close_ends();
            solve_tridiagonal(lo_, di_, up_, rhs_);
            for (std::size_t r = 0; r < n; ++r) y[i * P_ + r + 1] = rhs_[r];
        }
    }

    // Substitutes u_0 = 2u_1 - u_2 and u_{P-1} = 2u_{P-2} - u_{P-3}.
    void close_ends() {
        const std::size_t n = di_.size();
        di_[0] += 2.0 * lo_[0];
        up_[0] -= lo_[0];
        lo_[0] = 0.0;
        di_[n - 1] += 2.0 * up_[n - 1];
        lo_[n - 1] -= up_[n - 1];
        up_[n - 1] = 0.0;
    }

    void extrapolate(std::vector<double>& y) const {
        const std::size_t e = P_ - 1;
        for (std::size_t j = 1; j < e; ++j) {
            y[j] = 2.0 * y[P_ + j] - y[2 * P_ + j];
            y[e * P_ + j] = 2.0 * y[(e - 1) * P_ + j] - y[(e - 2) * P_ + j];
        }
        for (std::size_t i = 0; i < P_; ++i) {
            y[i * P_] = 2.0 * y[i * P_ + 1] - y[i * P_ + 2];
            y[i * P_ + e] = 2.0 * y[i * P_ + e - 1] - y[i * P_ + e - 2];
        }
    }

    const MarketModel& model_;
    const QGammaParams& params_;
    const PdeConfig& cfg_;
    Driver driver_;
    std::size_t P_;
    double L_, h_;
    std::vector<double> lam_;
    std::vector<double> a1u_, a2u_, nu_, nv_, y_;
    std::vector<double> lo_, di_, up_, rhs_;
};

PdeSolution run(const std::vector<double>& terminal, const std::vector<double>& knots, double L, std::size_t P,
                const MarketModel& model, const QGammaParams& params, const PdeConfig& cfg, Driver driver,
                std::size_t stride) {
    if (P < 5 || P % 2 == 0) throw std::invalid_argument("PDE: points per dimension must be odd and >= 5");
    if (terminal.size() != P * P) throw std::invalid_argument("PDE: terminal slice has the wrong size");
    if (model.m != 1 || model.n != 1) throw std::invalid_argument("PDE: requires m = n = 1");
    const std::size_t K = knots.size() - 1;
    PdeSolution sol;
    sol.points = P;
    sol.L = L;
    sol.h = 2.0 * L / static_cast<double>(P - 1);
    sol.knots = knots;
    sol.diag.min_mu = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= K; ++k)
        if (k == 0 || k == K || (stride > 0 && k % stride == 0)) sol.kept.push_back(k);
    sol.slices.resize(sol.kept.size());

    Stepper stepper(model, params, cfg, driver, P, L);
    std::vector<double> U = terminal, V;
    std::size_t slot = sol.kept.size() - 1;
    sol.slices[slot] = U;
    for (std::size_t k = K; k-- > 0;) {
        stepper.step(U, V, knots[k], knots[k + 1], sol.diag);
        U.swap(V);
        if (slot > 0 && sol.kept[slot - 1] == k) sol.slices[--slot] = U;
    }
    const std::size_t c = (P - 1) / 2;
    sol.Y0 = sol.Y0_fine = U[c * P + c];
    if (driver == Driver::Linear) sol.diag.min_mu = 0.0;
    return sol;
}

std::vector<double> sample_terminal(const Claim& claim, std::size_t P, double L, double smoothing) {
    std::vector<double> u(P * P);
    const double h = 2.0 * L / static_cast<double>(P - 1);
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < P; ++j) {
            const double w = -L + h * static_cast<double>(i), wp = -L + h * static_cast<double>(j);
            u[i * P + j] = claim(&w, &wp, smoothing);
        }
    return u;
}

}  // namespace

const std::vector<double>& PdeSolution::slice_at(std::size_t k) const {
    const auto it = std::lower_bound(kept.begin(), kept.end(), k);
    if (it == kept.end() || *it != k) throw std::out_of_range("PDE: time slice not stored");
    return slices[static_cast<std::size_t>(it - kept.begin())];
}

namespace {

struct Bilinear {
    std::size_t i, j;
    double fx, fy;
};

Bilinear locate(double w, double wp, double L, double h, std::size_t P) {
    auto idx = [&](double x, std::size_t& i, double& f) {
        const double s = std::clamp((x + L) / h, 0.0, static_cast<double>(P - 1));
        i = std::min(static_cast<std::size_t>(s), P - 2);
        f = s - static_cast<double>(i);
    };
    Bilinear b{};
    idx(w, b.i, b.fx);
    idx(wp, b.j, b.fy);
    return b;
}

double interp(const std::vector<double>& u, const Bilinear& b, std::size_t P) {
    const double u00 = u[b.i * P + b.j], u01 = u[b.i * P + b.j + 1];
    const double u10 = u[(b.i + 1) * P + b.j], u11 = u[(b.i + 1) * P + b.j + 1];
    return (1 - b.fx) * ((1 - b.fy) * u00 + b.fy * u01) + b.fx * ((1 - b.fy) * u10 + b.fy * u11);
}

void node_grad(const std::vector<double>& u, std::size_t i, std::size_t j, std::size_t P, double h, double& gw,
               double& gp) {
    const std::size_t im = i > 0 ? i - 1 : i, ip = i + 1 < P ? i + 1 : i;
    const std::size_t jm = j > 0 ? j - 1 : j, jp = j + 1 < P ? j + 1 : j;
    gw = (u[ip * P + j] - u[im * P + j]) / (h * static_cast<double>(ip - im));
    gp = (u[i * P + jp] - u[i * P + jm]) / (h * static_cast<double>(jp - jm));
}

void interp_grad(const std::vector<double>& u, const Bilinear& b, std::size_t P, double h, double& gw, double& gp) {
    double w[4], p[4];
    node_grad(u, b.i, b.j, P, h, w[0], p[0]);
    node_grad(u, b.i, b.j + 1, P, h, w[1], p[1]);
    node_grad(u, b.i + 1, b.j, P, h, w[2], p[2]);
    node_grad(u, b.i + 1, b.j + 1, P, h, w[3], p[3]);
    const double c[4] = {(1 - b.fx) * (1 - b.fy), (1 - b.fx) * b.fy, b.fx * (1 - b.fy), b.fx * b.fy};
    gw = gp = 0.0;
    for (int k = 0; k < 4; ++k) {
        gw += c[k] * w[k];
        gp += c[k] * p[k];
    }
}

// Stored slices bracketing t and the weight of the later one.
void bracket(const PdeSolution& s, double t, std::size_t& a, double& wb) {
    const std::size_t n = s.kept.size();
    a = 0;
    while (a + 2 < n && s.knots[s.kept[a + 1]] <= t) ++a;
    const double ta = s.knots[s.kept[a]], tb = s.knots[s.kept[a + 1]];
    wb = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
}

}  // namespace

double PdeSolution::value(double t, const double* w, const double* wp) const {
    const Bilinear b = locate(*w, *wp, L, h, points);
    std::size_t a;
    double wb;
    bracket(*this, t, a, wb);
    return (1 - wb) * interp(slices[a], b, points) + wb * interp(slices[a + 1], b, points);
}

void PdeSolution::gradient(double t, const double* w, const double* wp, double* z, double* zp) const {
    const Bilinear b = locate(*w, *wp, L, h, points);
    std::size_t a;
    double wb;
    bracket(*this, t, a, wb);
    double gw0, gp0, gw1, gp1;
    interp_grad(slices[a], b, points, h, gw0, gp0);
    interp_grad(slices[a + 1], b, points, h, gw1, gp1);
    *z = (1 - wb) * gw0 + wb * gw1;
    *zp = (1 - wb) * gp0 + wb * gp1;
}

void PdeSolution::write_csv(std::ostream& os, std::size_t stride) const {
    stride = std::max<std::size_t>(stride, 1);
    os << "t,w,wp,Y,Z,Zperp\n";
    const auto old = os.precision(17);
    for (std::size_t s = 0; s < kept.size(); ++s) {
        const auto& u = slices[s];
        for (std::size_t i = 0; i < points; i += stride)
            for (std::size_t j = 0; j < points; j += stride) {
                double gw, gp;
                node_grad(u, i, j, points, h, gw, gp);
                os << knots[kept[s]] << ',' << node(i) << ',' << node(j) << ',' << u[i * points + j] << ',' << gw
                   << ',' << gp << '\n';
            }
    }
    os.precision(old);
}

PdeSolution solve_pde(const Claim& claim, const MarketModel& model, const QGammaParams& params,
                      const PdeConfig& config, Driver driver) {
    model.validate();
    if (driver != Driver::Linear) {
        const Admissibility adm = check_admissible(claim, params);
        if (!adm.ok) throw std::invalid_argument("PDE: claim not admissible: " + adm.reason);
    }
    const std::size_t P = config.points;
    const double L = config.half_width > 0.0 ? config.half_width : 5.0 * std::sqrt(model.T);
    const double h = 2.0 * L / static_cast<double>(P - 1);
    const double smoothing = claim.discontinuous() ? config.smoothing_cells * h : 0.0;
    const bool extrapolate = config.richardson == Richardson::On ||
                             (config.richardson == Richardson::Auto && !claim.discontinuous());
    if (extrapolate && (config.steps % 2 != 0 || P % 4 != 1))
        throw std::invalid_argument("PDE: extrapolation needs an even step count and points = 1 mod 4");

    const auto knots = TimeGrid::graded(model.T, config.steps, config.grading).knots();
    PdeSolution fine = run(sample_terminal(claim, P, L, smoothing), knots, L, P, model, params, config, driver,
                           config.snapshot_stride);
    fine.smoothing = smoothing;
    if (!extrapolate) return fine;

    const std::size_t Pc = (P + 1) / 2;
    std::vector<double> coarse_knots;
    for (std::size_t k = 0; k < knots.size(); k += 2) coarse_knots.push_back(knots[k]);
    const PdeSolution coarse = run(sample_terminal(claim, Pc, L, smoothing), coarse_knots, L, Pc, model, params,
                                   config, driver, 0);
    fine.extrapolated = true;
    fine.Y0 = (4.0 * fine.Y0_fine - coarse.Y0_fine) / 3.0;
    fine.scheme_tol = std::abs(fine.Y0_fine - coarse.Y0_fine) / 3.0;
    fine.diag.max_picard = std::max(fine.diag.max_picard, coarse.diag.max_picard);
    fine.diag.max_residual = std::max(fine.diag.max_residual, coarse.diag.max_residual);
    fine.diag.min_mu = std::min(fine.diag.min_mu, coarse.diag.min_mu);
    return fine;
}

PdeSolution solve_pde_from(const std::vector<double>& terminal, const std::vector<double>& knots, double L,
                           std::size_t points, const MarketModel& model, const QGammaParams& params,
                           const PdeConfig& config, Driver driver) {
    return run(terminal, knots, L, points, model, params, config, driver, config.snapshot_stride);
}

}  // namespace tsallis
