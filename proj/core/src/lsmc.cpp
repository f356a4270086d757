#include "tsallis/lsmc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tsallis/parallel.hpp"
#include "tsallis/stats.hpp"

namespace tsallis {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<std::vector<int>> monomials(int d, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(d, 0);
    for (int total = 0; total <= degree; ++total) {
        // all exponent vectors with the given total, lexicographic
        std::function<void(int, int)> rec = [&](int dim, int left) {
            if (dim == d - 1) {
                e[dim] = left;
                out.push_back(e);
                return;
            }
            for (int p = left; p >= 0; --p) {
                e[dim] = p;
                rec(dim + 1, left - p);
            }
        };
        rec(0, total);
    }
    return out;
}

void eval_monomials(const std::vector<std::vector<int>>& mono, const double* z, int d, int degree, double* out) {
    double pw[kMaxDim * 2][8];
    for (int j = 0; j < d; ++j) {
        pw[j][0] = 1.0;
        for (int p = 1; p <= degree; ++p) pw[j][p] = pw[j][p - 1] * z[j];
    }
    for (std::size_t r = 0; r < mono.size(); ++r) {
        double v = 1.0;
        for (int j = 0; j < d; ++j) v *= pw[j][mono[r][j]];
        out[r] = v;
    }
}

// Solves the ridge-regularized normal equations. Columns with an all-zero
// diagonal are pinned to 0. Returns false when the factorization fails.
bool solve_normal(MatrixXd G, const VectorXd& b, double ridge, VectorXd& coef, MatrixXd* inverse) {
    const Eigen::Index p = G.rows();
    VectorXd rhs = b;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(G(j, j) > 1e-300)) {
            G.row(j).setZero();
            G.col(j).setZero();
            G(j, j) = 1.0;
            rhs(j) = 0.0;
        } else {
            G(j, j) *= 1.0 + ridge;
        }
    }
    Eigen::LDLT<MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success) return false;
    const VectorXd dvec = ldlt.vectorD();
    for (Eigen::Index j = 0; j < p; ++j)
        if (!(dvec(j) > 0.0)) return false;
    coef = ldlt.solve(rhs);
    if (!coef.allFinite()) return false;
    if (inverse) *inverse = ldlt.solve(MatrixXd::Identity(p, p));
    return true;
}

[[noreturn]] void rank_error(std::size_t step, const char* what) {
    std::ostringstream os;
    os << "LSMC: rank-deficient regression at time step " << step << " (" << what << ")";
    throw std::runtime_error(os.str());
}

}  // namespace

struct StepRegression::Impl {
    LsmcBasis basis = LsmcBasis::Polynomial;
    int d = 0;
    bool with_z = true;

    // Polynomial
    int degree = 0, z_degree = 0;
    std::vector<double> center, scale;
    std::vector<std::vector<int>> mono, zmono;
    VectorXd coef;

    // LocalLinear
    std::size_t B = 1;
    std::vector<std::vector<double>> edges;  // B-1 interior edges per dim
    struct Cell {
        int kind = 0;  // 0: fallback, 1: constant, 2: constant + z, 3: affine + z
        std::vector<double> mean;
        VectorXd coef;
    };
    std::vector<Cell> cells;
    VectorXd fallback;  // global [1, x, dB]

    std::size_t cols() const { return mono.size() + (with_z ? d * zmono.size() : 0); }

    void poly_row(const double* x, const double* dB, double* row) const {
        double z[kMaxDim * 2];
        for (int j = 0; j < d; ++j) z[j] = (x[j] - center[j]) / scale[j];
        eval_monomials(mono, z, d, degree, row);
        if (!with_z) return;
        const std::size_t J = mono.size(), Jz = zmono.size();
        std::vector<double> psi(Jz);
        eval_monomials(zmono, z, d, z_degree, psi.data());
        for (int j = 0; j < d; ++j)
            for (std::size_t l = 0; l < Jz; ++l) row[J + j * Jz + l] = dB[j] * psi[l];
    }

    std::size_t cell_of(const double* x) const {
        std::size_t c = 0;
        for (int j = 0; j < d; ++j) {
            const auto& e = edges[j];
            const std::size_t bin = static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), x[j]) - e.begin());
            c = c * B + bin;
        }
        return c;
    }

    double eval(const double* x, double* z) const {
        if (basis == LsmcBasis::Polynomial) {
            double zs[kMaxDim * 2];
            for (int j = 0; j < d; ++j) zs[j] = (x[j] - center[j]) / scale[j];
            std::vector<double> phi(mono.size());
            eval_monomials(mono, zs, d, degree, phi.data());
            double e = 0.0;
            for (std::size_t r = 0; r < mono.size(); ++r) e += coef(static_cast<Eigen::Index>(r)) * phi[r];
            if (z) {
                const std::size_t J = mono.size(), Jz = zmono.size();
                if (!with_z) {
                    std::fill_n(z, d, 0.0);
                } else {
                    std::vector<double> psi(Jz);
                    eval_monomials(zmono, zs, d, z_degree, psi.data());
                    for (int j = 0; j < d; ++j) {
                        double s = 0.0;
                        for (std::size_t l = 0; l < Jz; ++l) s += coef(static_cast<Eigen::Index>(J + j * Jz + l)) * psi[l];
                        z[j] = s;
                    }
                }
            }
            return e;
        }
        const Cell& c = cells[cell_of(x)];
        double e = 0.0;
        if (c.kind == 0) {
            e = fallback(0);
            for (int j = 0; j < d; ++j) e += fallback(1 + j) * x[j];
            if (z)
                for (int j = 0; j < d; ++j) z[j] = with_z ? fallback(1 + d + j) : 0.0;
            return e;
        }
        e = c.coef(0);
        if (c.kind == 3)
            for (int j = 0; j < d; ++j) e += c.coef(1 + j) * (x[j] - c.mean[j]);
        if (z) {
            for (int j = 0; j < d; ++j) {
                if (!with_z || c.kind == 1)
                    z[j] = 0.0;
                else
                    z[j] = c.coef((c.kind == 3 ? 1 + d : 1) + j);
            }
        }
        return e;
    }
};

const char* basis_name(LsmcBasis b) {
    switch (b) {
        case LsmcBasis::Auto: return "auto";
        case LsmcBasis::Polynomial: return "polynomial";
        case LsmcBasis::LocalLinear: return "local_linear";
    }
    return "auto";
}

std::size_t auto_cells(std::size_t N, int d, const LsmcConfig& cfg) {
    const double per = static_cast<double>(std::max<std::size_t>(cfg.paths_per_cell, 1));
    const double b = std::floor(std::pow(static_cast<double>(N) / per, 1.0 / d) + 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(b, 1.0)), 1, cfg.max_cells_per_dim);
}

namespace {

StepRegression::Impl fit_impl(LsmcBasis basis, const LsmcConfig& cfg, std::size_t B, int d, bool with_z,
                              const std::vector<double>& X, const std::vector<double>* dB,
                              const std::vector<double>& Y, std::size_t step, std::vector<double>& z_noise) {
    using Impl = StepRegression::Impl;
    const std::size_t N = Y.size();
    Impl im;
    im.basis = basis;
    im.d = d;
    im.with_z = with_z;
    z_noise.assign(d, 0.0);
    const std::size_t blocks = (N + kBlockSize - 1) / kBlockSize;

    if (basis == LsmcBasis::Polynomial) {
        im.degree = cfg.degree;
        im.z_degree = cfg.z_degree;
        im.mono = monomials(d, cfg.degree);
        im.zmono = monomials(d, cfg.z_degree);
        im.center.assign(d, 0.0);
        im.scale.assign(d, 1.0);
        std::vector<double> col(N);
        for (int j = 0; j < d; ++j) {
            for (std::size_t i = 0; i < N; ++i) col[i] = X[i * d + j];
            const Estimate e = mean_se(col);
            const double sd = e.se * std::sqrt(static_cast<double>(N));
            im.center[j] = e.value;
            im.scale[j] = sd > 1e-12 ? sd : 1.0;
        }
        const std::size_t p = im.cols();
        std::vector<MatrixXd> Gb(blocks, MatrixXd::Zero(p, p));
        std::vector<VectorXd> bb(blocks, VectorXd::Zero(p));
        parallel_for(N, [&](std::size_t b0, std::size_t e0) {
            const std::size_t blk = b0 / kBlockSize;
            VectorXd row(p);
            for (std::size_t i = b0; i < e0; ++i) {
                im.poly_row(&X[i * d], dB ? &(*dB)[i * d] : nullptr, row.data());
                Gb[blk].selfadjointView<Eigen::Lower>().rankUpdate(row);
                bb[blk] += row * Y[i];
            }
        });
        MatrixXd G = MatrixXd::Zero(p, p);
        VectorXd b = VectorXd::Zero(p);
        for (std::size_t k = 0; k < blocks; ++k) {
            G += Gb[k];
            b += bb[k];
        }
        G = G.selfadjointView<Eigen::Lower>();
        MatrixXd inv;
        if (!solve_normal(G, b, cfg.ridge, im.coef, with_z ? &inv : nullptr)) rank_error(step, "polynomial basis");
        if (with_z) {
            // residual variance and the mean OLS variance of each Z_d
            std::vector<double> r2(N), zv(N * d);
            const std::size_t J = im.mono.size(), Jz = im.zmono.size();
            parallel_for(N, [&](std::size_t b0, std::size_t e0) {
                VectorXd row(p);
                std::vector<double> psi(Jz), zs(d);
                for (std::size_t i = b0; i < e0; ++i) {
                    im.poly_row(&X[i * d], &(*dB)[i * d], row.data());
                    const double r = Y[i] - row.dot(im.coef);
                    r2[i] = r * r;
                    for (int j = 0; j < d; ++j) zs[j] = (X[i * d + j] - im.center[j]) / im.scale[j];
                    eval_monomials(im.zmono, zs.data(), d, im.z_degree, psi.data());
                    for (int j = 0; j < d; ++j) {
                        double s = 0.0;
                        const Eigen::Index o = static_cast<Eigen::Index>(J + j * Jz);
                        for (std::size_t a = 0; a < Jz; ++a)
                            for (std::size_t c = 0; c < Jz; ++c)
                                s += psi[a] * inv(o + static_cast<Eigen::Index>(a), o + static_cast<Eigen::Index>(c)) * psi[c];
                        zv[i * d + j] = s;
                    }
                }
            });
            const double dof = std::max(1.0, static_cast<double>(N) - static_cast<double>(p));
            const double sigma2 = pairwise_sum(r2) / dof;
            std::vector<double> colv(N);
            for (int j = 0; j < d; ++j) {
                for (std::size_t i = 0; i < N; ++i) colv[i] = zv[i * d + j];
                z_noise[j] = sigma2 * pairwise_sum(colv) / static_cast<double>(N);
            }
        }
        return im;
    }

    // LocalLinear: equiprobable marginal edges, cells indexed row-major.
    im.B = B;
    im.edges.assign(d, {});
    {
        std::vector<double> col(N);
        for (int j = 0; j < d; ++j) {
            for (std::size_t i = 0; i < N; ++i) col[i] = X[i * d + j];
            std::sort(col.begin(), col.end());
            for (std::size_t b = 1; b < B; ++b) im.edges[j].push_back(col[b * N / B]);
        }
    }
    std::size_t ncell = 1;
    for (int j = 0; j < d; ++j) ncell *= B;
    std::vector<std::size_t> cell(N), count(ncell + 1, 0);
    for (std::size_t i = 0; i < N; ++i) {
        cell[i] = im.cell_of(&X[i * d]);
        ++count[cell[i] + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    std::vector<std::size_t> order(N);
    {
        std::vector<std::size_t> pos(count.begin(), count.end() - 1);
        for (std::size_t i = 0; i < N; ++i) order[pos[cell[i]]++] = i;
    }

    // global affine fallback for empty cells
    {
        const std::size_t p = 1 + d + (with_z ? d : 0);
        MatrixXd G = MatrixXd::Zero(p, p);
        VectorXd b = VectorXd::Zero(p), row(p);
        for (std::size_t i = 0; i < N; ++i) {
            row(0) = 1.0;
            for (int j = 0; j < d; ++j) row(1 + j) = X[i * d + j];
            if (with_z)
                for (int j = 0; j < d; ++j) row(1 + d + j) = (*dB)[i * d + j];
            G.selfadjointView<Eigen::Lower>().rankUpdate(row);
            b += row * Y[i];
        }
        G = G.selfadjointView<Eigen::Lower>();
        if (!solve_normal(G, b, cfg.ridge, im.fallback, nullptr)) rank_error(step, "global affine fallback");
    }

    im.cells.assign(ncell, {});
    std::vector<double> zvar_cell(ncell * d, 0.0);
    const std::size_t cell_blocks = ncell;
    parallel_for(cell_blocks, [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            const std::size_t lo = count[c], hi = count[c + 1], nc = hi - lo;
            auto& out = im.cells[c];
            if (nc == 0) {
                out.kind = 0;
                continue;
            }
            out.mean.assign(d, 0.0);
            for (std::size_t r = lo; r < hi; ++r)
                for (int j = 0; j < d; ++j) out.mean[j] += X[order[r] * d + j];
            for (int j = 0; j < d; ++j) out.mean[j] /= static_cast<double>(nc);

            const int zc = with_z ? d : 0;
            int kind;
            std::size_t p;
            if (nc >= 2 * static_cast<std::size_t>(1 + d + zc)) {
                kind = 3;
                p = 1 + d + zc;
            } else if (with_z && nc >= 2 * static_cast<std::size_t>(1 + zc)) {
                kind = 2;
                p = 1 + zc;
            } else {
                kind = 1;
                p = 1;
            }
            MatrixXd G = MatrixXd::Zero(p, p);
            VectorXd b = VectorXd::Zero(p), row(p);
            auto fill = [&](std::size_t i) {
                Eigen::Index k = 0;
                row(k++) = 1.0;
                if (kind == 3)
                    for (int j = 0; j < d; ++j) row(k++) = X[i * d + j] - out.mean[j];
                if (kind >= 2 && with_z)
                    for (int j = 0; j < d; ++j) row(k++) = (*dB)[i * d + j];
            };
            for (std::size_t r = lo; r < hi; ++r) {
                fill(order[r]);
                G.selfadjointView<Eigen::Lower>().rankUpdate(row);
                b += row * Y[order[r]];
            }
            G = G.selfadjointView<Eigen::Lower>();
            MatrixXd inv;
            const bool want_inv = with_z && kind >= 2;
            if (!solve_normal(G, b, cfg.ridge, out.coef, want_inv ? &inv : nullptr)) rank_error(step, "local cell");
            out.kind = kind;
            if (want_inv && nc > p) {
                double rss = 0.0;
                for (std::size_t r = lo; r < hi; ++r) {
                    fill(order[r]);
                    const double e = Y[order[r]] - row.dot(out.coef);
                    rss += e * e;
                }
                const double sigma2 = rss / static_cast<double>(nc - p);
                const Eigen::Index o = kind == 3 ? 1 + d : 1;
                for (int j = 0; j < d; ++j) zvar_cell[c * d + j] = sigma2 * inv(o + j, o + j) * static_cast<double>(nc);
            }
        }
    });
    if (with_z) {
        std::vector<double> colv(ncell);
        for (int j = 0; j < d; ++j) {
            for (std::size_t c = 0; c < ncell; ++c) colv[c] = zvar_cell[c * d + j];
            z_noise[j] = pairwise_sum(colv) / static_cast<double>(N);
        }
    }
    return im;
}

}  // namespace

StepRegression StepRegression::fit(LsmcBasis basis, const LsmcConfig& cfg, std::size_t cells_per_dim, int d,
                                   const std::vector<double>& X, const std::vector<double>& dB,
                                   const std::vector<double>& Y, std::size_t step) {
    StepRegression r;
    r.impl_ = std::make_shared<const Impl>(fit_impl(basis, cfg, cells_per_dim, d, true, X, &dB, Y, step, r.z_noise_));
    return r;
}

StepRegression StepRegression::fit_mean(LsmcBasis basis, const LsmcConfig& cfg, std::size_t cells_per_dim, int d,
                                        const std::vector<double>& X, const std::vector<double>& Y,
                                        std::size_t step) {
    StepRegression r;
    r.impl_ =
        std::make_shared<const Impl>(fit_impl(basis, cfg, cells_per_dim, d, false, X, nullptr, Y, step, r.z_noise_));
    return r;
}

double StepRegression::eval(const double* x, double* z) const { return impl_->eval(x, z); }

namespace {

// Driver g and, in frame P, the lambda.Z term.
double driver_value(Driver drv, const QGammaParams& prm, double y, const double* z, int m, int n, Frame frame,
                    const double* lam) {
    double g = 0.0;
    if (drv != Driver::Linear) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += z[m + j] * z[m + j];
        if (drv == Driver::CertaintyEquivalent)
            for (int j = 0; j < m; ++j) s += z[j] * z[j];
        g = driver_f(y, prm) * s;
    }
    if (frame == Frame::P)
        for (int j = 0; j < m; ++j) g += lam[j] * z[j];
    return g;
}

}  // namespace

LsmcSolution solve_lsmc(const Claim& claim, const MarketModel& model, const PathEnsemble& ens,
                        const QGammaParams& params, const LsmcConfig& config, Driver driver) {
    model.validate();
    if (model.m > 3 || model.n > 3) throw std::invalid_argument("LSMC: supports m, n <= 3");
    if (driver != Driver::Linear) {
        const Admissibility adm = check_admissible(claim, params);
        if (!adm.ok) throw std::invalid_argument("LSMC: claim not admissible: " + adm.reason);
    }
    const int m = model.m, n = model.n, d = m + n;
    const std::size_t N = ens.size(), K = ens.steps();
    const auto& grid = ens.grid();
    const LsmcBasis basis = config.basis != LsmcBasis::Auto
                                ? config.basis
                                : (claim.discontinuous() ? LsmcBasis::LocalLinear : LsmcBasis::Polynomial);
    const std::size_t B = basis == LsmcBasis::LocalLinear ? auto_cells(N, d, config) : 1;

    // states per step (N x d) and increments per step (N x d)
    std::vector<std::vector<double>> Xs(K + 1, std::vector<double>(N * d)), dBs(K, std::vector<double>(N * d));
    parallel_for(N, [&](std::size_t b, std::size_t e) {
        PathBuffer buf;
        for (std::size_t i = b; i < e; ++i) {
            load_path(model, ens, i, config.frame, buf);
            for (std::size_t k = 0; k <= K; ++k) {
                std::copy_n(buf.w_at(k, m), m, &Xs[k][i * d]);
                std::copy_n(buf.wp_at(k, n), n, &Xs[k][i * d + m]);
                if (k < K) {
                    std::copy_n(&buf.dB[k * m], m, &dBs[k][i * d]);
                    std::copy_n(&buf.dBp[k * n], n, &dBs[k][i * d + m]);
                }
            }
        }
    });

    LsmcSolution sol;
    sol.m_ = m;
    sol.n_ = n;
    sol.knots_ = grid.knots();
    sol.claim_ = std::make_shared<const Claim>(claim);
    sol.params_ = params;
    sol.driver_ = driver;
    sol.model_ = model;
    sol.lo_ = claim.lo;
    sol.hi_ = claim.hi;
    sol.clamp_ = config.clamp;
    sol.picard_ = config.picard_passes;
    sol.frame = config.frame;
    sol.diag.basis = basis_name(basis);
    sol.diag.cells_per_dim = B;
    sol.steps_.resize(K);

    std::vector<double> xi(N), Y(N), acc(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) xi[i] = claim(&Xs[K][i * d], &Xs[K][i * d + m]);
    Y = xi;

    std::vector<double> z2_weighted(d, 0.0), floor_weighted(d, 0.0);
    std::vector<unsigned char> clamped(N);
    std::size_t clamp_count = 0;
    std::vector<double> zsq(N * d);
    for (std::size_t k = K; k-- > 0;) {
        const double dt = grid.dt(k), t = grid[k];
        StepRegression reg = StepRegression::fit(basis, config, B, d, Xs[k], dBs[k], Y, k);
        parallel_for(N, [&](std::size_t b, std::size_t e) {
            double z[kMaxDim * 2], lam[kMaxDim];
            for (std::size_t i = b; i < e; ++i) {
                const double* x = &Xs[k][i * d];
                const double E = reg.eval(x, z);
                if (config.frame == Frame::P) model.lambda.eval(t, x, lam);
                double y = E, g = 0.0;
                bool hit = false;
                for (int pass = 0; pass < std::max(1, config.picard_passes); ++pass) {
                    double ya = y;
                    if (config.clamp) {
                        ya = std::clamp(y, claim.lo, claim.hi);
                    }
                    g = driver_value(driver, params, ya, z, m, n, config.frame, lam);
                    y = E - g * dt;
                }
                if (config.clamp && (y < claim.lo || y > claim.hi)) {
                    y = std::clamp(y, claim.lo, claim.hi);
                    hit = true;
                }
                Y[i] = y;
                acc[i] += g * dt;
                clamped[i] = hit ? 1 : 0;
                for (int j = 0; j < d; ++j) zsq[i * d + j] = z[j] * z[j];
            }
        });
        clamp_count += static_cast<std::size_t>(std::count(clamped.begin(), clamped.end(), 1));
        std::vector<double> col(N);
        for (int j = 0; j < d; ++j) {
            for (std::size_t i = 0; i < N; ++i) col[i] = zsq[i * d + j];
            z2_weighted[j] += dt * pairwise_sum(col) / static_cast<double>(N);
            floor_weighted[j] += dt * reg.z_noise_var()[j];
        }
        sol.steps_[k] = std::move(reg);
    }

    std::vector<double> R(N);
    for (std::size_t i = 0; i < N; ++i) R[i] = xi[i] - acc[i];
    const Estimate est = mean_se(R);
    sol.Y0 = est.value;
    sol.se = est.se;
    sol.Y0_regressed = pairwise_sum(Y) / static_cast<double>(N);
    const double T = grid.T();
    sol.diag.z_rms.resize(d);
    sol.diag.z_floor.resize(d);
    for (int j = 0; j < d; ++j) {
        sol.diag.z_rms[j] = std::sqrt(z2_weighted[j] / T);
        sol.diag.z_floor[j] = std::sqrt(floor_weighted[j] / T);
    }
    sol.diag.clamp_rate = static_cast<double>(clamp_count) / static_cast<double>(N * K);
    if (sol.diag.clamp_rate > config.clamp_warn_rate) {
        std::ostringstream os;
        os << "clamp activation rate " << sol.diag.clamp_rate << " exceeds " << config.clamp_warn_rate;
        sol.diag.warnings.push_back(os.str());
    }
    return sol;
}

std::size_t LsmcSolution::step_of(double t) const {
    const std::size_t K = knots_.size() - 1;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t k = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    return std::min(k, K - 1);
}

double LsmcSolution::value(double t, const double* w, const double* wp) const {
    if (t >= knots_.back()) return (*claim_)(w, wp);
    const std::size_t k = step_of(t);
    const int d = m_ + n_;
    double x[kMaxDim * 2], z[kMaxDim * 2], lam[kMaxDim];
    std::copy_n(w, m_, x);
    std::copy_n(wp, n_, x + m_);
    const double E = steps_[k].eval(x, z);
    if (frame == Frame::P) model_.lambda.eval(t, w, lam);
    const double dt = knots_[k + 1] - knots_[k];
    double y = E;
    for (int pass = 0; pass < std::max(1, picard_); ++pass) {
        const double ya = clamp_ ? std::clamp(y, lo_, hi_) : y;
        y = E - driver_value(driver_, params_, ya, z, m_, n_, frame, lam) * dt;
    }
    (void)d;
    return clamp_ ? std::clamp(y, lo_, hi_) : y;
}

void LsmcSolution::gradient(double t, const double* w, const double* wp, double* z, double* zp) const {
    const std::size_t k = step_of(std::min(t, knots_.back()));
    double x[kMaxDim * 2], zz[kMaxDim * 2];
    std::copy_n(w, m_, x);
    std::copy_n(wp, n_, x + m_);
    steps_[k].eval(x, zz);
    std::copy_n(zz, m_, z);
    std::copy_n(zz + m_, n_, zp);
}

double LsmcSolution::z_ratio() const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < m_; ++j) {
        num += diag.z_rms[j] * diag.z_rms[j];
        den += diag.z_floor[j] * diag.z_floor[j];
    }
    return den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? INFINITY : 0.0);
}

double LsmcSolution::zperp_ratio() const {
    double num = 0.0, den = 0.0;
    for (int j = m_; j < m_ + n_; ++j) {
        num += diag.z_rms[j] * diag.z_rms[j];
        den += diag.z_floor[j] * diag.z_floor[j];
    }
    return den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? INFINITY : 0.0);
}

}  // namespace tsallis
