#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsallis/market.hpp"

namespace tsallis {

enum class EntropyRoute { Definitional, Integral };

const char* route_name(EntropyRoute r);

struct EntropyEstimate {
    double value = 0.0;
    double se = 0.0;
    EntropyRoute route = EntropyRoute::Definitional;
    double q = 0.0;
    std::string measure;
    std::string base;
    // Definitional route only: (mean(D^q) - 1)/(q - 1), and the largest
    // relative pathwise gap between D^q ln_q D and (D - D^q)/(1 - q).
    double moment_form = 0.0;
    double form_gap = 0.0;
};

// Closed form for constant loadings with |theta|^2 = c over horizon T.
// q == 1 gives the relative entropy c T / 2.
double tsallis_closed_form(double q, double c, double T);

// H_q = E[D_T^q ln_q D_T]; q == 1 gives E[D_T ln D_T].
EntropyEstimate tsallis_definitional(const DensityPaths& density, double q);

// H_q(Q|P) = (q/2) E_P int D_s^q (|lambda|^2 + |alpha|^2) ds, trapezoidal in time.
EntropyEstimate tsallis_integral(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure,
                                 double q);

// H_q(Q|Qmin) = (q/2) E_Qmin int (D^{Q,Qmin}_s)^q |alpha|^2 ds.
EntropyEstimate tsallis_q_vs_qmin(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure,
                                  double q);

struct ConditionalEntropy {
    std::size_t t_index = 0;
    std::size_t inner = 0;
    std::vector<double> value;  // per outer path
    std::vector<double> se;
};

// Nested estimate of H_{q,t}(Q|base) on the first `outer` paths of the
// ensemble, with M inner continuations per path. Requires M >= 2.
ConditionalEntropy tsallis_conditional(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure,
                                       double q, std::size_t t_index, std::size_t M = 256, std::size_t outer = 0,
                                       Frame base = Frame::P);

struct SubmartingaleReport {
    std::size_t t_index = 0;
    std::size_t paths = 0;
    std::size_t violations = 0;  // f(D_t) exceeds the nested mean by more than 3 SE
    double fraction = 0.0;
    bool pass = false;  // fraction < 1%
};

// Checks E[f(D_T) | F_t] >= f(D_t) for f(x) = x^q ln_q x by nested simulation.
SubmartingaleReport submartingale_check(const MarketModel& model, const PathEnsemble& ens,
                                        const MeasureSpec& measure, double q, std::size_t t_index,
                                        std::size_t M = 256, std::size_t outer = 0);

struct KlLimitReport {
    double delta = 0.0;
    EntropyEstimate kl, below, above;  // q = 1, 1 - delta, 1 + delta
    std::optional<double> kl_exact, below_exact, above_exact;
    double slope = 0.0;  // max |H_{1 +- delta} - H_1| / delta
    bool bracket = false;
    bool closed_form_ok = true;
};

// Compares H_{1 +- delta}(Q|P) with the relative entropy. With `c` (constant
// |lambda|^2 + |alpha|^2) the closed forms are checked within 4 SE.
KlLimitReport kl_limit_check(const MarketModel& model, const PathEnsemble& ens, const MeasureSpec& measure,
                             double delta, std::optional<double> c = std::nullopt);

// q,measure,base,route,estimate,stderr
void write_entropy_csv(std::ostream& os, std::span<const EntropyEstimate> rows);

}  // namespace tsallis
