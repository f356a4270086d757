#pragma once

namespace tsallis {

// Nonlinearity g of the backward equation u_t + (1/2) Laplace u = lambda u_w + g:
//   Pricing:              g = f(u) |Z_perp|^2
//   CertaintyEquivalent:  g = f(u) (|Z|^2 + |Z_perp|^2)
//   Linear:               g = 0 (Qmin expectation)
enum class Driver { Pricing, CertaintyEquivalent, Linear };

inline const char* driver_name(Driver d) {
    switch (d) {
        case Driver::Pricing: return "pricing";
        case Driver::CertaintyEquivalent: return "certainty_equivalent";
        case Driver::Linear: return "linear";
    }
    return "pricing";
}

// A solution u(t, W, W_perp) with its gradient (Z, Z_perp), queryable off
// the grid or sample it was computed on.
class ValueField {
public:
    virtual ~ValueField() = default;
    virtual int m() const = 0;
    virtual int n() const = 0;
    virtual double value(double t, const double* w, const double* wp) const = 0;
    virtual void gradient(double t, const double* w, const double* wp, double* z, double* zp) const = 0;
};

}  // namespace tsallis
