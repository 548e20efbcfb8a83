#pragma once

#include <algorithm>
#include <complex>
#include <functional>
#include <vector>

#include "intertwine/grid.hpp"

namespace itw {

using cplx = std::complex<double>;

// Real and complex bivariate evaluators in (x, t).
using Bivar = std::function<double(double, double)>;
using CBivar = std::function<cplx(double, double)>;

inline Bivar const_bivar(double v) {
    return [v](double, double) { return v; };
}
inline CBivar const_cbivar(cplx v) {
    return [v](double, double) { return v; };
}
inline CBivar to_cbivar(const Bivar& f) {
    return [f](double x, double t) { return cplx(f(x, t), 0.0); };
}

// Complex-valued samples on a Grid1D. Fields are treated as immutable by the
// operator routines: every operation returns a fresh field.
//
// unreliable_band counts points per side whose values came through one-sided
// derivative stencils (or compositions thereof); norms and residuals exclude
// that band.
struct ComplexField {
    Grid1D grid;
    std::vector<cplx> values;
    int unreliable_band = 0;

    ComplexField() = default;
    explicit ComplexField(const Grid1D& g) : grid(g), values(g.n, cplx(0.0, 0.0)) {}

    cplx& operator[](int i) { return values[i]; }
    const cplx& operator[](int i) const { return values[i]; }
    int size() const { return grid.n; }
};

inline ComplexField sample_field(const Grid1D& g, const std::function<cplx(double)>& fn) {
    ComplexField f(g);
    for (int i = 0; i < g.n; ++i) f.values[i] = fn(g.point(i));
    return f;
}

inline void check_same_grid(const ComplexField& a, const ComplexField& b) {
    require(a.grid == b.grid, "grid-mismatch", "fields live on different grids");
}

inline ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    check_same_grid(a, b);
    ComplexField r = a;
    for (int i = 0; i < r.size(); ++i) r.values[i] += b.values[i];
    r.unreliable_band = std::max(a.unreliable_band, b.unreliable_band);
    return r;
}

inline ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    check_same_grid(a, b);
    ComplexField r = a;
    for (int i = 0; i < r.size(); ++i) r.values[i] -= b.values[i];
    r.unreliable_band = std::max(a.unreliable_band, b.unreliable_band);
    return r;
}

inline ComplexField operator*(cplx s, const ComplexField& a) {
    ComplexField r = a;
    for (auto& v : r.values) v *= s;
    return r;
}

// Pointwise multiplication by an evaluator at fixed time.
inline ComplexField scale_by(const ComplexField& a, const CBivar& c, double t) {
    ComplexField r = a;
    for (int i = 0; i < r.size(); ++i) r.values[i] *= c(r.grid.point(i), t);
    return r;
}

inline double max_abs(const ComplexField& f) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

} // namespace itw
