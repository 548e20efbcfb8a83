#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "intertwine/field.hpp"
#include "intertwine/profile.hpp"
#include "intertwine/spline.hpp"

namespace itw {

// Shape function with derivatives up to order 4 on demand. Wraps either an
// analytic Profile or a numerically integrated Riccati flow whose
// derivatives come from the flow equation itself (chain rule), so residual
// identities hold along the trajectory to roundoff.
class ShapeFn {
public:
    using Jet5 = std::array<double, 5>;

    ShapeFn() = default;
    explicit ShapeFn(Profile p);
    ShapeFn(std::function<Jet5(double)> jet, int exact_order, std::string note);

    Jet5 jet(double x) const;
    double operator()(double x) const { return jet(x)[0]; }
    double d(int k, double x) const { return jet(x)[static_cast<size_t>(k)]; }
    int exact_order() const { return exact_order_; } // derivatives trustworthy up to this order
    const std::string& note() const { return note_; }
    bool valid() const { return static_cast<bool>(jet_); }

private:
    std::function<Jet5(double)> jet_;
    int exact_order_ = 4;
    std::string note_;
};

// First-order flows behind the closed-form potential families:
//   painleve4-riccati: f' = -2 f^2 - 2 m x f - a        (params m, a)
//   painleve2-riccati: W' = W^2 + k x                   (params k)
//   eq41-riccati:      f' = 2 f^2 - (beta/4) x^2 + d    (params beta, d)
enum class RiccatiKind { painleve4, painleve2, eq41 };

RiccatiKind riccati_kind_from_string(const std::string& s);
std::string to_string(RiccatiKind k);

struct OdeSolution {
    Grid1D grid;
    int lo = 0, hi = 0;          // inclusive index range actually covered
    std::vector<double> values;  // values[i - lo] is the solution at grid point i
    double max_step_error = 0.0; // Richardson (h vs h/2) estimate, worst step
    bool truncated_left = false, truncated_right = false;
    double blowup_magnitude = 1e8;
    RiccatiKind kind{};
    std::vector<double> params;

    double value_at_index(int i) const { return values[static_cast<size_t>(i - lo)]; }
    bool covers(int i) const { return i >= lo && i <= hi; }
};

// Classical RK4 marching outward from x_start in both directions with step h
// equal to the grid spacing; one h/2 re-run bounds the step error. A sample
// exceeding the blow-up magnitude truncates the run on that side (recorded,
// not fatal) unless it happens on the very first step.
OdeSolution integrate_riccati(RiccatiKind kind, const std::vector<double>& params, double x_start,
                              double y_start, const Grid1D& grid);

// ShapeFn views of solutions: values via cubic spline, derivatives via the
// flow equation.
ShapeFn shape_from_solution(const OdeSolution& sol);

// Pointwise defect of a shape function in one of the structural equations:
//   painleve4:      f'' = f'^2/2f + 6f^3 + 8 m x f^2 + 2(m^2 x^2 - m + a) f + d/2f
//   painleve2:      W'' = 2 W^3 + 4 mt x W + k
//   eq40:           third-order consistency equation of the oscillating
//                   fourth-order charge family (params beta, c, a0, x0)
//   eq411:          f1'''' = lambda0^2 f1
//   first-integral: 2 f1''' f1' - f1''^2 - lambda0^2 f1^2 + 4 lambda0^2 sigma delta
enum class ResidualKind { painleve4, painleve2, eq40, eq411, first_integral };

ResidualKind residual_kind_from_string(const std::string& s);

struct OdeResidual {
    std::vector<double> xs;
    std::vector<double> r;
    double max_abs = 0.0;
};

OdeResidual ode_residual(ResidualKind kind, const ShapeFn& shape, const Grid1D& sample,
                         const std::vector<double>& params);

} // namespace itw
