#pragma once

#include <memory>
#include <string>

#include "intertwine/field.hpp"

namespace itw {

// Differential operator in x with time-dependent coefficients:
//   order 1:  q = c1(x,t) d/dx + c0(x,t)
//   order 2:  q = g2(t) d^2/dx^2 - 2 f(x,t) d/dx + w(x,t)
// c1x / fx are the analytic x-derivatives of c1 / f; keeping them in the spec
// makes the adjoint an exact involution instead of a stencil approximation.
// `canonical` marks second-order charges with real f and w = b + i c carrying
// the gauge split used by the stationary-pair family.
struct ChargeSpec {
    int order = 1;

    CBivar c1, c0, c1x;

    std::function<double(double)> g2;
    CBivar f, fx, w;
    bool canonical = false;

    std::string note;

    // set when this charge was produced by adjoint_charge, so the double
    // adjoint can return the original object instead of re-deriving it
    std::shared_ptr<const ChargeSpec> adjoint_of;
};

ChargeSpec first_order_charge(CBivar c1, CBivar c0, CBivar c1x, std::string note = "");
ChargeSpec second_order_charge(std::function<double(double)> g2, CBivar f, CBivar fx, CBivar w,
                               bool canonical, std::string note = "");

ComplexField apply_charge(const ChargeSpec& q, const ComplexField& psi, double t);

// Formal L2 adjoint (conjugate-linear pairing); applying it twice returns the
// original coefficients exactly.
ChargeSpec adjoint_charge(const ChargeSpec& q);

} // namespace itw
