#pragma once

#include <utility>

#include "intertwine/charge.hpp"
#include "intertwine/profile.hpp"

namespace itw {

// Reduction of a general second-order charge q = g(t) dxx - 2F dx + B to the
// canonical real-coefficient form in stretched variables. The imaginary part
// of F is fixed by the structure to gdot*x/4 + g1(t); a gauge multiplier and
// the coordinate change
//   tau = int_0^t 1/g,   y = x/sqrt(g) - 2 int_0^t g1 g^{-3/2}
// carry solutions between the two pictures, and the partner Hamiltonians
// shift by a quadratic-in-x potential term.
struct CanonicalForm {
    ChargeSpec charge_yt; // canonical charge, coefficients are functions of (y, tau)
    CBivar multiplier;    // gauge factor in the original (x, t) variables

    std::function<double(double, double)> y_of_xt;
    std::function<double(double)> tau_of_t;
    std::function<double(double, double)> x_of_yt; // args (y, tau)
    std::function<double(double)> t_of_tau;

    Bivar potential_shift; // added to both partner potentials in (x, t)
};

// g and g1 are time profiles; F and B are the charge coefficients in the
// original variables. The imaginary-part constraint on F and positivity of g
// are validated by sampling the probe grid across the time window.
CanonicalForm canonicalize_second_order(const Profile& g, const Profile& g1, const CBivar& F,
                                        const CBivar& B, const Grid1D& probe,
                                        std::pair<double, double> t_window);

} // namespace itw
