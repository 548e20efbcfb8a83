#pragma once

#include <array>

#include "intertwine/charge.hpp"
#include "intertwine/ode.hpp"
#include "intertwine/profile.hpp"
#include "intertwine/symmetry.hpp"

namespace itw {

// Output of every family builder: two partner potentials and the operator
// that carries solutions of the V2 evolution equation into solutions of the
// V1 equation. `halfline` marks pairs whose coefficients have a pole at the
// origin, so grids must keep away from it.
struct PotentialPair {
    Bivar V1, V2;
    ChargeSpec charge;
    bool halfline = false;
    std::string provenance;
};

// ---------------------------------------------------------------------------
// First-order family. The time dependence enters through a scale rho(t) > 0,
// a drift mu(t) and a phase gauge gamma(t); the shape K acts in the moving
// coordinate y = x/rho + mu:
//   V_{1,2} = (K'^2 +- K'')/rho^2 - (rho''/4rho) x^2
//             + (rho' mu' + rho mu''/2) x - rho^2 mu'^2/4 + gamma'
//   q+ = rho d/dx + K'(y) - (i/2)(rho' x - rho^2 mu')
// The minus branch owns the charge's kernel element
//   psi = rho^{-1/2} e^{-K(y)} e^{-i g},
//   g   = -(rho'/4rho) x^2 + (rho mu'/2) x + gamma,
// whose square-integrability is governed by the weight e^{-2K}.
struct FirstOrderFamily {
    Profile rho, mu, gamma;
    Profile K;
};

PotentialPair first_order_pair(const FirstOrderFamily& fam);
CBivar first_order_zero_mode(const FirstOrderFamily& fam);
std::function<double(double)> first_order_weight(const FirstOrderFamily& fam); // e^{-2K}

// Quadratic gauge phase g(x, t) of the family (exposed for frame changes).
Bivar first_order_gauge_phase(const FirstOrderFamily& fam);

// ---------------------------------------------------------------------------
// Quadratic-in-momentum symmetry of a single equation. For
//   V = -(1/8)(w''/w - w'^2/2w^2) x^2 - (1/2)(nu'/w - nu w'/2w^2) x + Phi(z)/w,
//   z = x/sqrt(w) - int_0^t nu w^{-3/2}
// the operator R = -w dxx + 2 i delta dx + i (d delta/dx) + zeta with
//   delta = w' x/4 + nu/2,
//   zeta  = Phi(z) + w'^2 x^2/(16 w) + nu w' x/(4 w) + nu^2/(4 w)
// commutes with the evolution operator. Positivity of w is enforced at
// evaluation points.
struct SymmetryFamily {
    Profile omega, nu;
    Profile Phi;
};

struct SymmetryFamilyOps {
    Bivar V;
    ChargeSpec R; // R as a single second-order charge
    SymmetryOpSpec R_op;
    Bivar delta, zeta;
    std::function<double(double, double)> z_of;
    std::string provenance;
};

SymmetryFamilyOps symmetry_family_build(const SymmetryFamily& fam);

// ---------------------------------------------------------------------------
// Drift-form (Fokker-Planck) pair. A real superpotential chi built from a
// space shape and a time shape,
//   chi = X(x) + T(t)   or   chi = X(x) * T(t),
// gives diffusion partners
//   V1 = chi'^2 + chi'' + chi_t - rho'/rho,   V2 = chi'^2 - chi'' + chi_t
// linked by q+ = rho (d/dx + chi'), and drift potentials
//   U1 = 2 ln rho - 2 chi(x, t),   U2 = 2 chi(x, -t)
// with V[U1] = V1 and V[U2](x, t) = V2(x, -t). The amplitude knob exists so
// configuration-level attempts at a complex superpotential are rejected
// rather than silently truncated.
enum class ChiCombine { add, multiply };

struct FokkerPlanckFamily {
    Profile chi_x;
    Profile chi_t;
    ChiCombine combine = ChiCombine::add;
    Profile rho;
    cplx chi_amplitude = 1.0;
};

struct FokkerPlanckOps {
    PotentialPair pair;
    Bivar U1, U2;
    Bivar chi;
    std::string provenance;
};

FokkerPlanckOps fokker_planck_pair(const FokkerPlanckFamily& fam);

// The charge conjugated down to the drift-form level,
//   Q = e^{-U1/2} q+ e^{+U2/2};
// it maps drift-form densities between the two descriptions exactly when chi
// is stationary.
ChargeSpec fp_level_charge(const FokkerPlanckOps& ops);

// ---------------------------------------------------------------------------
// Oscillating third-order charge built on a shape f solving the fourth
// Painleve equation
//   f'' = f'^2/2f + 6f^3 + 8 m x f^2 + 2(m^2 x^2 - m + a) f + d/2f.
// Potentials come out of the first-order route
//   W = -2f - m x,   V1 = W^2 + W',   V2 = W^2 - W' - 2m,
// and the second-order pieces are
//   M+ = dxx - 2f dx + b,  b = -f' + f^2 - f''/2f + f'^2/4f^2 + d/4f^2,
//   M- = dxx + 2f dx + 2f' + b,   a+- = +-d/dx + W.
// The full charge q+ = M+ + A(t) a+ with A = m0 e^{-2imt} intertwines the
// pair; V1_alt / V2_alt rebuild the potentials through the ratio route
//   V_{1,2} = -+2f' + f^2 + f''/2f - f'^2/4f^2 - d/4f^2 - a
// as an algebraic cross-check. R1 / R2 are the closed sixth-order symmetries;
// R2_misordered swaps the second product into the type-mismatched order and
// is kept for contrast experiments.
struct PainleveIVFamily {
    ShapeFn f;
    double m = 0, a = 0, d = 0;
    cplx m0 = 1.0;
    double residual_gate = 1e-6;
};

struct PainleveIVOps {
    PotentialPair pair;
    ChargeSpec Mp, Mm, ap, am;
    Bivar V1_alt, V2_alt;
    SymmetryOpSpec R1, R2, R2_misordered;
    std::function<cplx(double)> A;
    std::string provenance;
};

PainleveIVOps painleve4_pair(const PainleveIVFamily& fam, const Grid1D& probe);

// ---------------------------------------------------------------------------
// Linear-in-time charge built on a shape W solving the second Painleve
// equation W'' = 2 W^3 + 4 mt x W + k. Potentials are V_{1,2} = W^2 +- W';
// the second-order piece uses
//   f = n - W/2,   b = (W' - W^2)/2 - 2 n W - mt x,
// and the full charge is q+ = M+ + A(t) a+ with A = -2 i mt t (the constant
// part of A is gauged to zero at t = 0). R1 / R2 close polynomially in t;
// Rt1 / Rt2 are their time-derivative companions.
struct PainleveIIFamily {
    ShapeFn W;
    double mtilde = 0, n = 0, k = 0;
    double residual_gate = 1e-6;
};

struct PainleveIIOps {
    PotentialPair pair;
    ChargeSpec Mp, Mm, ap, am;
    Bivar H1V, H2V; // potentials of the factorized Hamiltonians (= V1, V2)
    SymmetryOpSpec R1, R2, Rt1, Rt2;
    std::function<cplx(double)> A;
    std::string provenance;
};

PainleveIIOps painleve2_pair(const PainleveIIFamily& fam, const Grid1D& probe);

// ---------------------------------------------------------------------------
// Oscillating fourth-order charge q+ = theta(t) M+ + i lambda(t) x a+ with
//   theta' = -2 lambda, lambda' = beta theta / 2  (so theta, lambda rotate at
//   frequency sqrt(2 beta); beta must be positive),
//   W = -2f + c/x,
//   V2 = 2f' + 4f^2 + 2(1-2c) f/x + (beta/8) x^2 + a0
//        + [ (4c-2) int_{x0}^x f - 4 int_{x0}^x z f^2 + C1 ] / x^2,
//   V1 = V2 - 4 f',
//   b  = f' + 2f^2 - V2 + (beta/4) x^2 + a0.
// The integration constant C1 is gauged to zero. The shape must satisfy the
// third-order consistency equation (checked on the probe grid); the special
// solutions f' = 2 f^2 - (beta/4) x^2 + d with c = 0 satisfy it identically.
struct FourthOrderFamily {
    ShapeFn f;
    double beta = 1;
    double c = 0, a0 = 0, x0 = 0;
    double theta0 = 1, lambda0 = 0;
    double residual_gate = 1e-6;
};

struct FourthOrderOps {
    PotentialPair pair;
    std::function<double(double)> theta, lambda;
    std::function<double(double)> b_of, W_of, V2_of; // stationary coefficient slices
    std::string provenance;
};

FourthOrderOps fourth_order_family_build(const FourthOrderFamily& fam, const Grid1D& probe);

// ---------------------------------------------------------------------------
// Stationary partner of a non-stationary equation. With
//   f0(t) = sigma e^{l0 t} + delta e^{-l0 t},   D = f1(x) + f0(t),
//   f = f1'/2D,   c = f0'/2D,   V2 = N / f1'^2,
//   N = l0^2 sigma delta + (f1' f1''' - f1''^2/2)/2 - (l0^2/4) f1^2,
//   b = df/dx + 2 f^2 - V2,
// the canonical charge q+ = dxx - 2 f dx + (b + i c) intertwines V1 = V2 -
// 4 df/dx with the stationary V2. When N vanishes identically on the probe
// grid the partner potential is the free one and is returned as exact zero;
// otherwise points with f1' = 0 are rejected at evaluation
// (vanishing-denominator). The builder certifies stationarity by sampling
// the closure relation; shapes whose derivative data cannot support the
// certificate are rejected.
struct NonStatFamily {
    Profile f1;
    double sigma = 1, delta = 1, lambda0 = 1;
    double stationarity_gate = 1e-5;
};

struct NonStatOps {
    PotentialPair pair;
    Bivar f, b, c;
    std::function<double(double)> V2_of;
    bool V2_zero = false;
    SymmetryOpSpec R1, R2; // q+ q- and q- q+
    double lambda0 = 0;
    std::string provenance;
};

NonStatOps nonstat_stationary_pair(const NonStatFamily& fam, const Grid1D& probe);

// Max-abs residuals of the four closure relations of the canonical charge,
//   f_t - c_x,
//   b_t + c_xx + 4 c f_x,
//   f_xx + 4 f f_x - V2_x - b_x,
//   c_t + 2 f V2_x - b_xx - 4 b f_x - V2_xx,
// sampled over the probe grid at the given times (derivatives by central
// differences on the analytic coefficient fields).
std::array<double, 4> nonstat_constraint_residuals(const NonStatOps& ops, const Grid1D& probe,
                                                   const std::vector<double>& times);

// ---------------------------------------------------------------------------
// The stationary-pair construction transplanted into an oscillator background
// by the scale map y = x/rho, tau = int_0^t rho^{-2}:
//   V2(x,t) = V2~(y)/rho^2 - (rho''/4 rho) x^2,  V1 = V2 - 4 f~_y/rho^2,
// with the charge rebuilt in laboratory variables,
//   g2 = rho^2,  F = rho f~ + i g' x/4,  B = B~ - i g'/4 + (g' x/4)^2/g
//        + 2 i F (g' x/4)/g,   g = rho^2.
struct TDOscFamily {
    Profile rho;
    NonStatFamily base;
};

struct TDOscOps {
    PotentialPair pair;
    NonStatOps base; // coefficients as functions of (y, tau)
    std::function<double(double)> tau_of_t;
    std::function<double(double, double)> y_of;
    std::string provenance;
};

TDOscOps td_oscillator_pair(const TDOscFamily& fam, const Grid1D& probe);

} // namespace itw
