#pragma once

#include "intertwine/eigen.hpp"
#include "intertwine/kernels.hpp"
#include "intertwine/profile.hpp"

namespace itw {

// Crank-Nicolson time stepping with a Numerov-weighted spatial operator
// (fourth order in h, second order in dt), Dirichlet walls, potential sampled
// at the midpoint time of each step. The scheme conserves the weighted norm
// exactly in the unitary case; the recorded per-step drift of the plain L2
// norm stays at roundoff for resolved states.
struct PropagateOptions {
    EvolutionKind kind = EvolutionKind::schrodinger;
    int store_every = 1;            // thin the stored snapshots
    double stability_safety = 0.5;  // require max|V| * dt below this
    double leak_threshold = 1e-6;   // boundary-band amplitude vs current norm
};

Snapshots propagate(const Bivar& V, const ComplexField& psi0, const TimeGrid& tg,
                    const PropagateOptions& opt = {});

// Separable solutions psi(x,t) = rho^{-1/2} e^{-i g(x,t)} phi_n(y) e^{-i E_n tau}
// with y = x/rho + mu, tau = int_0^t rho^{-2} and the quadratic gauge phase
// g = -(rho'/4rho) x^2 + (rho mu'/2) x + gamma. The modes live on a fixed
// y-grid; evaluation at y(x,t) interpolates with a cubic spline.
struct SeparatedSpec {
    Profile rho, mu, gamma;
    EigenResult modes;
    int level = 0;
};

Snapshots separated_solution(const SeparatedSpec& spec, const Grid1D& grid, const TimeGrid& tg);

// Change of variables between the laboratory frame and the separation frame:
// forward resamples psi onto the y-grid and strips the weight,
//   phi(y, t) = sqrt(rho) e^{+i g(x,t)} psi(x, t)|_{x = rho (y - mu)};
// inverse puts the weight back on the x-grid.
struct RMap {
    Profile rho, mu, gamma;
};

Snapshots r_separation_forward(const RMap& map, const Snapshots& psi, const Grid1D& y_grid);
Snapshots r_separation_inverse(const RMap& map, const Snapshots& phi, const Grid1D& x_grid);

// Pointwise substitution between drift-form densities and the conjugated
// heat-equation picture: P = e^{-U/2} psi. Direction strings:
// "fp-to-diffusion" (input must be real) and "diffusion-to-fp".
Snapshots fp_transform(const Snapshots& in, const Bivar& U, const std::string& direction);

} // namespace itw
