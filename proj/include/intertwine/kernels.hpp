#pragma once

#include <vector>

#include "intertwine/charge.hpp"
#include "intertwine/field.hpp"

namespace itw {

enum class EvolutionKind { schrodinger, diffusion };

// Time sequence of fields on a common grid. `norms` and the leak flags are
// filled in by the propagator; hand-built sequences leave them empty.
struct Snapshots {
    TimeGrid tg;
    std::vector<ComplexField> fields;
    EvolutionKind kind = EvolutionKind::schrodinger;
    std::vector<double> norms;
    double max_norm_drift = 0.0;
    bool boundary_leak = false;
    int leak_step = -1;
    std::string note;

    const Grid1D& grid() const { return fields.front().grid; }
};

Snapshots make_snapshots(const TimeGrid& tg, std::vector<ComplexField> fields,
                         EvolutionKind kind = EvolutionKind::schrodinger);

// Sample a closed-form solution psi(x, t) on grid x time grid.
Snapshots sample_snapshots(const Grid1D& g, const TimeGrid& tg, const CBivar& psi,
                           EvolutionKind kind = EvolutionKind::schrodinger);

// H psi = -psi'' + V psi at fixed time.
ComplexField hamiltonian_apply(const Bivar& V, const ComplexField& psi, double t);

// Evolution defect measured from snapshot triples: the time derivative is the
// central difference over [k-1, k+1], space derivatives come from the
// fourth-order stencils, and the L2 norm is taken over the reliable interior.
//   schrodinger: i dpsi/dt + psi'' - V psi
//   diffusion:  - dpsi/dt + psi'' - V psi
struct ResidualSeries {
    std::vector<double> times; // interior snapshot times
    std::vector<double> l2;    // interior L2 norm of the defect at each time
    double max_l2 = 0.0;
    int band = 0; // points per side excluded from the norms
};

ResidualSeries schrodinger_residual(const Bivar& V, const Snapshots& s);
ResidualSeries diffusion_residual(const Bivar& V, const Snapshots& s);
ResidualSeries evolution_residual(const Bivar& V, const Snapshots& s); // dispatch on s.kind

// The defect field itself at interior snapshot index k (used by symmetry
// commutator checks).
ComplexField evolution_defect(const Bivar& V, const Snapshots& s, int k);

// Apply a charge to every snapshot.
Snapshots apply_charge_series(const ChargeSpec& q, const Snapshots& s);

} // namespace itw
