#pragma once

#include <utility>

#include "intertwine/families.hpp"
#include "intertwine/propagate.hpp"

namespace itw {

// One measured residual with the tolerance it was judged against. `band` is
// the number of points per side excluded from norms (reliable interior).
struct ResidualEntry {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    int band = 0;
    std::string note;
};

// Observed order between two grid levels.
struct ConvergenceEntry {
    std::string levels;
    double coarse = 0.0, fine = 0.0;
    double ratio = 0.0;
    double observed_order = 0.0;
    double expected_order = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::string scenario;
    std::string provenance;
    std::vector<ResidualEntry> residuals;
    std::vector<ConvergenceEntry> convergence;
    bool kernel_element = false; // the mapped source was (numerically) annihilated

    bool passed() const {
        for (const auto& r : residuals)
            if (!r.pass) return false;
        for (const auto& c : convergence)
            if (!c.pass) return false;
        return true;
    }
};

// Transport check: the source snapshots must solve the V2 equation to tol/10
// (error source-not-a-solution otherwise); the charge image is then measured
// under V1. A source inside the charge's kernel is flagged, not failed. When
// a V1-side source is supplied, the adjoint charge direction is measured on
// it the same way (image under V2). The adjoint is not run on the numerical
// image of the forward map: stacking both stencil applications puts the
// defect measurement below its own round-off floor for fields of any size.
VerificationReport check_intertwining(const PotentialPair& pair, const Snapshots& source,
                                      double tol, const Snapshots* adjoint_source = nullptr);

// Commutator check: each test field is propagated under V (so the evolution
// operator annihilates it) and the symmetry is applied snapshot-by-snapshot;
// the evolution residual of the resulting series is the commutator norm.
// Test fields must vanish near the walls (test-touches-boundary).
VerificationReport check_symmetry(const Bivar& V, const SymmetryOpSpec& R,
                                  const std::vector<ComplexField>& tests, const TimeGrid& tg,
                                  double tol, EvolutionKind kind = EvolutionKind::schrodinger);

// ||q+ psi||^2 = ||H2 psi||^2 + lambda0^2/4 for unit-norm psi (arbitrary
// smooth fields, not only eigenstates). The zero field passes trivially; any
// other input must be normalized (unnormalized-input).
VerificationReport check_norm_identity(const PotentialPair& pair, const ComplexField& psi,
                                       double lambda0, double tol, double t = 0.0);

// Annihilation residual of the first-order kernel element and normalizability
// classification through the shape weight e^{-2K}: the weight is integrated
// over the y-image of the grid and classified convergent only when it has
// decayed to 1e-10 of its peak at both ends. Divergence is a classification,
// not an error.
VerificationReport zero_mode_check(const FirstOrderFamily& fam, const Grid1D& grid, double t,
                                   double tol = 1e-8);

// Observed convergence order from a residual recipe measured over nested
// levels (each level halves h, dt, or both). Passes when every adjacent pair
// shows order >= expected - 0.5.
using LevelMeasure = std::function<double(const Grid1D&, const TimeGrid&)>;
VerificationReport convergence_study(const LevelMeasure& measure,
                                     const std::vector<std::pair<Grid1D, TimeGrid>>& levels,
                                     double expected_order);

// Single-traveling-wave test: Fourier amplitudes of the forward (e^{+ikx})
// and counter-propagating (e^{-ikx}) components over a window whose length is
// snapped down to a multiple of pi/k (so the two components are orthogonal).
// Reported value is |counter| / |forward|.
VerificationReport reflection_check(const ComplexField& psi, double k, double window_lo,
                                    double window_hi, double tol = 1e-3);

} // namespace itw
