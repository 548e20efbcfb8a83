#pragma once

#include <functional>
#include <vector>

#include "intertwine/field.hpp"

namespace itw {

struct EigenResult {
    Grid1D grid;
    std::vector<double> energies;      // ascending
    std::vector<ComplexField> states;  // L2-normalized, Dirichlet ends
};

// Lowest `count` Dirichlet eigenpairs of -d^2/dx^2 + V on the grid via the
// second-order symmetric tridiagonal discretization: Sturm bisection for the
// values, inverse iteration for the vectors.
EigenResult stationary_eigensolve(const std::function<double(double)>& V, const Grid1D& grid,
                                  int count);

// Closed-form oscillator eigenpairs used by separable sources built on the
// Gaussian shape K(y) = y^2/2: Hermite functions, energies 2n + (0 or 2) for
// the lower/upper partner branch.
EigenResult oscillator_eigenpairs(const Grid1D& grid, int branch, int count);

} // namespace itw
