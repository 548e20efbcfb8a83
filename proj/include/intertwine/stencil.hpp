#pragma once

#include <vector>

#include "intertwine/field.hpp"

namespace itw {

// Fourth-order finite differences for derivative orders 1..4.
//
// Interior points use the minimal-width central stencils (5 points for d1/d2,
// 7 points for d3/d4). The four points nearest each boundary use one-sided
// stencils of the same formal order built from Fornberg weights on
// (order + 4)-node windows anchored at the boundary. Those edge values are
// still less accurate in practice, so the result's unreliable_band is at
// least 4.
ComplexField differentiate(const ComplexField& f, int order);

// Same scheme on raw real samples with spacing h (used by families that need
// derivatives of tabulated shape functions).
std::vector<double> differentiate_samples(const std::vector<double>& y, double h, int order);

// Fornberg weights for the m-th derivative at point z from the given nodes.
std::vector<double> fornberg_weights(double z, const std::vector<double>& nodes, int m);

} // namespace itw
