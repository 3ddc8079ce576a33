#pragma once

#include <vector>

namespace cmcglue {

struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [lo, hi].
QuadratureRule gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

// Composite rule: `pieces` equal subintervals with n nodes each.
QuadratureRule composite_gauss_legendre(int n, int pieces, double lo, double hi);

} // namespace cmcglue
