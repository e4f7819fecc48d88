#pragma once

#include <vector>

namespace flywheel {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule with `points` nodes; exact for polynomials of degree 2*points - 1.
GaussRule gauss_legendre(int points);

} // namespace flywheel
