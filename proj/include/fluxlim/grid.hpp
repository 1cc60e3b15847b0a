#pragma once

#include <memory>
#include <vector>

#include "fluxlim/errors.hpp"

namespace fluxlim {

// Nonuniform node set on [0,1], graded toward both endpoints where the
// equation's coefficients degenerate. Nodes come from the symmetric map
// rho(xi) = xi^c / (xi^c + (1-xi)^c) on the uniform xi_i = i/n.
struct Grid {
    std::vector<double> nodes; // strictly increasing, nodes.front()=0, nodes.back()=1
    double clustering_exponent = 1.0;

    int n() const { return static_cast<int>(nodes.size()) - 1; }
    double max_spacing() const;
    double min_spacing() const;
};

Grid build_grid(int n, double clustering_exponent); // config_error if n < 16 or c < 1

using GridPtr = std::shared_ptr<const Grid>;
GridPtr build_grid_ptr(int n, double clustering_exponent);

// Three-point first/second derivative weights at the interior nodes,
// exact on quadratics for arbitrary spacing.
struct StencilWeights {
    std::vector<double> d1m, d10, d1p; // first derivative, node i uses (i-1, i, i+1)
    std::vector<double> d2m, d20, d2p; // second derivative
};

StencilWeights stencil_weights(const Grid& g);

// Nodal derivative of a sampled function: centered three-point in the
// interior, second-order one-sided at the endpoints.
std::vector<double> nodal_derivative(const Grid& g, const std::vector<double>& values);

} // namespace fluxlim
