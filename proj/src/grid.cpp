#include "fluxlim/grid.hpp"

#include <cmath>
#include <sstream>

namespace fluxlim {

double Grid::max_spacing() const {
    double h = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) h = std::max(h, nodes[i] - nodes[i - 1]);
    return h;
}

double Grid::min_spacing() const {
    double h = nodes.back();
    for (std::size_t i = 1; i < nodes.size(); ++i) h = std::min(h, nodes[i] - nodes[i - 1]);
    return h;
}

Grid build_grid(int n, double clustering_exponent) {
    if (n < 16) {
        std::ostringstream os;
        os << "build_grid: n=" << n << " too small (need n >= 16)";
        throw config_error(os.str());
    }
    if (!(clustering_exponent >= 1.0) || !std::isfinite(clustering_exponent)) {
        throw config_error("build_grid: clustering_exponent must be >= 1");
    }
    Grid g;
    g.clustering_exponent = clustering_exponent;
    g.nodes.resize(n + 1);
    const double c = clustering_exponent;
    for (int i = 0; i <= n; ++i) {
        const double xi = double(i) / n;
        const double a = std::pow(xi, c);
        const double b = std::pow(1.0 - xi, c);
        g.nodes[i] = a / (a + b);
    }
    g.nodes[0] = 0.0;
    g.nodes[n] = 1.0;
    return g;
}

GridPtr build_grid_ptr(int n, double clustering_exponent) {
    return std::make_shared<const Grid>(build_grid(n, clustering_exponent));
}

StencilWeights stencil_weights(const Grid& g) {
    const int n = g.n();
    StencilWeights w;
    w.d1m.resize(n - 1);
    w.d10.resize(n - 1);
    w.d1p.resize(n - 1);
    w.d2m.resize(n - 1);
    w.d20.resize(n - 1);
    w.d2p.resize(n - 1);
    for (int i = 1; i < n; ++i) {
        const double hm = g.nodes[i] - g.nodes[i - 1];
        const double hp = g.nodes[i + 1] - g.nodes[i];
        const double s = hm + hp;
        const int k = i - 1;
        w.d1m[k] = -hp / (hm * s);
        w.d10[k] = (hp - hm) / (hm * hp);
        w.d1p[k] = hm / (hp * s);
        w.d2m[k] = 2.0 / (hm * s);
        w.d20[k] = -2.0 / (hm * hp);
        w.d2p[k] = 2.0 / (hp * s);
    }
    return w;
}

std::vector<double> nodal_derivative(const Grid& g, const std::vector<double>& values) {
    const int n = g.n();
    std::vector<double> d(n + 1);
    const auto& x = g.nodes;
    // second-order one-sided formulas at the endpoints
    {
        const double h0 = x[1] - x[0], h1 = x[2] - x[1];
        d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * values[0] +
               (h0 + h1) / (h0 * h1) * values[1] - h0 / (h1 * (h0 + h1)) * values[2];
        const double hm = x[n - 1] - x[n - 2], hn = x[n] - x[n - 1];
        d[n] = hn / (hm * (hm + hn)) * values[n - 2] -
               (hm + hn) / (hm * hn) * values[n - 1] +
               (2.0 * hn + hm) / (hn * (hm + hn)) * values[n];
    }
    for (int i = 1; i < n; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        const double s = hm + hp;
        d[i] = -hp / (hm * s) * values[i - 1] + (hp - hm) / (hm * hp) * values[i] +
               hm / (hp * s) * values[i + 1];
    }
    return d;
}

} // namespace fluxlim
