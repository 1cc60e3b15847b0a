#include "fluxlim/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluxlim/subsolution.hpp"

namespace fluxlim {

RadialProfile mass_accum_from_density(const RadialProfile& u0, const ModelParams& mp,
                                      const SphereGeometry& geom, double mass_tol) {
    if (u0.kind != VariableKind::density_u) {
        throw input_error("mass_accum_from_density: expected a density_u profile");
    }
    if (geom.N != mp.N) throw input_error("mass_accum_from_density: geometry/model N mismatch");
    const auto& x = u0.grid->nodes;
    const std::size_t m = x.size();
    // In the mass coordinate the integrand is just u0 - M.
    std::vector<double> U(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
        const double h = x[i] - x[i - 1];
        U[i] = U[i - 1] + 0.5 * h * ((u0.values[i - 1] - mp.M) + (u0.values[i] - mp.M));
    }
    if (mass_tol <= 0.0) {
        const double h = u0.grid->max_spacing();
        mass_tol = 10.0 * h * h * std::max(1.0, std::abs(mp.M));
    }
    if (std::abs(U.back()) > mass_tol) {
        std::ostringstream os;
        os << "mass_accum_from_density: ball mean of u0 differs from M (residual "
           << U.back() << ", tol " << mass_tol << ")";
        throw input_error(os.str());
    }
    U.front() = 0.0;
    U.back() = 0.0;
    return make_profile(u0.grid, VariableKind::mass_U, u0.time_stamp, std::move(U));
}

DensityResult density_from_mass(const RadialProfile& U, const ModelParams& mp) {
    if (U.kind != VariableKind::mass_U) {
        throw input_error("density_from_mass: expected a mass_U profile");
    }
    auto d = nodal_derivative(*U.grid, U.values);
    for (double& v : d) v += mp.M;
    DensityResult res;
    res.min_value = *std::min_element(d.begin(), d.end());
    res.negative_flagged = res.min_value < 0.0;
    res.profile = RadialProfile{U.grid, std::move(d), VariableKind::density_u, U.time_stamp};
    return res;
}

RadialProfile w_from_mass(const RadialProfile& U, int N) {
    if (U.kind != VariableKind::mass_U) {
        throw input_error("w_from_mass: expected a mass_U profile");
    }
    if (N < 2) throw input_error("w_from_mass: N must be >= 2");
    const auto& x = U.grid->nodes;
    std::vector<double> w(x.size());
    // U~(rho) ~ U~_rho(0) rho near 0, so W(0) is the one-sided slope.
    w[0] = (U.values[1] - U.values[0]) / (x[1] - x[0]);
    for (std::size_t i = 1; i < x.size(); ++i) w[i] = U.values[i] / x[i];
    RadialProfile p{U.grid, std::move(w), VariableKind::w_form, U.time_stamp, N};
    return p;
}

RadialProfile mass_from_w(const RadialProfile& W) {
    if (W.kind != VariableKind::w_form) {
        throw input_error("mass_from_w: expected a w_form profile");
    }
    const auto& x = W.grid->nodes;
    std::vector<double> U(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) U[i] = x[i] * W.values[i];
    U.front() = 0.0;
    return make_profile(W.grid, VariableKind::mass_U, W.time_stamp, std::move(U));
}

RadialProfile v_gradient(const RadialProfile& U, const SphereGeometry& geom) {
    if (U.kind != VariableKind::mass_U) {
        throw input_error("v_gradient: expected a mass_U profile");
    }
    const double N = geom.N;
    const auto& x = U.grid->nodes;
    std::vector<double> g(x.size());
    // dv/drho = -rho^((2-2N)/N) U~ / N^2; at rho=0 store the limiting
    // coefficient -U~_rho(0)/N^2 of the rho^((2-N)/N) profile.
    g[0] = -((U.values[1] - U.values[0]) / (x[1] - x[0])) / (N * N);
    for (std::size_t i = 1; i < x.size(); ++i) {
        g[i] = -std::pow(x[i], (2.0 - 2.0 * N) / N) * U.values[i] / (N * N);
    }
    return RadialProfile{U.grid, std::move(g), VariableKind::density_u, U.time_stamp};
}

namespace {

// Cubic Hermite on [xl, xr] from endpoint values/slopes.
double hermite(double x, double xl, double xr, double fl, double fr, double sl, double sr) {
    const double h = xr - xl;
    const double u = (x - xl) / h;
    const double u2 = u * u, u3 = u2 * u;
    return fl * (2 * u3 - 3 * u2 + 1) + h * sl * (u3 - 2 * u2 + u) +
           fr * (-2 * u3 + 3 * u2) + h * sr * (u3 - u2);
}

} // namespace

RadialProfile make_admissible_initial(const DerivedParams& dp, GridPtr grid,
                                      InitialMode mode, double inflation) {
    const Subsolution sub(dp);
    const auto& x = grid->nodes;
    const std::size_t m = x.size();
    std::vector<double> phi0(m);
    for (std::size_t i = 0; i < m; ++i) phi0[i] = sub.phi(0.0, x[i]);

    std::vector<double> U0 = phi0;
    if (mode == InitialMode::inflated) {
        if (!(inflation > 1.0)) {
            throw input_error("make_admissible_initial: inflation must exceed 1");
        }
        for (double& v : U0) v *= inflation;
    } else if (mode == InitialMode::mollified) {
        for (double kink : {dp.rho1, dp.rho2}) {
            // window half-width 2h from the local spacing, kept clear of the
            // neighbouring kink and of the endpoints
            std::size_t k = std::upper_bound(x.begin(), x.end(), kink) - x.begin();
            k = std::min(std::max<std::size_t>(k, 2), m - 3);
            const double h = std::max(x[k] - x[k - 1], x[k + 1] - x[k]);
            const double half = std::min(2.0 * h, (dp.rho2 - dp.rho1) / 3.0);
            const double xl = std::max(kink - half, x[1]);
            const double xr = std::min(kink + half, x[m - 2]);
            const double fl = sub.phi(0.0, xl), fr = sub.phi(0.0, xr);
            const double sl = xl <= dp.rho1 ? sub.phi1_rho(0.0, xl)
                                            : sub.phi2_rho(0.0, xl, Subsolution::Side::left);
            const double sr = sub.phi2_rho(0.0, xr, Subsolution::Side::right);
            for (std::size_t i = 0; i < m; ++i) {
                if (x[i] > xl && x[i] < xr) {
                    U0[i] = hermite(x[i], xl, xr, fl, fr, sl, sr);
                }
            }
        }
        // lift any Hermite undershoot back above phi(0,.)
        for (std::size_t i = 0; i < m; ++i) U0[i] += std::max(0.0, phi0[i] - U0[i]);
    }
    U0.front() = 0.0;
    U0.back() = 0.0;

    auto prof = make_profile(grid, VariableKind::mass_U, 0.0, std::move(U0));
    const auto dens = density_from_mass(prof, dp.model);
    if (dens.negative_flagged) {
        std::ostringstream os;
        os << "make_admissible_initial: implied density dips to " << dens.min_value
           << " < 0";
        throw input_error(os.str());
    }
    return prof;
}

} // namespace fluxlim
