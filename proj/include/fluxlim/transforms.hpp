#pragma once

#include "fluxlim/params.hpp"
#include "fluxlim/profile.hpp"

namespace fluxlim {

// Rescaled mass accumulation from a density sample:
//   U~(rho) = N * int_0^(rho^(1/N)) (u0(r) - M) r^(N-1) dr
//           = int_0^rho (u0(s^(1/N)) - M) ds,
// evaluated by composite trapezoid on the grid; endpoint values forced to 0.
// Rejects data whose ball mean differs from M beyond mass_tol (mass_tol <= 0
// picks 10 * h_max^2 * max(1,|M|), the quadrature's own accuracy scale).
RadialProfile mass_accum_from_density(const RadialProfile& u0, const ModelParams& mp,
                                      const SphereGeometry& geom, double mass_tol = -1.0);

struct DensityResult {
    RadialProfile profile;
    bool negative_flagged = false; // some node went below zero (discretization failure)
    double min_value = 0.0;
};

// u(rho^(1/N)) = U~_rho + M, centered differences with one-sided endpoints.
DensityResult density_from_mass(const RadialProfile& U, const ModelParams& mp);

// W(s) = s^(-N) U~(s^N) on s_i = rho_i^(1/N); the s -> 0 hole is filled with
// the one-sided slope U~_rho(0), the regular limit of U~(rho)/rho.
RadialProfile w_from_mass(const RadialProfile& U, int N);
RadialProfile mass_from_w(const RadialProfile& W);

// dv/drho = -rho^((2-2N)/N) U~(rho) / N^2. The rho=0 entry stores the finite
// limiting coefficient -U~_rho(0)/N^2 (the pointwise value degenerates there).
RadialProfile v_gradient(const RadialProfile& U, const SphereGeometry& geom);

enum class InitialMode { exact, mollified, inflated };

// Admissible initial mass profile, U0 >= phi(0,.) node-wise:
//   exact:     phi(0,.) sampled, gradient kinks retained
//   mollified: cubic-Hermite blend over +-2h windows at rho1 and rho2, lifted
//              pointwise back above phi(0,.)
//   inflated:  inflation * phi(0,.), inflation > 1
// Fails if the implied density u0 = U0_rho + M dips below zero.
RadialProfile make_admissible_initial(const DerivedParams& dp, GridPtr grid,
                                      InitialMode mode, double inflation = 1.1);

} // namespace fluxlim
