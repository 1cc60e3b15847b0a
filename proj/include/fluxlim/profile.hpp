#pragma once

#include <string>
#include <vector>

#include "fluxlim/grid.hpp"

namespace fluxlim {

enum class VariableKind { density_u, mass_U, w_form };

std::string to_string(VariableKind k);

// A sampled radial function on the mass coordinate rho in [0,1]. Immutable by
// convention after construction; safe to share read-only across threads.
//   density_u: values are u(rho_i^(1/N)) (the physical density at radius rho^(1/N))
//   mass_U:    rescaled mass accumulation; zero at both endpoints
//   w_form:    W(s_i) with s_i = rho_i^(1/N)
struct RadialProfile {
    GridPtr grid;
    std::vector<double> values;
    VariableKind kind = VariableKind::mass_U;
    double time_stamp = 0.0;
    int dimension = 0; // N, set on w_form profiles so s = rho^(1/N) can be reported
};

// Validates finiteness (always) and the endpoint zeros for mass_U profiles.
RadialProfile make_profile(GridPtr grid, VariableKind kind, double time_stamp,
                           std::vector<double> values);

// Surface content of the unit sphere S^(N-1) and the enclosed ball volume.
struct SphereGeometry {
    int N = 3;
    double omega = 0.0;       // N pi^(N/2) / Gamma(N/2 + 1)
    double ball_volume = 0.0; // omega / N
};

double sphere_area(int N); // N >= 2
SphereGeometry make_sphere_geometry(int N);

// CSV with a comment header carrying the kind and time stamp, then
// rho,value (s,value for w_form profiles) rows.
void write_profile_csv(const std::string& path, const RadialProfile& p);

} // namespace fluxlim
