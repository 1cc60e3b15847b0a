#include "fluxlim/profile.hpp"

#include <cmath>
#include <fstream>

#include "fluxlim/csv.hpp"

namespace fluxlim {

std::string to_string(VariableKind k) {
    switch (k) {
        case VariableKind::density_u: return "density_u";
        case VariableKind::mass_U: return "mass_U";
        case VariableKind::w_form: return "w_form";
    }
    return "?";
}

RadialProfile make_profile(GridPtr grid, VariableKind kind, double time_stamp,
                           std::vector<double> values) {
    if (!grid) throw input_error("make_profile: null grid");
    if (values.size() != grid->nodes.size()) {
        throw input_error("make_profile: value count does not match grid");
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw input_error("make_profile: non-finite value");
    }
    if (kind == VariableKind::mass_U) {
        if (values.front() != 0.0 || values.back() != 0.0) {
            throw input_error("make_profile: mass_U profile must vanish at rho=0 and rho=1");
        }
    }
    return RadialProfile{std::move(grid), std::move(values), kind, time_stamp};
}

double sphere_area(int N) {
    if (N < 2) throw input_error("sphere_area: N must be >= 2");
    // Gamma(N/2 + 1) through lgamma; relative error well below 1e-13 on half-integers.
    return N * std::pow(M_PI, 0.5 * N) * std::exp(-std::lgamma(0.5 * N + 1.0));
}

SphereGeometry make_sphere_geometry(int N) {
    SphereGeometry g;
    g.N = N;
    g.omega = sphere_area(N);
    g.ball_volume = g.omega / N;
    return g;
}

void write_profile_csv(const std::string& path, const RadialProfile& p) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path + " for writing");
    const char* coord = p.kind == VariableKind::w_form ? "s" : "rho";
    out << "# variable_kind=" << to_string(p.kind)
        << " time_stamp=" << csv::num(p.time_stamp) << "\n";
    out << coord << ",value\n";
    const bool as_s = p.kind == VariableKind::w_form && p.dimension >= 2;
    const auto& x = p.grid->nodes;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = as_s ? std::pow(x[i], 1.0 / p.dimension) : x[i];
        out << csv::num(c) << "," << csv::num(p.values[i]) << "\n";
    }
}

} // namespace fluxlim
