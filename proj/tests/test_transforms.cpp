#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "fluxlim/subsolution.hpp"
#include "fluxlim/transforms.hpp"

using namespace fluxlim;

namespace {

ModelParams reference_model() {
    ModelParams mp;
    mp.N = 3;
    mp.p = 1.6;
    mp.M = 8.0;
    mp.chi = 60.0 * std::pow(3.0, 1.6);
    return mp;
}

RadialProfile sample_density(GridPtr g, const ModelParams& mp,
                             const std::function<double(double)>& u_of_r) {
    std::vector<double> v(g->nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = u_of_r(std::pow(g->nodes[i], 1.0 / mp.N));
    }
    return RadialProfile{std::move(g), std::move(v), VariableKind::density_u, 0.0};
}

} // namespace

TEST_CASE("sphere_area closed values") {
    CHECK(std::abs(sphere_area(3) - 4.0 * M_PI) < 1e-12 * 4.0 * M_PI);
    CHECK(sphere_area(4) == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-13));
    CHECK(sphere_area(2) == doctest::Approx(2.0 * M_PI).epsilon(1e-13));
    CHECK_THROWS_AS(sphere_area(1), input_error);
}

TEST_CASE("lgamma against half-integer closed forms") {
    // Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)
    double fact2n = 1.0, fact_n = 1.0, pow4 = 1.0;
    for (int n = 0; n <= 8; ++n) {
        if (n > 0) {
            fact_n *= n;
            fact2n *= (2 * n - 1) * (2 * n);
            pow4 *= 4.0;
        }
        const double exact = fact2n * std::sqrt(M_PI) / (pow4 * fact_n);
        const double got = std::exp(std::lgamma(n + 0.5));
        CHECK(std::abs(got - exact) <= 1e-13 * exact);
    }
}

TEST_CASE("mass accumulation of the constant density vanishes") {
    const auto mp = reference_model();
    const auto geom = make_sphere_geometry(mp.N);
    auto u0 = sample_density(build_grid_ptr(128, 2.0), mp, [&](double) { return mp.M; });
    const auto U = mass_accum_from_density(u0, mp, geom);
    for (double v : U.values) CHECK(v == 0.0);
}

TEST_CASE("mass accumulation rejects data whose mean is off M") {
    const auto mp = reference_model();
    const auto geom = make_sphere_geometry(mp.N);
    // the 1 - r^2 perturbation carries net mass, so the ball mean is not M
    auto u0 = sample_density(build_grid_ptr(128, 2.0), mp,
                             [&](double r) { return mp.M + 3.0 * (1.0 - r * r); });
    CHECK_THROWS_AS((void)mass_accum_from_density(u0, mp, geom), input_error);
}

TEST_CASE("density -> mass -> density round trip is O(h^2)") {
    const auto mp = reference_model();
    const auto geom = make_sphere_geometry(mp.N);
    // zero-mean smooth perturbation in the mass coordinate (integral of
    // cos(pi rho) over [0,1] vanishes); nonpolynomial so the second-order
    // quadrature/stencil error is actually visible
    auto u_of_rho = [&](double rho) { return mp.M + 2.0 * std::cos(M_PI * rho); };

    double prev_err = 0.0;
    for (int n : {128, 256}) {
        auto g = build_grid_ptr(n, 2.0);
        std::vector<double> v(g->nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = u_of_rho(g->nodes[i]);
        RadialProfile u0{g, v, VariableKind::density_u, 0.0};
        const auto U = mass_accum_from_density(u0, mp, geom);
        const auto back = density_from_mass(U, mp);
        double err = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            err = std::max(err, std::abs(back.profile.values[i] - v[i]));
        }
        if (n == 256) {
            // halving h divides the error by about 4
            CHECK(err < prev_err / 3.0);
        }
        prev_err = err;
        CHECK(err < 1e-2);
    }
}

TEST_CASE("density round trip on the subsolution-shaped data") {
    // density whose mass accumulation is phi(0,.): the density jumps at the
    // gradient kinks, so pointwise O(h^2) holds away from them while the
    // accumulated (mass-side) defect shrinks with h
    const auto mp = reference_model();
    const auto geom = make_sphere_geometry(mp.N);
    const auto dp = derive(mp, 1.2);
    double prev_du = 0.0, prev_dU = 0.0;
    for (int n : {256, 512}) {
        auto g = build_grid_ptr(n, 2.0);
        const auto U0 = make_admissible_initial(dp, g, InitialMode::exact);
        const auto u0 = density_from_mass(U0, mp);
        const auto U1 = mass_accum_from_density(u0.profile, mp, geom);
        const auto u1 = density_from_mass(U1, mp);
        const double h = g->max_spacing();
        double du = 0.0, dU = 0.0;
        for (std::size_t i = 0; i < U0.values.size(); ++i) {
            dU = std::max(dU, std::abs(U1.values[i] - U0.values[i]));
            const double r = g->nodes[i];
            // pointwise O(h^2) needs bounded derivatives: stay off the kinks,
            // off the rho^gamma curvature blow-up at 0, and off the endpoint
            // cell that absorbs the enforced U(1) = 0
            if (r < 0.02 || r > 0.98) continue;
            if (std::abs(r - dp.rho1) < 3 * h || std::abs(r - dp.rho2) < 3 * h) continue;
            du = std::max(du, std::abs(u1.profile.values[i] - u0.profile.values[i]));
        }
        CHECK(du < 60.0 * h * h);
        CHECK(dU < 0.5 * h);
        if (n == 512) {
            CHECK(du < prev_du / 3.0); // O(h^2) off the kinks
            CHECK(dU < prev_dU / 1.8);
        }
        prev_du = du;
        prev_dU = dU;
    }
}

TEST_CASE("density_from_mass closed cases") {
    const auto mp = reference_model();
    auto g = build_grid_ptr(64, 1.0);

    SUBCASE("zero mass gives the constant M") {
        std::vector<double> z(g->nodes.size(), 0.0);
        const auto U = make_profile(g, VariableKind::mass_U, 0.0, z);
        const auto d = density_from_mass(U, mp);
        for (double v : d.profile.values) CHECK(v == doctest::Approx(mp.M).epsilon(1e-15));
        CHECK_FALSE(d.negative_flagged);
    }
    SUBCASE("linear patch differentiates exactly") {
        // U = c rho on the interior patch: derivative c there to rounding
        std::vector<double> v(g->nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.25 * g->nodes[i];
        v.front() = 0.0;
        v.back() = 0.0; // kink at the last cell only
        RadialProfile U{g, v, VariableKind::mass_U, 0.0};
        const auto d = density_from_mass(U, mp);
        for (std::size_t i = 1; i + 2 < v.size(); ++i) {
            CHECK(d.profile.values[i] == doctest::Approx(mp.M + 0.25).epsilon(1e-13));
        }
    }
}

TEST_CASE("w transform: closed form, hole filling, round trip") {
    auto g = build_grid_ptr(96, 2.0);
    const int N = 3;

    SUBCASE("U = rho(1-rho) maps to W = 1 - s^N") {
        std::vector<double> v(g->nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = g->nodes[i] * (1.0 - g->nodes[i]);
        }
        const auto U = make_profile(g, VariableKind::mass_U, 0.0, v);
        const auto W = w_from_mass(U, N);
        for (std::size_t i = 1; i < v.size(); ++i) {
            // s^N = rho, so 1 - s^N = 1 - rho
            CHECK(W.values[i] == doctest::Approx(1.0 - g->nodes[i]).epsilon(1e-13));
        }
        // s -> 0 hole: one-sided U_rho(0), close to the true limit 1
        CHECK(W.values[0] == doctest::Approx(1.0).epsilon(1e-2));
    }
    SUBCASE("zero maps to zero") {
        std::vector<double> z(g->nodes.size(), 0.0);
        const auto W = w_from_mass(make_profile(g, VariableKind::mass_U, 0.0, z), N);
        for (double v : W.values) CHECK(v == 0.0);
    }
    SUBCASE("round trip is identity on interior nodes") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<double> v(g->nodes.size());
        for (auto& w : v) w = uni(rng);
        v.front() = 0.0;
        v.back() = 0.0;
        const auto U = make_profile(g, VariableKind::mass_U, 0.0, v);
        const auto back = mass_from_w(w_from_mass(U, N));
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(std::abs(back.values[i] - v[i]) <= 1e-12);
        }
    }
}

TEST_CASE("v_gradient sign and degenerate-origin coefficient") {
    const auto geom = make_sphere_geometry(3);
    auto g = build_grid_ptr(64, 1.0);

    SUBCASE("zero field") {
        std::vector<double> z(g->nodes.size(), 0.0);
        const auto vg = v_gradient(make_profile(g, VariableKind::mass_U, 0.0, z), geom);
        for (double v : vg.values) CHECK(v == 0.0);
    }
    SUBCASE("positive mass pulls the chemical gradient inward") {
        std::vector<double> v(g->nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = g->nodes[i] * (1.0 - g->nodes[i]);
        }
        const auto vg = v_gradient(make_profile(g, VariableKind::mass_U, 0.0, v), geom);
        for (std::size_t i = 1; i + 1 < v.size(); ++i) CHECK(vg.values[i] < 0.0);
    }
    SUBCASE("U ~ c rho near 0 stores the limit coefficient -c/N^2") {
        const double c = 0.7;
        std::vector<double> v(g->nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = c * g->nodes[i] * (1.0 - g->nodes[i]);
        }
        const auto vg = v_gradient(make_profile(g, VariableKind::mass_U, 0.0, v), geom);
        CHECK(vg.values[0] == doctest::Approx(-c / 9.0).epsilon(0.05));
    }
}

TEST_CASE("admissible initial data in all three modes") {
    const auto dp = derive(reference_model(), 1.2);
    auto g = build_grid_ptr(256, 2.0);
    const Subsolution sub(dp);

    for (auto mode : {InitialMode::exact, InitialMode::mollified, InitialMode::inflated}) {
        const auto U0 = make_admissible_initial(dp, g, mode);
        double min_gap = 1e300;
        for (std::size_t i = 0; i < g->nodes.size(); ++i) {
            min_gap = std::min(min_gap, U0.values[i] - sub.phi(0.0, g->nodes[i]));
        }
        CHECK(min_gap >= 0.0); // the defining property
        CHECK(U0.values.front() == 0.0);
        CHECK(U0.values.back() == 0.0);
        const auto dens = density_from_mass(U0, dp.model);
        CHECK(dens.min_value >= 0.0);
    }
}

TEST_CASE("exact initial data hits phi1(0, rho1) = 2^-gamma/(2^-gamma + 1)") {
    const auto dp = derive(reference_model(), 1.2);
    // put a node exactly on rho1 = 1/2: even n, uniform grid
    auto g = build_grid_ptr(64, 1.0);
    const auto U0 = make_admissible_initial(dp, g, InitialMode::exact);
    const double expected = std::pow(2.0, -dp.gamma) / (std::pow(2.0, -dp.gamma) + 1.0);
    CHECK(U0.values[32] == doctest::Approx(expected).epsilon(1e-14));
    // hypothetical gamma = 1 value of the same formula is 1/3
    CHECK(0.5 / 1.5 == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("total initial mass exceeds 8 pi exactly when M > 6 (N = 3)") {
    const auto geom = make_sphere_geometry(3);
    // integral of u0 over the ball is M * omega / N
    CHECK(8.0 * geom.omega / 3.0 > 8.0 * M_PI);
    CHECK(6.0 * geom.omega / 3.0 == doctest::Approx(8.0 * M_PI).epsilon(1e-14));
}

TEST_CASE("inflated mode rejects inflation pushing density negative") {
    const auto dp = derive(reference_model(), 1.2);
    auto g = build_grid_ptr(128, 2.0);
    // steepest phi slope is -beta(1+kappa) > -M; inflating by M/(beta(1+kappa))
    // margin breaks positivity
    CHECK_THROWS_AS(
        (void)make_admissible_initial(dp, g, InitialMode::inflated, 6.0),
        input_error);
}
