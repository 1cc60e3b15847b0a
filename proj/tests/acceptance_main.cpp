// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Tolerances are pinned here, not configurable.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "fluxlim/harness.hpp"
#include "fluxlim/solver.hpp"
#include "fluxlim/transforms.hpp"

using namespace fluxlim;

namespace {

int failures = 0;

void line(int k, bool pass, const char* fmt, ...) {
    if (!pass) ++failures;
    std::printf("criterion %d: %s — ", k, pass ? "PASS" : "FAIL");
    va_list args;
    va_start(args, fmt);
    std::vprintf(fmt, args);
    va_end(args);
    std::printf("\n");
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ModelParams reference_model() {
    ModelParams mp;
    mp.N = 3;
    mp.p = 1.6;
    mp.M = 8.0;
    mp.chi = 60.0 * std::pow(3.0, 1.6); // chi_N = 60
    return mp;
}

} // namespace

int main() {
    const auto mp = reference_model();
    const auto dp = derive(mp, 1.2);
    std::printf("parameters: N=3 p=1.6 M=8 chi_N=60 gamma=1.2 -> epsilon=%.6f T_max=%.6f\n",
                dp.epsilon, dp.T_max);

    // ---- criterion 1: blow-up reproduction at n = 2048 -----------------------
    RunResult run1;
    GridPtr grid1;
    {
        const auto t0 = std::chrono::steady_clock::now();
        grid1 = build_grid_ptr(2048, 3.0);
        const auto U0 = make_admissible_initial(dp, grid1, InitialMode::mollified);
        SolverConfig cfg; // u_cap = 1e6 * M, tol_step = 1e-6
        const Subsolution sub(dp);
        RunHooks hooks;
        hooks.snapshot_every = 100;
        hooks.compare = &sub;
        run1 = run(U0, cfg, dp, 1.2 * dp.T_max, hooks);
        const double wall = seconds_since(t0);

        const bool blew = run1.outcome == OutcomeKind::BlewUp;
        const bool timely = blew && run1.t_final <= 1.05 * dp.T_max;
        const double cap_sens =
            std::abs(run1.t_cross_cap - run1.t_cross_cap10) / run1.t_cross_cap;
        const bool sens_ok = blew && std::isfinite(cap_sens) && cap_sens < 0.02;
        line(1, timely && sens_ok && wall <= 60.0,
             "outcome=%s t_blow=%.6f (bound %.6f), t_blow_original=%.6f, "
             "cap_sensitivity=%.3e (<0.02), wall=%.1fs (<=60)",
             to_string(run1.outcome).c_str(), run1.t_final, 1.05 * dp.T_max,
             run1.t_final_original, cap_sens, wall);
    }

    // ---- criterion 2: subsolution certificate --------------------------------
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto cert = certify(dp, 10000, 5, 1e-9);
        const double wall = seconds_since(t0);
        const double worst = std::max(cert.worst_L1, cert.worst_L2);
        const bool ok = worst <= 1e-9 && cert.c1_matching_error <= 1e-10 &&
                        cert.jump_rho2_rel_error <= 1e-10 &&
                        cert.jump_at_rho1_min >= -1e-10 &&
                        cert.jump_rho1_closed_form_error <= 1e-10 && wall <= 1.0;
        line(2, ok,
             "max L(phi)=%.3e (<=1e-9), c1_matching=%.3e (<=1e-10), "
             "rho2 jump rel err=%.3e (<=1e-10), rho1 jump min=%.3e (>=0), wall=%.2fs (<=1)",
             worst, cert.c1_matching_error, cert.jump_rho2_rel_error,
             cert.jump_at_rho1_min, wall);
    }

    // ---- criterion 3: comparison principle on run 1 ---------------------------
    {
        const double tol = 10.0 * (grid1->max_spacing() + 1e-6);
        bool ok = false;
        double min_margin = std::nan("");
        bool half_applicable = false, half_ok = true;
        try {
            const auto tr = compare_with_subsolution(run1, dp, tol);
            min_margin = *std::min_element(tr.min_margin.begin(), tr.min_margin.end());
            half_applicable = tr.half_mass_applicable;
            half_ok = tr.half_mass_pass;
            ok = tr.pass;
        } catch (const std::exception& e) {
            std::printf("  comparison raised: %s\n", e.what());
        }
        // per-step margins from the attached hook give a finer record
        double min_step_margin = 0.0;
        for (const auto& e : run1.series) {
            if (std::isfinite(e.margin)) min_step_margin = std::min(min_step_margin, e.margin);
        }
        ok = ok && min_step_margin >= -tol;
        line(3, ok,
             "min snapshot margin=%.3e, min per-step margin=%.3e (tol -%.3e); "
             "half-mass check %s%s",
             min_margin, min_step_margin, tol,
             half_applicable ? (half_ok ? "holds" : "VIOLATED")
                             : "vacuous (blow-up precedes its window)",
             "");
    }

    // ---- criterion 4: zero fixed point ---------------------------------------
    {
        auto g = build_grid_ptr(256, 2.0);
        const auto U0 = make_profile(g, VariableKind::mass_U, 0.0,
                                     std::vector<double>(g->nodes.size(), 0.0));
        SolverConfig cfg;
        const auto r = run(U0, cfg, dp, 2.0 * dp.T_max);
        double worst = 0.0;
        for (const auto& e : r.series) worst = std::max(worst, e.sup_U);
        line(4, r.outcome == OutcomeKind::HorizonReached && worst <= 1e-12,
             "sup|U| over [0, 2 T_max] = %.3e (<=1e-12), outcome=%s", worst,
             to_string(r.outcome).c_str());
    }

    // ---- criterion 5: Hardy property suite ------------------------------------
    {
        const auto g = build_grid(256, 1.0);
        const auto batch = hardy_batch(g, {0.25, 0.5, 1.5, 2.0}, 1000, 20240817);
        const bool batch_ok = batch.rejected == 0 && batch.passes == batch.cases;

        const auto g2 = build_grid(512, 2.0);
        std::vector<double> u(g2.nodes.size());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1.0 - g2.nodes[i];
        const double lhs = weighted_l2_pw_linear(g2, u, -0.5);
        const double rhs_i = weighted_h1_pw_linear(g2, u, 1.5);
        const double bound = 16.0 * rhs_i;
        const bool exact_ok =
            std::abs(lhs - 16.0 / 15.0) <= 1e-6 && std::abs(bound - 6.4) <= 1e-6;
        line(5, batch_ok && exact_ok,
             "%ld/%ld random cases pass; closed form lhs=%.9f (16/15=%.9f), bound=%.9f (6.4)",
             batch.passes, batch.cases, lhs, 16.0 / 15.0, bound);
    }

    // ---- criterion 6: discrete/analytic consistency ----------------------------
    {
        const Subsolution sub(dp);
        std::vector<double> errs;
        for (int n : {256, 512, 1024}) {
            auto g = build_grid_ptr(n, 3.0);
            std::vector<double> v(g->nodes.size());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = sub.phi(0.0, g->nodes[i]);
            const auto out = rhs(make_profile(g, VariableKind::mass_U, 0.0, v), dp, *g);
            double e = 0.0;
            for (std::size_t i = 1; i + 1 < v.size(); ++i) {
                const double r = g->nodes[i];
                if (r < 0.02 || r > 0.98) continue;
                if (std::abs(r - dp.rho1) < 0.02 || std::abs(r - dp.rho2) < 0.02) continue;
                const double phit =
                    r <= dp.rho1 ? sub.phi1_t(0.0, r) : sub.phi2_t(0.0, r);
                e = std::max(e, std::abs(out[i] - (phit - sub.L_eval(0.0, r))));
            }
            errs.push_back(e);
        }
        const double r1 = errs[0] / errs[1];
        const double r2 = errs[1] / errs[2];
        const bool ok = r1 >= 3.6 && r1 <= 4.4 && r2 >= 3.6 && r2 <= 4.4;
        line(6, ok,
             "errors %.3e / %.3e / %.3e at n=256/512/1024; ratios %.3f, %.3f (in [3.6,4.4])",
             errs[0], errs[1], errs[2], r1, r2);
    }

    // ---- criterion 7: self-convergence on smooth data --------------------------
    {
        SolverConfig cfg;
        cfg.tol_step = 1e-9;
        const auto rep = self_convergence([](double r) { return r * (1.0 - r); }, dp,
                                          {128, 256, 512}, 3.0, 1e-3, cfg);
        line(7, !rep.exact && rep.observed_order >= 1.8,
             "observed order %.3f (>=1.8) from diffs %.3e, %.3e", rep.observed_order,
             rep.diffs[0], rep.diffs[1]);
    }

    // ---- criterion 8: constant checks ------------------------------------------
    {
        const bool q_ok = q_of_gamma(1.0) == 15.0 / 32.0;
        const bool rho2_ok = rho2_of_gamma(1.0) == 0.75;
        bool theta_ok = true;
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> uni(1.0 + 1e-12, 2.0 - 1e-12);
        for (int i = 0; i < 100; ++i) {
            const double p = uni(rng);
            const double theta = (3.0 - p) / 2.0;
            theta_ok = theta_ok && theta > 2.0 - p;
        }
        const bool sphere_ok =
            std::abs(sphere_area(3) - 4.0 * M_PI) <= 1e-12 * 4.0 * M_PI;
        line(8, q_ok && rho2_ok && theta_ok && sphere_ok,
             "q(1)=%.17g (15/32 exactly: %s), rho2(1)=%.17g, theta>2-p on 100 draws: %s, "
             "sphere_area(3)-4pi=%.2e",
             q_of_gamma(1.0), q_ok ? "yes" : "no", rho2_of_gamma(1.0),
             theta_ok ? "yes" : "no", sphere_area(3) - 4.0 * M_PI);
    }

    // ---- criterion 9: stability probe -------------------------------------------
    {
        auto g = build_grid_ptr(512, 3.0);
        const auto U0 = make_admissible_initial(dp, g, InitialMode::mollified);
        SolverConfig cfg;
        cfg.u_cap = 1e4; // far above the 100 M comparison window
        const auto pilot = run(U0, cfg, dp, 1.2 * dp.T_max);
        StabilityReport rep;
        if (pilot.outcome == OutcomeKind::BlewUp) {
            rep = stability_probe(U0, 1e-8, cfg, dp, pilot.t_final, 40);
        }
        line(9, rep.pass && rep.times.size() >= 10,
             "max divergence %.3e (<=1e-4) over %zu comparison times below sup_u=100M",
             rep.max_divergence, rep.times.size());
    }

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ALL PASS" : "RESULT",
                failures);
    return failures;
}
