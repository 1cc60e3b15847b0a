#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxlim/solver.hpp"
#include "fluxlim/subsolution.hpp"

namespace fluxlim {

// --- weighted quadrature --------------------------------------------------
// Integrals against power weights rho^w over the grid, with the sampled
// function taken as its piecewise-linear interpolant and every cell reduced
// to closed-form power moments. Exact for piecewise-linear data, and the
// only way the singular weights near rho=0 integrate to the required
// accuracy. Needs values[0] = 0 whenever w <= -1 (else the integral diverges).
double weighted_l2_pw_linear(const Grid& g, const std::vector<double>& values, double w);
// Same weight against the squared cellwise-constant derivative.
double weighted_h1_pw_linear(const Grid& g, const std::vector<double>& values, double w);

// --- comparison with the subsolution ---------------------------------------
struct ComparisonTrace {
    std::vector<double> times;
    std::vector<double> min_margin; // per-time min over interior nodes of U - phi
    bool interpolated = false;      // profile grid differed; linear interpolation used
    std::optional<std::array<double, 3>> first_violation; // (t, rho, value)
    double tol = 0.0;
    bool pass = false;
    // U(t, a(t)^(1/gamma)) >= 1/2 - tol whenever a(t)^(1/gamma) <= rho1
    bool half_mass_applicable = false;
    double half_mass_min = 0.0;
    bool half_mass_pass = true;
};

// Margins over the run's snapshots before blow-up. Preconditions: dp passes
// its thresholds and the t=0 snapshot dominates phi(0,.) node-wise. When
// eval_grid differs from the run's grid the snapshots are linearly
// interpolated onto it and the trace is flagged.
ComparisonTrace compare_with_subsolution(const RunResult& run, const DerivedParams& dp,
                                         double tol, GridPtr eval_grid = nullptr);

void write_comparison_csv(const std::string& path, const ComparisonTrace& tr);

// --- stability probe --------------------------------------------------------
struct StabilityReport {
    std::vector<double> times;
    std::vector<double> divergence; // sup-norm difference of the two runs
    double max_divergence = 0.0;
    double threshold = 0.0; // 1e4 * perturbation_scale
    double stop_sup_u = 0.0; // comparison stops once sup_u exceeds this (100 M)
    bool inconclusive = false; // a run stalled
    bool pass = false;
};

// Integrates U0 and U0*(1+perturbation_scale) on identical grids/config and
// reports their sup-norm separation at shared forced times while
// sup_u <= 100 M. A continuous-dependence proxy for uniqueness.
StabilityReport stability_probe(const RadialProfile& U0, double perturbation_scale,
                                const SolverConfig& cfg, const DerivedParams& dp,
                                double horizon, int compare_points = 40);

// --- weighted Hardy inequality ----------------------------------------------
struct HardyCheck {
    double delta = 0.0;
    double lhs = 0.0;      // int rho^(-delta) u^2
    double rhs = 0.0;      // int rho^(2-delta) u_rho^2
    double constant = 0.0; // 4/(1-delta)^2
    bool pass = false;
};

// u must vanish at rho=1 and satisfy the rho->0 decay rho^(1-delta) u^2 -> 0
// (checked on the first nodes; for delta>1 this forces u(0)=0). delta must
// avoid 1, and stay below 3 for the discrete check to be meaningful.
HardyCheck hardy_check(const RadialProfile& u, double delta, double quad_tol = 1e-12);

struct HardyCaseRow {
    long case_index = 0;
    double delta = 0.0, lhs = 0.0, rhs = 0.0, bound = 0.0;
    bool pass = false;
    bool rejected = false; // precondition failed (counted, not a failure)
};

struct HardyBatchResult {
    long cases = 0, passes = 0, rejected = 0;
    std::vector<HardyCaseRow> rows;
    bool all_pass() const { return passes + rejected == cases; }
};

// Random piecewise-linear admissible test functions, per-case seeded so the
// result is independent of thread count.
HardyBatchResult hardy_batch(const Grid& grid, const std::vector<double>& deltas,
                             int cases_per_delta, std::uint64_t seed);
HardyBatchResult hardy_batch_reference(const Grid& grid, const std::vector<double>& deltas,
                                       int cases_per_delta, std::uint64_t seed);

// --- mean-value lower bound --------------------------------------------------
struct MvtCheck {
    double xi = 0.0;
    double k0 = 0.0;
    bool pass = false;
};

// Solves y^(p-1) - x^(p-1) = (p-1) xi^(p-2) (y-x) for xi and checks
// xi >= k0 y with k0 = ((p-1)(1-k))^(1/(2-p)).
// Preconditions: 0 <= x < k y, y > 0, k in (0,1), p in (1,2).
MvtCheck mvt_bound_check(double x, double y, double k, double p);

// --- run summary --------------------------------------------------------------
struct Summary {
    OutcomeKind outcome = OutcomeKind::Stalled;
    double t_blow = 0.0;          // rescaled units (NaN unless BlewUp)
    double t_blow_original = 0.0; // t_blow / N^2
    double T_max = 0.0;
    bool theorem_check_pass = false; // BlewUp with t_blow <= T_max
    bool inconclusive = false;       // Stalled
    double cap_sensitivity = 0.0;    // |t_cap - t_cap10| / t_cap
    bool cert_attached = false;
    bool cert_pass = false;
    double worst_L = 0.0;
    double chi_margin = 0.0; // chi_N / threshold - 1
    bool chi_margin_small = false;
    bool comparison_attached = false;
    bool comparison_pass = false;
    double min_margin = 0.0;
    double tol = 0.0;
    std::vector<std::pair<std::string, std::string>> files; // label -> path
};

Summary report(const RunResult& run, const DerivedParams& dp, const CertReport* cert,
               const ComparisonTrace* trace);

std::string summary_text(const Summary& s);
std::string summary_csv_row(const Summary& s); // single header+row record

} // namespace fluxlim
