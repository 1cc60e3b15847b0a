#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fluxlim/grid.hpp"
#include "fluxlim/params.hpp"
#include "fluxlim/profile.hpp"
#include "fluxlim/subsolution.hpp"

namespace fluxlim {

enum class Scheme { imex, fully_implicit };

struct SolverConfig {
    double dt_init = 1e-6;
    double dt_min = 1e-14;
    double dt_max = 1e-2;
    double u_cap = 1e6;     // blow-up density threshold, as a multiple of M
    double tol_step = 1e-6; // relative step-doubling error acceptance
    double dt_growth = 1.5;
    double dt_shrink = 0.5;
    Scheme scheme = Scheme::imex;
    double newton_tol = 1e-10; // fully_implicit only
    int newton_max_iter = 25;
    double jacobian_floor = 1e-14; // |U| floor in the linearization, never the residual

    void validate() const; // config_error on violation
};

struct TimeSeriesEntry {
    double t = 0.0;
    double dt = 0.0;
    double sup_u = 0.0; // sup density = max(D1(U) + M), one-sided at the endpoints
    double min_u = 0.0;
    double sup_U = 0.0; // max |U|
    double margin = 0.0; // min interior (U - phi); NaN when no harness attached
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> values;
};

enum class OutcomeKind { BlewUp, HorizonReached, Stalled };

std::string to_string(OutcomeKind k);

struct RunResult {
    OutcomeKind outcome = OutcomeKind::Stalled;
    double t_final = 0.0;          // blow-up / horizon / stall time, rescaled units
    double t_final_original = 0.0; // t_final / N^2
    std::vector<TimeSeriesEntry> series; // one entry per accepted step (plus t=0)
    std::vector<Snapshot> snapshots;     // always contains t=0
    GridPtr grid;
    double t_cross_cap = 0.0;   // first time sup_u >= u_cap*M (NaN if never)
    double t_cross_cap10 = 0.0; // first time sup_u >= u_cap*M/10 (NaN if never)
    long accepted_steps = 0;
    long rejected_steps = 0;
    std::string diagnostics;
};

struct RunHooks {
    int snapshot_every = 0;           // accepted-step cadence, 0 = off
    std::vector<double> forced_times; // ascending; steps land on these exactly, snapshot taken
    const Subsolution* compare = nullptr; // record per-step comparison margins when set
};

// Spatial residual of the rescaled mass-accumulation equation at every node
// (boundary entries zero):
//   rhs_i = rho_i^((2N-2)/N) D2(U)_i
//         + chi_N rho_i^((2-p)(N-1)/N) (D1(U)_i + M) sign(U_i)|U_i|^(p-1).
std::vector<double> rhs(const RadialProfile& U, const DerivedParams& dp, const Grid& grid);

// One time integrator attempt: diffusion implicit (tridiagonal), reaction
// explicit (imex) or damped Newton on the full residual (fully_implicit).
// attempt() performs one full step and two half steps; `out` receives the
// two-half-step state and the error estimate is their difference.
class Stepper {
public:
    Stepper(GridPtr grid, DerivedParams dp, SolverConfig cfg);

    struct Attempt {
        bool failed = false;
        double error_estimate = 0.0;
    };
    Attempt attempt(const std::vector<double>& U, double dt, std::vector<double>& out);

    // density statistics of a state (sup/min of D1(U)+M over all nodes)
    void density_range(const std::vector<double>& U, double& sup_u, double& min_u) const;

private:
    bool advance(const std::vector<double>& in, double dt, std::vector<double>& out);
    bool imex_step(const std::vector<double>& in, double dt, std::vector<double>& out);
    bool newton_step(const std::vector<double>& in, double dt, std::vector<double>& out);
    void explicit_reaction(const std::vector<double>& U, std::vector<double>& E) const;
    void thomas_solve(std::vector<double>& lo, std::vector<double>& di,
                      std::vector<double>& up, std::vector<double>& b) const;

    GridPtr grid_;
    DerivedParams dp_;
    SolverConfig cfg_;
    StencilWeights w_;
    std::vector<double> wdiff_, wreac_; // rho^alpha coefficient tables, interior nodes
    // scratch
    std::vector<double> lo_, di_, up_, rhs_, e_, full_, half_, res_, dlt_, trial_;
};

RunResult run(const RadialProfile& U0, const SolverConfig& cfg, const DerivedParams& dp,
              double horizon, const RunHooks& hooks = {});

struct ConvergenceReport {
    std::vector<double> diffs;  // successive sup-norm differences at common coarse nodes
    std::vector<double> orders; // log2(diffs[k]/diffs[k+1])
    bool exact = false;         // all differences at rounding level
    double observed_order = 0.0; // min of orders; +inf when exact
};

// Richardson-style self-convergence: same initial function sampled on each
// grid (grid_ns must double, at least three entries), integrated to `horizon`
// (which must lie before blow-up), compared at the shared coarse nodes.
ConvergenceReport self_convergence(const std::function<double(double)>& U0,
                                   const DerivedParams& dp, const std::vector<int>& grid_ns,
                                   double clustering_exponent, double horizon,
                                   SolverConfig cfg);

void write_timeseries_csv(const std::string& path, const RunResult& r);

} // namespace fluxlim
