#include "fluxlim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fluxlim/csv.hpp"
#include "fluxlim/numerics.hpp"

namespace fluxlim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite_all(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}
} // namespace

void SolverConfig::validate() const {
    if (!(dt_min > 0.0 && dt_min < dt_init && dt_init <= dt_max)) {
        throw config_error("SolverConfig: need 0 < dt_min < dt_init <= dt_max");
    }
    if (!(u_cap > 1.0)) throw config_error("SolverConfig: u_cap must exceed 1 (multiple of M)");
    if (!(tol_step > 0.0)) throw config_error("SolverConfig: tol_step must be positive");
    if (!(dt_growth > 1.0) || !(dt_shrink > 0.0 && dt_shrink < 1.0)) {
        throw config_error("SolverConfig: need dt_growth > 1 and dt_shrink in (0,1)");
    }
    if (!(newton_tol > 0.0) || newton_max_iter < 1 || !(jacobian_floor > 0.0)) {
        throw config_error("SolverConfig: bad Newton settings");
    }
}

std::string to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::BlewUp: return "BlewUp";
        case OutcomeKind::HorizonReached: return "HorizonReached";
        case OutcomeKind::Stalled: return "Stalled";
    }
    return "?";
}

std::vector<double> rhs(const RadialProfile& U, const DerivedParams& dp, const Grid& grid) {
    if (U.values.size() != grid.nodes.size()) throw input_error("rhs: grid/value mismatch");
    if (U.values.front() != 0.0 || U.values.back() != 0.0) {
        throw input_error("rhs: boundary values must be zero");
    }
    const int n = grid.n();
    const auto w = stencil_weights(grid);
    const double ad = (2.0 * dp.model.N - 2.0) / dp.model.N;
    const double ar = (2.0 - dp.model.p) * (dp.model.N - 1.0) / dp.model.N;
    std::vector<double> out(n + 1, 0.0);
    const auto& u = U.values;
    for (int i = 1; i < n; ++i) {
        const int k = i - 1;
        const double d1 = w.d1m[k] * u[i - 1] + w.d10[k] * u[i] + w.d1p[k] * u[i + 1];
        const double d2 = w.d2m[k] * u[i - 1] + w.d20[k] * u[i] + w.d2p[k] * u[i + 1];
        const double r = grid.nodes[i];
        out[i] = std::pow(r, ad) * d2 +
                 dp.chi_N * std::pow(r, ar) * (d1 + dp.model.M) *
                     signed_pow(u[i], dp.model.p - 1.0);
    }
    return out;
}

Stepper::Stepper(GridPtr grid, DerivedParams dp, SolverConfig cfg)
    : grid_(std::move(grid)), dp_(std::move(dp)), cfg_(cfg) {
    cfg_.validate();
    w_ = stencil_weights(*grid_);
    const int n = grid_->n();
    const double ad = (2.0 * dp_.model.N - 2.0) / dp_.model.N;
    const double ar = (2.0 - dp_.model.p) * (dp_.model.N - 1.0) / dp_.model.N;
    wdiff_.resize(n - 1);
    wreac_.resize(n - 1);
    for (int i = 1; i < n; ++i) {
        wdiff_[i - 1] = std::pow(grid_->nodes[i], ad);
        wreac_[i - 1] = dp_.chi_N * std::pow(grid_->nodes[i], ar);
    }
    lo_.resize(n - 1);
    di_.resize(n - 1);
    up_.resize(n - 1);
    rhs_.resize(n - 1);
    e_.resize(n - 1);
    full_.resize(n + 1);
    half_.resize(n + 1);
    res_.resize(n - 1);
    dlt_.resize(n - 1);
    trial_.resize(n + 1);
}

void Stepper::explicit_reaction(const std::vector<double>& U, std::vector<double>& E) const {
    const int n = grid_->n();
    for (int i = 1; i < n; ++i) {
        const int k = i - 1;
        const double d1 = w_.d1m[k] * U[i - 1] + w_.d10[k] * U[i] + w_.d1p[k] * U[i + 1];
        E[k] = wreac_[k] * (d1 + dp_.model.M) * signed_pow(U[i], dp_.model.p - 1.0);
    }
}

// Thomas algorithm; the implicit matrix is strictly diagonally dominant
// (diag = 1 + dt*wdiff*2/(hm*hp) against offdiagonals summing to dt*wdiff*2/(hm*hp)).
void Stepper::thomas_solve(std::vector<double>& lo, std::vector<double>& di,
                           std::vector<double>& up, std::vector<double>& b) const {
    const std::size_t m = di.size();
    for (std::size_t i = 1; i < m; ++i) {
        const double w = lo[i] / di[i - 1];
        di[i] -= w * up[i - 1];
        b[i] -= w * b[i - 1];
    }
    b[m - 1] /= di[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) {
        b[i] = (b[i] - up[i] * b[i + 1]) / di[i];
    }
}

bool Stepper::imex_step(const std::vector<double>& in, double dt, std::vector<double>& out) {
    const int n = grid_->n();
    explicit_reaction(in, e_);
    for (int i = 1; i < n; ++i) {
        const int k = i - 1;
        lo_[k] = -dt * wdiff_[k] * w_.d2m[k];
        di_[k] = 1.0 - dt * wdiff_[k] * w_.d20[k];
        up_[k] = -dt * wdiff_[k] * w_.d2p[k];
        rhs_[k] = in[i] + dt * e_[k];
    }
    thomas_solve(lo_, di_, up_, rhs_);
    out.resize(n + 1);
    out[0] = 0.0;
    out[n] = 0.0;
    for (int i = 1; i < n; ++i) out[i] = rhs_[i - 1];
    return finite_all(out);
}

bool Stepper::newton_step(const std::vector<double>& in, double dt, std::vector<double>& out) {
    const int n = grid_->n();
    // imex predictor as the initial iterate
    if (!imex_step(in, dt, out)) return false;
    const double pm1 = dp_.model.p - 1.0;

    auto residual = [&](const std::vector<double>& V, std::vector<double>& R) {
        explicit_reaction(V, e_);
        double norm = 0.0;
        for (int i = 1; i < n; ++i) {
            const int k = i - 1;
            const double d2 =
                w_.d2m[k] * V[i - 1] + w_.d20[k] * V[i] + w_.d2p[k] * V[i + 1];
            R[k] = V[i] - in[i] - dt * (wdiff_[k] * d2 + e_[k]);
            norm = std::max(norm, std::abs(R[k]));
        }
        return norm;
    };

    double rnorm = residual(out, res_);
    double scale = 1.0;
    for (double v : out) scale = std::max(scale, std::abs(v));
    for (int it = 0; it < cfg_.newton_max_iter; ++it) {
        if (!std::isfinite(rnorm)) return false;
        if (rnorm <= cfg_.newton_tol * scale) return finite_all(out);
        // tridiagonal Jacobian of V - dt*(A V + E(V)); |V| floored only here
        for (int i = 1; i < n; ++i) {
            const int k = i - 1;
            const double s = signed_pow(out[i], pm1);
            const double d1 =
                w_.d1m[k] * out[i - 1] + w_.d10[k] * out[i] + w_.d1p[k] * out[i + 1];
            const double dspow =
                pm1 * std::pow(std::max(std::abs(out[i]), cfg_.jacobian_floor), pm1 - 1.0);
            lo_[k] = -dt * (wdiff_[k] * w_.d2m[k] + wreac_[k] * w_.d1m[k] * s);
            up_[k] = -dt * (wdiff_[k] * w_.d2p[k] + wreac_[k] * w_.d1p[k] * s);
            di_[k] = 1.0 - dt * (wdiff_[k] * w_.d20[k] +
                                 wreac_[k] * (w_.d10[k] * s + (d1 + dp_.model.M) * dspow));
            dlt_[k] = -res_[k];
        }
        thomas_solve(lo_, di_, up_, dlt_);
        // damped update: halve until the residual actually drops
        double lambda = 1.0;
        bool improved = false;
        double trial_norm = rnorm;
        for (int h = 0; h < 9; ++h) {
            for (int i = 1; i < n; ++i) trial_[i] = out[i] + lambda * dlt_[i - 1];
            trial_[0] = 0.0;
            trial_[n] = 0.0;
            trial_norm = residual(trial_, rhs_);
            if (std::isfinite(trial_norm) && trial_norm < rnorm) {
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) return false; // diverged
        out.swap(trial_);
        std::swap(res_, rhs_); // residual(trial_) left its values in rhs_
        double step = 0.0;
        for (int i = 1; i < n; ++i) step = std::max(step, std::abs(lambda * dlt_[i - 1]));
        rnorm = trial_norm;
        if (step <= cfg_.newton_tol * scale) return finite_all(out);
    }
    return false; // no convergence within newton_max_iter
}

bool Stepper::advance(const std::vector<double>& in, double dt, std::vector<double>& out) {
    return cfg_.scheme == Scheme::imex ? imex_step(in, dt, out) : newton_step(in, dt, out);
}

Stepper::Attempt Stepper::attempt(const std::vector<double>& U, double dt,
                                  std::vector<double>& out) {
    Attempt a;
    if (!advance(U, dt, full_)) {
        a.failed = true;
        return a;
    }
    if (!advance(U, 0.5 * dt, half_) || !advance(half_, 0.5 * dt, out)) {
        a.failed = true;
        return a;
    }
    double diff = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        diff = std::max(diff, std::abs(full_[i] - out[i]));
        scale = std::max(scale, std::abs(out[i]));
    }
    a.error_estimate = diff / scale;
    if (!std::isfinite(a.error_estimate)) a.failed = true;
    return a;
}

void Stepper::density_range(const std::vector<double>& U, double& sup_u, double& min_u) const {
    const auto& x = grid_->nodes;
    const int n = grid_->n();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto take = [&](double slope) {
        hi = std::max(hi, slope);
        lo = std::min(lo, slope);
    };
    take((U[1] - U[0]) / (x[1] - x[0]));
    take((U[n] - U[n - 1]) / (x[n] - x[n - 1]));
    for (int i = 1; i < n; ++i) {
        take((U[i + 1] - U[i - 1]) / (x[i + 1] - x[i - 1]));
    }
    sup_u = hi + dp_.model.M;
    min_u = lo + dp_.model.M;
}

namespace {

// nondecreasing sup_u over the trailing window and clearly above the mean
// density: the dt collapse is a genuine blow-up approach, not a stall
bool exploding_tail(const std::vector<TimeSeriesEntry>& s, double M) {
    if (s.size() < 3) return false;
    const std::size_t k = std::min<std::size_t>(10, s.size());
    for (std::size_t i = s.size() - k + 1; i < s.size(); ++i) {
        if (s[i].sup_u < s[i - 1].sup_u) return false;
    }
    return s.back().sup_u >= 10.0 * M;
}

} // namespace

RunResult run(const RadialProfile& U0, const SolverConfig& cfg, const DerivedParams& dp,
              double horizon, const RunHooks& hooks) {
    cfg.validate();
    if (U0.kind != VariableKind::mass_U) throw input_error("run: U0 must be a mass_U profile");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw input_error("run: bad horizon");

    RunResult res;
    res.grid = U0.grid;
    Stepper st(U0.grid, dp, cfg);
    std::vector<double> U = U0.values;
    std::vector<double> out(U.size()), phi_buf;

    const double cap_abs = cfg.u_cap * dp.model.M;
    res.t_cross_cap = kNaN;
    res.t_cross_cap10 = kNaN;

    std::vector<double> forced = hooks.forced_times;
    std::sort(forced.begin(), forced.end());
    forced.erase(std::unique(forced.begin(), forced.end()), forced.end());
    std::size_t fidx = 0;
    while (fidx < forced.size() && forced[fidx] <= 0.0) ++fidx;

    double t = 0.0;
    double dt_work = cfg.dt_init;

    auto margin_of = [&](double tt, const std::vector<double>& val) {
        // phi lives on [0, T_max]; past that the margin has no meaning
        if (!hooks.compare || tt > hooks.compare->params().T_max) return kNaN;
        hooks.compare->phi_nodes(tt, U0.grid->nodes, phi_buf);
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < val.size(); ++i) m = std::min(m, val[i] - phi_buf[i]);
        return m;
    };
    auto record = [&](double tt, double dt, const std::vector<double>& val) {
        TimeSeriesEntry e;
        e.t = tt;
        e.dt = dt;
        st.density_range(val, e.sup_u, e.min_u);
        e.sup_U = 0.0;
        for (double v : val) e.sup_U = std::max(e.sup_U, std::abs(v));
        e.margin = margin_of(tt, val);
        res.series.push_back(e);
        return e;
    };

    record(0.0, 0.0, U);
    res.snapshots.push_back({0.0, U});

    bool outcome_set = false;
    while (!outcome_set && t < horizon * (1.0 - 1e-15)) {
        double landing = horizon;
        if (fidx < forced.size()) landing = std::min(landing, forced[fidx]);
        const bool lands = landing - t <= dt_work;
        const double dt_try = lands ? landing - t : dt_work;

        const auto a = st.attempt(U, dt_try, out);
        if (a.failed || a.error_estimate >= cfg.tol_step) {
            ++res.rejected_steps;
            dt_work = dt_try * cfg.dt_shrink;
            if (dt_work < cfg.dt_min) {
                if (exploding_tail(res.series, dp.model.M)) {
                    res.outcome = OutcomeKind::BlewUp;
                    res.diagnostics = "dt collapsed below dt_min on a diverging step";
                } else {
                    res.outcome = OutcomeKind::Stalled;
                    res.diagnostics = "dt collapsed below dt_min without blow-up signature";
                }
                res.t_final = t;
                outcome_set = true;
            }
            continue;
        }

        U.swap(out);
        // land exactly on forced times and the horizon so two runs sharing a
        // forced-time grid record their snapshots at bitwise-equal times
        t = lands ? landing : t + dt_try;
        ++res.accepted_steps;
        const auto entry = record(t, dt_try, U);

        if (!std::isfinite(entry.sup_u) || !finite_all(U)) {
            res.outcome = OutcomeKind::Stalled;
            res.diagnostics = "non-finite state";
            res.t_final = t;
            outcome_set = true;
            break;
        }
        if (std::isnan(res.t_cross_cap10) && entry.sup_u >= cap_abs / 10.0) {
            res.t_cross_cap10 = t;
        }
        if (entry.sup_u >= cap_abs) {
            res.t_cross_cap = t;
            res.outcome = OutcomeKind::BlewUp;
            res.t_final = t;
            res.snapshots.push_back({t, U});
            outcome_set = true;
            break;
        }

        bool snap = hooks.snapshot_every > 0 &&
                    res.accepted_steps % hooks.snapshot_every == 0;
        if (fidx < forced.size() && t >= forced[fidx]) {
            snap = true;
            ++fidx;
        }
        if (snap) res.snapshots.push_back({t, U});

        if (dt_try == dt_work && a.error_estimate < 0.3 * cfg.tol_step) {
            dt_work = std::min(dt_work * cfg.dt_growth, cfg.dt_max);
        }
    }

    if (!outcome_set) {
        res.outcome = OutcomeKind::HorizonReached;
        res.t_final = t;
        if (res.snapshots.back().t < t) res.snapshots.push_back({t, U});
    }
    res.t_final_original = res.t_final / (double(dp.model.N) * dp.model.N);
    return res;
}

ConvergenceReport self_convergence(const std::function<double(double)>& U0,
                                   const DerivedParams& dp, const std::vector<int>& grid_ns,
                                   double clustering_exponent, double horizon,
                                   SolverConfig cfg) {
    if (grid_ns.size() < 3) {
        throw config_error("self_convergence: need at least three grids");
    }
    for (std::size_t k = 1; k < grid_ns.size(); ++k) {
        if (grid_ns[k] != 2 * grid_ns[k - 1]) {
            throw config_error("self_convergence: grid sizes must double");
        }
    }
    std::vector<std::vector<double>> finals;
    std::vector<GridPtr> grids;
    for (int n : grid_ns) {
        auto g = build_grid_ptr(n, clustering_exponent);
        std::vector<double> v(g->nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = U0(g->nodes[i]);
        v.front() = 0.0;
        v.back() = 0.0;
        auto prof = make_profile(g, VariableKind::mass_U, 0.0, std::move(v));
        auto r = run(prof, cfg, dp, horizon, {});
        if (r.outcome != OutcomeKind::HorizonReached) {
            throw precondition_error(
                "self_convergence: run ended with " + to_string(r.outcome) +
                " before the horizon; choose a horizon well before blow-up");
        }
        finals.push_back(r.snapshots.back().values);
        grids.push_back(std::move(g));
    }

    ConvergenceReport rep;
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
        const int stride = grid_ns[k + 1] / grid_ns[k];
        double d = 0.0;
        for (std::size_t i = 0; i < finals[k].size(); ++i) {
            d = std::max(d, std::abs(finals[k][i] - finals[k + 1][i * stride]));
        }
        rep.diffs.push_back(d);
    }
    rep.exact = std::all_of(rep.diffs.begin(), rep.diffs.end(),
                            [](double d) { return d <= 1e-14; });
    if (rep.exact) {
        rep.observed_order = std::numeric_limits<double>::infinity();
        return rep;
    }
    for (std::size_t k = 0; k + 1 < rep.diffs.size(); ++k) {
        rep.orders.push_back(std::log2(rep.diffs[k] / rep.diffs[k + 1]));
    }
    rep.observed_order = *std::min_element(rep.orders.begin(), rep.orders.end());
    return rep;
}

void write_timeseries_csv(const std::string& path, const RunResult& r) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path + " for writing");
    out << "t,dt,sup_u,min_u,sup_U,margin\n";
    for (const auto& e : r.series) {
        out << csv::num(e.t) << "," << csv::num(e.dt) << "," << csv::num(e.sup_u) << ","
            << csv::num(e.min_u) << "," << csv::num(e.sup_U) << "," << csv::num(e.margin)
            << "\n";
    }
}

} // namespace fluxlim
