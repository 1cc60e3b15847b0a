#include "fluxlim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fluxlim/csv.hpp"

namespace fluxlim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// int_{x0}^{x1} rho^q drho, x0 >= 0; only called with a nonzero coefficient,
// so q <= -1 with x0 = 0 never reaches here.
double power_moment(double x0, double x1, double q) {
    if (q == -1.0) return std::log(x1 / x0);
    return (std::pow(x1, q + 1.0) - std::pow(x0, q + 1.0)) / (q + 1.0);
}
} // namespace

double weighted_l2_pw_linear(const Grid& g, const std::vector<double>& values, double w) {
    if (values.size() != g.nodes.size()) throw input_error("weighted_l2: size mismatch");
    if (w <= -1.0 && values.front() != 0.0) {
        throw precondition_error("weighted_l2: divergent first cell (u(0) != 0, w <= -1)");
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        const double x0 = g.nodes[i - 1], x1 = g.nodes[i];
        const double b = (values[i] - values[i - 1]) / (x1 - x0);
        const double a = values[i - 1] - b * x0; // u = a + b rho on the cell
        // (a + b rho)^2 against rho^w, term by term; skip vanishing coefficients
        if (a != 0.0) acc += a * a * power_moment(x0, x1, w);
        if (a != 0.0 && b != 0.0) acc += 2.0 * a * b * power_moment(x0, x1, w + 1.0);
        if (b != 0.0) acc += b * b * power_moment(x0, x1, w + 2.0);
    }
    return acc;
}

double weighted_h1_pw_linear(const Grid& g, const std::vector<double>& values, double w) {
    if (values.size() != g.nodes.size()) throw input_error("weighted_h1: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        const double x0 = g.nodes[i - 1], x1 = g.nodes[i];
        const double s = (values[i] - values[i - 1]) / (x1 - x0);
        if (s != 0.0) acc += s * s * power_moment(x0, x1, w);
    }
    return acc;
}

namespace {

double interp_linear(const std::vector<double>& x, const std::vector<double>& y, double q) {
    if (q <= x.front()) return y.front();
    if (q >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    const std::size_t i = it - x.begin();
    const double t = (q - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

} // namespace

ComparisonTrace compare_with_subsolution(const RunResult& run, const DerivedParams& dp,
                                         double tol, GridPtr eval_grid) {
    const auto rep = validate_model(dp.model, dp.gamma);
    if (!rep.passed()) {
        throw precondition_error("compare_with_subsolution: parameters fail thresholds:\n" +
                                 rep.to_text());
    }
    if (run.snapshots.empty() || run.snapshots.front().t != 0.0) {
        throw precondition_error("compare_with_subsolution: run carries no t=0 snapshot");
    }
    if (!run.grid) throw input_error("compare_with_subsolution: run carries no grid");

    ComparisonTrace tr;
    tr.tol = tol;
    tr.pass = true;

    const auto& run_x = run.grid->nodes;
    const bool resample = eval_grid && eval_grid->nodes != run_x;
    tr.interpolated = resample;
    const auto& x = resample ? eval_grid->nodes : run_x;

    const Subsolution sub(dp);
    std::vector<double> phi_buf, u_buf;
    auto values_on_x = [&](const Snapshot& snap) -> const std::vector<double>& {
        if (!resample) return snap.values;
        u_buf.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            u_buf[i] = interp_linear(run_x, snap.values, x[i]);
        }
        return u_buf;
    };

    // admissibility of the initial data, checked on the run's own nodes
    sub.phi_nodes(0.0, run_x, phi_buf);
    const auto& U0 = run.snapshots.front().values;
    for (std::size_t i = 0; i < run_x.size(); ++i) {
        if (U0[i] - phi_buf[i] < 0.0) {
            std::ostringstream os;
            os << "compare_with_subsolution: U0 < phi(0,.) at rho=" << run_x[i]
               << " (deficit " << U0[i] - phi_buf[i] << "); comparison hypothesis unmet";
            throw precondition_error(os.str());
        }
    }

    tr.half_mass_min = std::numeric_limits<double>::infinity();
    double t_stop = std::numeric_limits<double>::infinity();
    if (run.outcome == OutcomeKind::BlewUp) t_stop = run.t_final;

    for (const auto& snap : run.snapshots) {
        if (snap.t > t_stop || snap.t > dp.T_max) break;
        const auto& u = values_on_x(snap);
        sub.phi_nodes(snap.t, x, phi_buf);
        double m = std::numeric_limits<double>::infinity();
        double at_rho = 0.0;
        for (std::size_t i = 1; i + 1 < x.size(); ++i) {
            const double d = u[i] - phi_buf[i];
            if (d < m) {
                m = d;
                at_rho = x[i];
            }
        }
        tr.times.push_back(snap.t);
        tr.min_margin.push_back(m);
        if (m < -tol && !tr.first_violation) {
            tr.first_violation = {snap.t, at_rho, m};
            tr.pass = false;
        }
        // half-mass level set: phi1 = 1/2 exactly at rho = a(t)^(1/gamma)
        const double r_half = std::pow(a_of_t(snap.t, dp), 1.0 / dp.gamma);
        if (r_half <= dp.rho1) {
            tr.half_mass_applicable = true;
            const double u_at = interp_linear(x, u, r_half);
            tr.half_mass_min = std::min(tr.half_mass_min, u_at);
            if (u_at < 0.5 - tol) tr.half_mass_pass = false;
        }
    }
    if (!tr.half_mass_applicable) tr.half_mass_min = kNaN;
    tr.pass = tr.pass && tr.half_mass_pass;
    return tr;
}

void write_comparison_csv(const std::string& path, const ComparisonTrace& tr) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path + " for writing");
    out << "t,min_margin\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        out << csv::num(tr.times[i]) << "," << csv::num(tr.min_margin[i]) << "\n";
    }
}

StabilityReport stability_probe(const RadialProfile& U0, double perturbation_scale,
                                const SolverConfig& cfg, const DerivedParams& dp,
                                double horizon, int compare_points) {
    if (compare_points < 2) throw input_error("stability_probe: need >= 2 compare points");
    RadialProfile U0b = U0;
    for (double& v : U0b.values) v *= 1.0 + perturbation_scale;
    U0b.values.front() = 0.0;
    U0b.values.back() = 0.0;

    RunHooks hooks;
    for (int i = 1; i <= compare_points; ++i) {
        hooks.forced_times.push_back(horizon * i / compare_points);
    }
    const auto ra = run(U0, cfg, dp, horizon, hooks);
    const auto rb = run(U0b, cfg, dp, horizon, hooks);

    StabilityReport rep;
    rep.threshold = 1e4 * std::abs(perturbation_scale);
    rep.stop_sup_u = 100.0 * dp.model.M;
    rep.inconclusive =
        ra.outcome == OutcomeKind::Stalled || rb.outcome == OutcomeKind::Stalled;

    Stepper st(U0.grid, dp, cfg); // for density stats only
    const std::size_t m = std::min(ra.snapshots.size(), rb.snapshots.size());
    for (std::size_t k = 0; k < m; ++k) {
        const auto& sa = ra.snapshots[k];
        const auto& sb = rb.snapshots[k];
        if (sa.t != sb.t) break; // runs diverged in reachable forced times
        double su_a, mu_a, su_b, mu_b;
        st.density_range(sa.values, su_a, mu_a);
        st.density_range(sb.values, su_b, mu_b);
        if (su_a > rep.stop_sup_u || su_b > rep.stop_sup_u) break;
        double d = 0.0;
        for (std::size_t i = 0; i < sa.values.size(); ++i) {
            d = std::max(d, std::abs(sa.values[i] - sb.values[i]));
        }
        rep.times.push_back(sa.t);
        rep.divergence.push_back(d);
        rep.max_divergence = std::max(rep.max_divergence, d);
    }
    rep.pass = !rep.inconclusive && rep.max_divergence <= rep.threshold;
    return rep;
}

HardyCheck hardy_check(const RadialProfile& u, double delta, double quad_tol) {
    if (delta == 1.0 || !(delta > 0.0)) {
        throw input_error("hardy_check: delta must be positive and different from 1");
    }
    if (!(delta < 3.0)) {
        throw input_error(
            "hardy_check: delta >= 3 makes both discrete integrals divergent");
    }
    const auto& x = u.grid->nodes;
    const auto& v = u.values;
    const double scale = std::max(1.0, std::abs(*std::max_element(
                                            v.begin(), v.end(), [](double a, double b) {
                                                return std::abs(a) < std::abs(b);
                                            })));
    if (std::abs(v.back()) > 1e-14 * scale) {
        throw precondition_error("hardy_check: u(1) must vanish");
    }
    // rho -> 0 decay rho^(1-delta) u^2 -> 0, checked on the first nodes: with
    // u(0) = 0 the resolved first segment is u ~ b rho, so the weighted square
    // behaves like rho^(3-delta) and must shrink toward the origin
    if (delta > 1.0) {
        if (v.front() != 0.0) {
            throw precondition_error("hardy_check: decay needs u(0) = 0 for delta > 1");
        }
        const double m_full = std::pow(x[1], 1.0 - delta) * v[1] * v[1];
        const double m_half =
            std::pow(0.5 * x[1], 1.0 - delta) * (0.5 * v[1]) * (0.5 * v[1]);
        if (m_half > m_full * (1.0 + 1e-12) && m_full > 1e-300) {
            throw precondition_error("hardy_check: rho^(1-delta) u^2 not decaying near 0");
        }
    }

    HardyCheck hc;
    hc.delta = delta;
    hc.constant = 4.0 / ((1.0 - delta) * (1.0 - delta));
    hc.lhs = weighted_l2_pw_linear(*u.grid, v, -delta);
    hc.rhs = weighted_h1_pw_linear(*u.grid, v, 2.0 - delta);
    hc.pass = hc.lhs <= hc.constant * hc.rhs * (1.0 + quad_tol) + 1e-300;
    return hc;
}

namespace {

// deterministic per-case generator: admissible piecewise-linear function
std::vector<double> hardy_case_values(const Grid& g, double delta, std::uint64_t seed,
                                      long case_index) {
    std::seed_seq seq{static_cast<unsigned>(seed & 0xffffffffu),
                      static_cast<unsigned>(seed >> 32),
                      static_cast<unsigned>(case_index & 0x7fffffff),
                      static_cast<unsigned>(delta * 1048576)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> v(g.nodes.size());
    for (double& w : v) w = uni(rng);
    v.back() = 0.0;
    if (delta > 1.0) v.front() = 0.0;
    return v;
}

} // namespace

HardyBatchResult hardy_batch_reference(const Grid& grid, const std::vector<double>& deltas,
                                       int cases_per_delta, std::uint64_t seed) {
    HardyBatchResult res;
    long idx = 0;
    for (double d : deltas) {
        for (int c = 0; c < cases_per_delta; ++c, ++idx) {
            HardyCaseRow row;
            row.case_index = idx;
            row.delta = d;
            try {
                const auto v = hardy_case_values(grid, d, seed, idx);
                RadialProfile p{std::make_shared<const Grid>(grid), v,
                                VariableKind::density_u, 0.0};
                const auto hc = hardy_check(p, d);
                row.lhs = hc.lhs;
                row.rhs = hc.rhs;
                row.bound = hc.constant * hc.rhs;
                row.pass = hc.pass;
            } catch (const std::exception&) {
                row.rejected = true;
            }
            res.rows.push_back(row);
        }
    }
    res.cases = idx;
    for (const auto& r : res.rows) {
        if (r.rejected) {
            ++res.rejected;
        } else if (r.pass) {
            ++res.passes;
        }
    }
    return res;
}

HardyBatchResult hardy_batch(const Grid& grid, const std::vector<double>& deltas,
                             int cases_per_delta, std::uint64_t seed) {
    HardyBatchResult res;
    const long total = static_cast<long>(deltas.size()) * cases_per_delta;
    res.rows.resize(total);
    const auto gp = std::make_shared<const Grid>(grid);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long idx = 0; idx < total; ++idx) {
        const double d = deltas[idx / cases_per_delta];
        HardyCaseRow row;
        row.case_index = idx;
        row.delta = d;
        try {
            const auto v = hardy_case_values(grid, d, seed, idx);
            RadialProfile p{gp, v, VariableKind::density_u, 0.0};
            const auto hc = hardy_check(p, d);
            row.lhs = hc.lhs;
            row.rhs = hc.rhs;
            row.bound = hc.constant * hc.rhs;
            row.pass = hc.pass;
        } catch (const std::exception&) {
            row.rejected = true;
        }
        res.rows[idx] = row;
    }
    res.cases = total;
    for (const auto& r : res.rows) {
        if (r.rejected) {
            ++res.rejected;
        } else if (r.pass) {
            ++res.passes;
        }
    }
    return res;
}

MvtCheck mvt_bound_check(double x, double y, double k, double p) {
    if (!(y > 0.0) || !(x >= 0.0) || !(k > 0.0 && k < 1.0) || !(p > 1.0 && p < 2.0) ||
        !(x < k * y)) {
        throw input_error("mvt_bound_check: need 0 <= x < k*y, y > 0, k in (0,1), p in (1,2)");
    }
    MvtCheck c;
    const double num = (p - 1.0) * (y - x);
    const double den = std::pow(y, p - 1.0) - std::pow(x, p - 1.0);
    c.xi = std::pow(num / den, 1.0 / (2.0 - p));
    c.k0 = std::pow((p - 1.0) * (1.0 - k), 1.0 / (2.0 - p));
    c.pass = c.xi >= c.k0 * y * (1.0 - 1e-12);
    return c;
}

Summary report(const RunResult& run, const DerivedParams& dp, const CertReport* cert,
               const ComparisonTrace* trace) {
    Summary s;
    s.outcome = run.outcome;
    s.T_max = dp.T_max;
    s.inconclusive = run.outcome == OutcomeKind::Stalled;
    s.t_blow = run.outcome == OutcomeKind::BlewUp ? run.t_final : kNaN;
    s.t_blow_original = run.outcome == OutcomeKind::BlewUp ? run.t_final_original : kNaN;
    s.theorem_check_pass =
        run.outcome == OutcomeKind::BlewUp && run.t_final <= dp.T_max;
    if (std::isfinite(run.t_cross_cap) && std::isfinite(run.t_cross_cap10) &&
        run.t_cross_cap > 0.0) {
        s.cap_sensitivity = std::abs(run.t_cross_cap - run.t_cross_cap10) / run.t_cross_cap;
    } else {
        s.cap_sensitivity = kNaN;
    }
    if (cert) {
        s.cert_attached = true;
        s.cert_pass = cert->pass;
        s.worst_L = std::max(cert->worst_L1, cert->worst_L2);
    }
    s.chi_margin = dp.chi_N / dp.chi_threshold - 1.0;
    s.chi_margin_small = s.chi_margin < 0.01;
    if (trace) {
        s.comparison_attached = true;
        s.comparison_pass = trace->pass;
        s.tol = trace->tol;
        s.min_margin = trace->min_margin.empty()
                           ? kNaN
                           : *std::min_element(trace->min_margin.begin(),
                                               trace->min_margin.end());
    }
    return s;
}

std::string summary_text(const Summary& s) {
    std::ostringstream os;
    os << "outcome = " << to_string(s.outcome) << "\n";
    os << "t_blow_rescaled = " << csv::num(s.t_blow) << "\n";
    os << "t_blow_original = " << csv::num(s.t_blow_original) << "\n";
    os << "T_max = " << csv::num(s.T_max) << "\n";
    if (s.inconclusive) {
        os << "theorem_check = INCONCLUSIVE (run stalled)\n";
    } else {
        os << "theorem_check (t_blow <= T_max) = "
           << (s.theorem_check_pass ? "pass" : "FAILED") << "\n";
    }
    os << "cap_sensitivity = " << csv::num(s.cap_sensitivity) << "\n";
    if (s.cert_attached) {
        os << "certificate = " << (s.cert_pass ? "pass" : "FAILED")
           << " (worst L = " << csv::num(s.worst_L) << ")\n";
    }
    os << "chi_margin_over_threshold = " << csv::num(s.chi_margin)
       << (s.chi_margin_small ? "  (small margin)" : "") << "\n";
    if (s.comparison_attached) {
        os << "comparison = " << (s.comparison_pass ? "pass" : "FAILED")
           << " (min margin = " << csv::num(s.min_margin) << ", tol = " << csv::num(s.tol)
           << ")\n";
    }
    for (const auto& [label, path] : s.files) os << label << " = " << path << "\n";
    return os.str();
}

std::string summary_csv_row(const Summary& s) {
    std::ostringstream os;
    os << "outcome,t_blow,t_blow_original,T_max,theorem_check,cap_sensitivity,"
          "cert_pass,worst_L,chi_margin,comparison_pass,min_margin,tol\n";
    os << to_string(s.outcome) << "," << csv::num(s.t_blow) << ","
       << csv::num(s.t_blow_original) << "," << csv::num(s.T_max) << ","
       << (s.theorem_check_pass ? 1 : 0) << "," << csv::num(s.cap_sensitivity) << ","
       << (s.cert_pass ? 1 : 0) << "," << csv::num(s.worst_L) << ","
       << csv::num(s.chi_margin) << "," << (s.comparison_pass ? 1 : 0) << ","
       << csv::num(s.min_margin) << "," << csv::num(s.tol) << "\n";
    return os.str();
}

} // namespace fluxlim
