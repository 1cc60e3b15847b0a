#include "fluxlim/cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fluxlim/csv.hpp"
#include "fluxlim/harness.hpp"

namespace fluxlim {

namespace {

namespace fs = std::filesystem;

double resolve_gamma(const ExperimentConfig& cfg) {
    if (cfg.gamma > 0.0) return cfg.gamma;
    return default_gamma(cfg.model);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw config_error("cannot create output directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path + " for writing");
    out << text;
}

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void print_derived(const DerivedParams& dp) {
    std::cout << "gamma = " << dp.gamma << " (bound " << dp.gamma_max << ")\n"
              << "chi_N = " << dp.chi_N << " (threshold " << dp.chi_threshold << ")\n"
              << "theta = " << dp.theta << "  rho2 = " << dp.rho2 << "  kappa = " << dp.kappa
              << "\n"
              << "epsilon = " << dp.epsilon << "  T_max = " << dp.T_max << "\n";
}

} // namespace

int cmd_validate(const ExperimentConfig& cfg) {
    double gamma = -1.0;
    try {
        gamma = resolve_gamma(cfg);
    } catch (const infeasible_error&) {
        // validation below reports the range failures
    }
    const auto rep = gamma > 0.0 ? validate_model(cfg.model, gamma)
                                 : validate_model(cfg.model);
    std::cout << rep.to_text();
    if (!rep.passed()) return exit_code::validation_failed;
    try {
        const auto dp = derive(cfg.model, gamma);
        print_derived(dp);
    } catch (const std::exception& e) {
        // a user-supplied gamma outside (1, gamma_bound) lands here
        std::cout << "FAIL " << e.what() << "\n";
        return exit_code::validation_failed;
    }
    return exit_code::ok;
}

int cmd_certify(const ExperimentConfig& cfg) {
    if (!(cfg.cert_tol > 0.0)) throw config_error("certify: cert_tol must be positive");
    if (cfg.cert_rho_samples < 8 || cfg.cert_t_samples < 1) {
        throw config_error("certify: need cert_rho_samples >= 8 and cert_t_samples >= 1");
    }
    double gamma = 0.0;
    DerivedParams dp;
    try {
        gamma = resolve_gamma(cfg);
        const auto rep = validate_model(cfg.model, gamma);
        if (!rep.passed()) {
            std::cout << rep.to_text();
            return exit_code::validation_failed;
        }
        dp = derive(cfg.model, gamma);
    } catch (const input_error& e) {
        std::cout << "FAIL " << e.what() << "\n";
        return exit_code::validation_failed;
    } catch (const infeasible_error& e) {
        std::cout << "FAIL " << e.what() << "\n";
        return exit_code::validation_failed;
    } catch (const precondition_error& e) {
        std::cout << "FAIL " << e.what() << "\n";
        return exit_code::validation_failed;
    }
    const auto cert = certify(dp, cfg.cert_rho_samples, cfg.cert_t_samples, cfg.cert_tol);

    ensure_dir(cfg.output_dir);
    const auto cert_path = path_join(cfg.output_dir, "cert.csv");
    write_cert_csv(cert_path, cert);

    std::ostringstream os;
    os << "certificate = " << (cert.pass ? "pass" : "FAILED") << "\n"
       << "worst_L1 = " << csv::num(cert.worst_L1) << "\n"
       << "worst_L2 = " << csv::num(cert.worst_L2) << "\n"
       << "c1_matching_error = " << csv::num(cert.c1_matching_error) << "\n"
       << "jump_at_rho2 = " << csv::num(cert.jump_at_rho2)
       << " (rel err vs kappa*beta = " << csv::num(cert.jump_rho2_rel_error) << ")\n"
       << "jump_at_rho1_min = " << csv::num(cert.jump_at_rho1_min) << "\n"
       << "violations = " << cert.violations.size() << "\n";
    const double chi_margin = dp.chi_N / dp.chi_threshold - 1.0;
    os << "chi_margin_over_threshold = " << csv::num(chi_margin)
       << (chi_margin < 0.01 ? "  (small margin)" : "") << "\n";
    write_text(path_join(cfg.output_dir, "summary.txt"), os.str());
    std::cout << os.str();
    print_derived(dp);
    return cert.pass ? exit_code::ok : exit_code::certificate_failed;
}

namespace {

struct SimulateArtifacts {
    RunResult run;
    DerivedParams dp;
    bool comparison_attached = false;
    ComparisonTrace trace;
    double tol = 0.0;
};

SimulateArtifacts run_pipeline(const ExperimentConfig& cfg, const DerivedParams& dp) {
    SimulateArtifacts art;
    art.dp = dp;
    auto grid = build_grid_ptr(cfg.grid_n, cfg.clustering_exponent);
    auto U0 = make_admissible_initial(dp, grid, cfg.initial_mode, cfg.initial_inflation);
    if (cfg.initial_scale != 1.0) {
        for (double& v : U0.values) v *= cfg.initial_scale;
    }
    const double horizon = cfg.horizon > 0.0 ? cfg.horizon : 1.2 * dp.T_max;

    const Subsolution sub(dp);
    // margins are meaningful only when the comparison hypothesis holds
    bool admissible = true;
    {
        std::vector<double> phi0;
        sub.phi_nodes(0.0, grid->nodes, phi0);
        for (std::size_t i = 0; i < phi0.size(); ++i) {
            if (U0.values[i] < phi0[i]) {
                admissible = false;
                break;
            }
        }
    }
    RunHooks hooks;
    hooks.snapshot_every = cfg.snapshot_every;
    if (admissible) hooks.compare = &sub;
    art.run = run(U0, cfg.solver, dp, horizon, hooks);
    art.tol = 10.0 * (grid->max_spacing() + cfg.solver.tol_step);
    if (admissible) {
        art.trace = compare_with_subsolution(art.run, dp, art.tol);
        art.comparison_attached = true;
    }
    return art;
}

std::string plot_script(const std::vector<std::string>& snapshot_files,
                        bool with_comparison) {
    std::ostringstream os;
    os << "# gnuplot commands; run from this directory: gnuplot plot.script\n"
          "set datafile separator ','\n"
          "set terminal pngcairo size 1000,700\n"
          "set key left top\n"
          "set output 'timeseries.png'\n"
          "set logscale y\n"
          "plot 'timeseries.csv' using 1:3 with lines title 'sup u', \\\n"
          "     'timeseries.csv' using 1:5 with lines title 'sup |U|'\n"
          "unset logscale y\n";
    if (with_comparison) {
        os << "set output 'comparison.png'\n"
              "plot 'comparison.csv' using 1:2 with lines title 'min (U - phi)'\n";
    }
    os << "set output 'profiles.png'\n"
          "plot ";
    for (std::size_t i = 0; i < snapshot_files.size(); ++i) {
        if (i) os << ", \\\n     ";
        os << "'" << snapshot_files[i] << "' using 1:2 with lines title 'snapshot " << i
           << "'";
    }
    os << "\n";
    return os.str();
}

} // namespace

int cmd_simulate(const ExperimentConfig& cfg) {
    DerivedParams dp;
    try {
        const double gamma = resolve_gamma(cfg);
        const auto rep = validate_model(cfg.model, gamma);
        if (!rep.passed()) {
            std::cout << rep.to_text();
            return exit_code::validation_failed;
        }
        dp = derive(cfg.model, gamma);
    } catch (const input_error& e) {
        std::cout << "FAIL " << e.what() << "\n";
        return exit_code::validation_failed;
    } catch (const infeasible_error& e) {
        std::cout << "FAIL " << e.what() << "\n";
        return exit_code::validation_failed;
    } catch (const precondition_error& e) {
        std::cout << "FAIL " << e.what() << "\n";
        return exit_code::validation_failed;
    }
    auto art = run_pipeline(cfg, dp);

    ensure_dir(cfg.output_dir);
    ensure_dir(path_join(cfg.output_dir, "snapshots"));
    write_timeseries_csv(path_join(cfg.output_dir, "timeseries.csv"), art.run);
    std::vector<std::string> snapshot_files;
    for (std::size_t k = 0; k < art.run.snapshots.size(); ++k) {
        const auto& snap = art.run.snapshots[k];
        auto prof = RadialProfile{art.run.grid, snap.values, VariableKind::mass_U, snap.t};
        std::ostringstream name;
        name << "snapshots/profile_" << k << ".csv";
        write_profile_csv(path_join(cfg.output_dir, name.str()), prof);
        snapshot_files.push_back(name.str());
    }
    if (art.comparison_attached) {
        write_comparison_csv(path_join(cfg.output_dir, "comparison.csv"), art.trace);
    }

    auto s = report(art.run, dp, nullptr, art.comparison_attached ? &art.trace : nullptr);
    s.files.emplace_back("timeseries_csv", path_join(cfg.output_dir, "timeseries.csv"));
    if (art.comparison_attached) {
        s.files.emplace_back("comparison_csv", path_join(cfg.output_dir, "comparison.csv"));
    }
    s.files.emplace_back("snapshots_dir", path_join(cfg.output_dir, "snapshots"));
    write_text(path_join(cfg.output_dir, "summary.txt"), summary_text(s));
    write_text(path_join(cfg.output_dir, "summary.csv"), summary_csv_row(s));
    write_text(path_join(cfg.output_dir, "plot.script"),
               plot_script(snapshot_files, art.comparison_attached));
    std::cout << summary_text(s);

    if (art.run.outcome == OutcomeKind::Stalled) return exit_code::stalled;
    if (art.comparison_attached && !art.trace.pass) return exit_code::comparison_violated;
    const bool timely = art.run.outcome == OutcomeKind::BlewUp &&
                        art.run.t_final <= 1.05 * dp.T_max;
    return timely ? exit_code::ok : exit_code::no_blowup;
}

namespace {

struct SweepRow {
    double value = 0.0;
    bool valid = false;
    double gamma = 0.0, epsilon = 0.0, T_max = 0.0, t_blow = 0.0, margin = 0.0;
    std::string status;
};

} // namespace

int cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values) {
    if (axis != "p" && axis != "M" && axis != "chi") {
        throw config_error("sweep: axis must be one of p, M, chi");
    }
    if (values.empty()) throw config_error("sweep: no values given");

    std::vector<SweepRow> rows(values.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads( \
        cfg.workers > 0 ? cfg.workers : omp_get_max_threads())
#endif
    for (long i = 0; i < static_cast<long>(values.size()); ++i) {
        SweepRow row;
        row.value = values[i];
        ModelParams mp = cfg.model;
        if (axis == "p") mp.p = values[i];
        else if (axis == "M") mp.M = values[i];
        else mp.chi = values[i];
        try {
            double g = cfg.gamma;
            bool use_default = true;
            if (g > 1.0) {
                const double bound = gamma_bound(mp);
                if (g < bound) use_default = false;
            }
            if (use_default) g = default_gamma(mp);
            const auto rep = validate_model(mp, g);
            if (!rep.passed()) {
                std::ostringstream os;
                os << "skipped: validation failed (chi_N=" << rep.chi_N
                   << ", threshold=" << rep.chi_threshold << ")";
                row.status = os.str();
            } else {
                const auto dp = derive(mp, g);
                ExperimentConfig point = cfg;
                point.model = mp;
                point.gamma = g;
                auto art = run_pipeline(point, dp);
                row.valid = true;
                row.gamma = g;
                row.epsilon = dp.epsilon;
                row.T_max = dp.T_max;
                row.t_blow = art.run.outcome == OutcomeKind::BlewUp
                                 ? art.run.t_final
                                 : std::numeric_limits<double>::quiet_NaN();
                row.margin = art.comparison_attached && !art.trace.min_margin.empty()
                                 ? *std::min_element(art.trace.min_margin.begin(),
                                                     art.trace.min_margin.end())
                                 : std::numeric_limits<double>::quiet_NaN();
                row.status = to_string(art.run.outcome);
            }
        } catch (const std::exception& e) {
            row.status = std::string("skipped: ") + e.what();
        }
        rows[i] = row;
    }

    ensure_dir(cfg.output_dir);
    std::ostringstream os;
    os << "# axis=" << axis << "\n";
    os << "point,gamma,epsilon,T_max,t_blow,margin,status\n";
    long valid = 0, timely = 0;
    for (const auto& r : rows) {
        os << csv::num(r.value) << "," << csv::num(r.gamma) << "," << csv::num(r.epsilon)
           << "," << csv::num(r.T_max) << "," << csv::num(r.t_blow) << ","
           << csv::num(r.margin) << "," << r.status << "\n";
        if (r.valid) {
            ++valid;
            if (std::isfinite(r.t_blow) && r.t_blow <= 1.05 * r.T_max) ++timely;
        }
    }
    write_text(path_join(cfg.output_dir, "sweep.csv"), os.str());
    std::cout << os.str();
    if (valid == 0) return exit_code::validation_failed;
    return timely == valid ? exit_code::ok : exit_code::no_blowup;
}

int cmd_proptest(const ExperimentConfig& cfg) {
    if (cfg.hardy_cases < 1 || cfg.mvt_cases < 1) {
        throw config_error("proptest: hardy_cases and mvt_cases must be positive");
    }
    const auto grid = build_grid(std::max(16, cfg.hardy_grid_n), 1.0);
    const auto hb = hardy_batch(grid, cfg.hardy_deltas, cfg.hardy_cases, cfg.seed);

    ensure_dir(cfg.output_dir);
    {
        std::ostringstream os;
        os << "case,delta,lhs,rhs,bound,pass,rejected\n";
        for (const auto& r : hb.rows) {
            os << r.case_index << "," << csv::num(r.delta) << "," << csv::num(r.lhs) << ","
               << csv::num(r.rhs) << "," << csv::num(r.bound) << "," << (r.pass ? 1 : 0)
               << "," << (r.rejected ? 1 : 0) << "\n";
        }
        write_text(path_join(cfg.output_dir, "hardy.csv"), os.str());
    }

    long mvt_pass = 0;
    std::ostringstream mos;
    mos << "case,p,k,y,x,xi,k0,pass\n";
    for (long i = 0; i < cfg.mvt_cases; ++i) {
        std::seed_seq seq{static_cast<unsigned>(cfg.seed & 0xffffffffu),
                          static_cast<unsigned>(cfg.seed >> 32),
                          static_cast<unsigned>(i), 0xa11ceu};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const double p = 1.05 + 0.9 * uni(rng);
        const double k = 0.05 + 0.9 * uni(rng);
        const double y = std::pow(10.0, -3.0 + 6.0 * uni(rng));
        const double x = k * y * uni(rng);
        const auto c = mvt_bound_check(x, y, k, p);
        if (c.pass) ++mvt_pass;
        mos << i << "," << csv::num(p) << "," << csv::num(k) << "," << csv::num(y) << ","
            << csv::num(x) << "," << csv::num(c.xi) << "," << csv::num(c.k0) << ","
            << (c.pass ? 1 : 0) << "\n";
    }
    write_text(path_join(cfg.output_dir, "mvt.csv"), mos.str());

    std::cout << "hardy: " << hb.passes << " pass, " << hb.rejected << " rejected, "
              << hb.cases - hb.passes - hb.rejected << " fail (of " << hb.cases << ")\n";
    std::cout << "mvt:   " << mvt_pass << " pass (of " << cfg.mvt_cases << ")\n";
    const bool ok = hb.all_pass() && mvt_pass == cfg.mvt_cases;
    return ok ? exit_code::ok : exit_code::certificate_failed;
}

} // namespace fluxlim
