#include "fluxlim/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fluxlim {

namespace {

bool all_finite(const ModelParams& mp) {
    return std::isfinite(mp.p) && std::isfinite(mp.M) && std::isfinite(mp.chi);
}

void require_finite(const ModelParams& mp) {
    if (!all_finite(mp)) {
        throw input_error("model parameters must be finite");
    }
}

} // namespace

bool ValidationReport::passed() const {
    return std::all_of(findings.begin(), findings.end(),
                       [](const Finding& f) { return f.pass; });
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    for (const auto& f : findings) {
        os << (f.pass ? "PASS " : "FAIL ") << f.assumption
           << "  observed=" << f.observed << " required(boundary)=" << f.required;
        if (!f.detail.empty()) os << "  " << f.detail;
        os << "\n";
    }
    os << "chi_N=" << chi_N << " threshold=" << chi_threshold
       << " strict_variant=" << chi_threshold_strict
       << " (gamma_used=" << gamma_used << ")\n";
    return os.str();
}

double q_of_gamma(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw input_error("q_of_gamma: gamma must be positive and finite");
    }
    const double g1 = gamma + 1.0;
    return (gamma + 2.0) * (1.5 * gamma + 1.0) / (4.0 * g1 * g1);
}

double rho2_of_gamma(double gamma) {
    return (2.0 + gamma) / (2.0 * (1.0 + gamma));
}

double gamma_bound(const ModelParams& mp) {
    require_finite(mp);
    const double chi_n = mp.chi * std::pow(double(mp.N), -mp.p);
    const double t_p = 1.0 + (2.0 - mp.p) / (mp.N * (mp.p - 1.0));
    const double t_chi = chi_n / 2.0 - 1.0;
    const double t_m = 1.0 + (mp.M - 6.0) / 4.0;
    const double t_n = (mp.N + 1.0) / mp.N;
    // gamma* is +inf: inf q = 3/8 already clears the required 1/3.
    const double bound = std::min(std::min(t_p, t_chi), std::min(t_m, t_n));
    if (!(bound > 1.0)) {
        std::ostringstream os;
        os << "gamma_bound: no admissible gamma, bound=" << bound;
        throw infeasible_error(os.str());
    }
    return bound;
}

double default_gamma(const ModelParams& mp) {
    const double bound = gamma_bound(mp);
    const double g = 0.99 * bound;
    // 0.99*bound can drop below 1 when the bound barely exceeds 1; fall back
    // to the midpoint of the admissible interval there.
    return g > 1.0 ? g : 1.0 + 0.5 * (bound - 1.0);
}

namespace {

// Shared core of the two threshold variants: rho2^(2-2/N)(1+gamma) / ((rho2-1/2)(1-rho2)(M-6)).
double threshold_core(const ModelParams& mp, double gamma) {
    const double r2 = rho2_of_gamma(gamma);
    return std::pow(r2, 2.0 - 2.0 / mp.N) * (1.0 + gamma) /
           ((r2 - 0.5) * (1.0 - r2) * (mp.M - 6.0));
}

} // namespace

double chi_threshold(const ModelParams& mp, double gamma) {
    require_finite(mp);
    const double c = 4.0 * threshold_core(mp, gamma) * std::pow(4.0 / 3.0, 2.0 - mp.p);
    return std::max(4.0, c);
}

double chi_threshold_strict(const ModelParams& mp, double gamma) {
    require_finite(mp);
    const double c = std::pow(2.0, 5.0 - mp.p) * threshold_core(mp, gamma);
    return std::max(4.0, c);
}

ValidationReport validate_model(const ModelParams& mp) {
    require_finite(mp);
    double g = std::numeric_limits<double>::quiet_NaN();
    // The chi threshold needs a gamma; use the default when the basic ranges allow one.
    try {
        g = default_gamma(mp);
    } catch (const infeasible_error&) {
        // leave NaN; the range findings below will explain the failure
    } catch (const input_error&) {
    }
    return validate_model(mp, g);
}

ValidationReport validate_model(const ModelParams& mp, double gamma) {
    require_finite(mp);
    ValidationReport rep;
    rep.chi_N = mp.chi * std::pow(double(mp.N), -mp.p);

    Finding fn;
    fn.assumption = "N-range (N > 2, integer)";
    fn.observed = mp.N;
    fn.required = 2.0;
    fn.pass = mp.N > 2;
    rep.findings.push_back(fn);

    Finding fp;
    fp.assumption = "p-range (N/(N-1) < p < 2)";
    fp.observed = mp.p;
    fp.required = mp.N > 1 ? double(mp.N) / (mp.N - 1.0) : 2.0;
    fp.pass = mp.N > 1 && mp.p > double(mp.N) / (mp.N - 1.0) && mp.p < 2.0;
    rep.findings.push_back(fp);

    Finding fm;
    fm.assumption = "mean-mass (M > 6)";
    fm.observed = mp.M;
    fm.required = 6.0;
    fm.pass = mp.M > 6.0;
    rep.findings.push_back(fm);

    Finding fc;
    fc.assumption = "chi-positive (chi > 0)";
    fc.observed = mp.chi;
    fc.required = 0.0;
    fc.pass = mp.chi > 0.0;
    rep.findings.push_back(fc);

    const bool basics = fn.pass && fp.pass && fm.pass && fc.pass;
    Finding ft;
    ft.assumption = "chi-threshold (chi_N > threshold)";
    ft.observed = rep.chi_N;
    if (basics && std::isfinite(gamma) && gamma > 1.0) {
        rep.gamma_used = gamma;
        rep.chi_threshold = chi_threshold(mp, gamma);
        rep.chi_threshold_strict = chi_threshold_strict(mp, gamma);
        ft.required = rep.chi_threshold;
        ft.pass = rep.chi_N > rep.chi_threshold;
    } else {
        ft.required = std::numeric_limits<double>::quiet_NaN();
        ft.pass = false;
        ft.detail = "not evaluated: prior assumption failed or no admissible gamma";
    }
    rep.findings.push_back(ft);
    return rep;
}

DerivedParams derive(const ModelParams& mp, double gamma) {
    require_finite(mp);
    if (!std::isfinite(gamma)) throw input_error("derive: gamma must be finite");

    DerivedParams dp;
    dp.model = mp;
    dp.gamma_max = gamma_bound(mp); // throws infeasible_error when empty
    if (!(gamma > 1.0 && gamma < dp.gamma_max)) {
        std::ostringstream os;
        os << "derive: gamma=" << gamma << " outside (1, " << dp.gamma_max << ")";
        throw precondition_error(os.str());
    }
    dp.gamma = gamma;
    dp.chi_N = mp.chi * std::pow(double(mp.N), -mp.p);
    dp.theta = (3.0 - mp.p) / 2.0;
    dp.rho1 = 0.5;
    dp.rho2 = rho2_of_gamma(gamma);
    dp.kappa = 1.0 + gamma;
    dp.chi_threshold = chi_threshold(mp, gamma);

    const double e1 = dp.chi_N * gamma * (1.0 - dp.theta) / std::pow(2.0, mp.p);
    const double e2 = dp.chi_N * gamma * (mp.p - 1.0) / 2.0;
    const double bracket =
        dp.chi_N * (mp.M / 2.0 - 3.0) * std::pow(4.0 / 3.0, mp.p - 2.0) -
        2.0 * (1.0 + gamma) * std::pow(dp.rho2, 2.0 - 2.0 / mp.N) /
            ((dp.rho2 - dp.rho1) * (1.0 - dp.rho2));
    const double e3 =
        (mp.p - 1.0) * std::pow(dp.rho1, gamma * (mp.p - 1.0) / 2.0) * bracket;
    dp.epsilon = std::min(std::min(e1, e2), e3);
    if (!(dp.epsilon > 0.0)) {
        std::ostringstream os;
        os << "derive: epsilon=" << dp.epsilon << " <= 0 (chi too small relative to M)";
        throw infeasible_error(os.str());
    }
    dp.T_max = 1.0 / dp.epsilon;
    return dp;
}

DerivedParams derive(const ModelParams& mp) {
    return derive(mp, default_gamma(mp));
}

namespace {

void check_time(double t, const DerivedParams& dp) {
    if (!std::isfinite(t) || t < 0.0 || t > dp.T_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "time " << t << " outside [0, T_max=" << dp.T_max << "]";
        throw std::domain_error(os.str());
    }
}

} // namespace

double a_of_t(double t, const DerivedParams& dp) {
    check_time(t, dp);
    const double base = std::max(0.0, 1.0 - dp.epsilon * t);
    return std::pow(base, 1.0 / (1.0 - dp.theta));
}

double a_prime_of_t(double t, const DerivedParams& dp) {
    check_time(t, dp);
    return -dp.epsilon / (1.0 - dp.theta) * std::pow(a_of_t(t, dp), dp.theta);
}

double beta_of_t(double t, const DerivedParams& dp) {
    check_time(t, dp);
    const double w = std::pow(2.0, -dp.gamma);
    return 2.0 * w / (w + a_of_t(t, dp));
}

} // namespace fluxlim
