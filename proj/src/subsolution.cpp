#include "fluxlim/subsolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fluxlim/csv.hpp"
#include "fluxlim/numerics.hpp"

namespace fluxlim {

Subsolution::Subsolution(DerivedParams dp) : dp_(std::move(dp)) {
    if (!(dp_.gamma > 1.0) || !(dp_.theta > 0.0) || !(dp_.epsilon > 0.0)) {
        throw input_error("Subsolution: derived parameters incomplete");
    }
    alpha_diff_ = (2.0 * dp_.model.N - 2.0) / dp_.model.N;
    alpha_reac_ = (2.0 - dp_.model.p) * (dp_.model.N - 1.0) / dp_.model.N;
}

double Subsolution::phi1(double t, double rho) const {
    if (!(rho > 0.0)) throw std::domain_error("phi1: rho must be positive");
    const double rg = std::pow(rho, dp_.gamma);
    return rg / (rg + a_of_t(t, dp_));
}

double Subsolution::phi1_t(double t, double rho) const {
    if (!(rho > 0.0)) throw std::domain_error("phi1_t: rho must be positive");
    const double rg = std::pow(rho, dp_.gamma);
    const double den = rg + a_of_t(t, dp_);
    return -rg * a_prime_of_t(t, dp_) / (den * den);
}

double Subsolution::phi1_rho(double t, double rho) const {
    if (!(rho > 0.0)) throw std::domain_error("phi1_rho: rho must be positive");
    const double a = a_of_t(t, dp_);
    const double rg = std::pow(rho, dp_.gamma);
    const double den = rg + a;
    return dp_.gamma * a * std::pow(rho, dp_.gamma - 1.0) / (den * den);
}

double Subsolution::phi1_rhorho(double t, double rho) const {
    if (!(rho > 0.0)) throw std::domain_error("phi1_rhorho: rho must be positive");
    const double a = a_of_t(t, dp_);
    const double g = dp_.gamma;
    const double rg = std::pow(rho, g);
    const double den = rg + a;
    return g *
           ((g - 1.0) * a * a * std::pow(rho, g - 2.0) -
            a * (g + 1.0) * std::pow(rho, 2.0 * g - 2.0)) /
           (den * den * den);
}

namespace {

void check_phi2_range(double rho, const DerivedParams& dp, const char* who) {
    if (!(rho >= dp.rho1 && rho <= 1.0)) {
        std::ostringstream os;
        os << who << ": rho=" << rho << " outside [" << dp.rho1 << ", 1]";
        throw std::domain_error(os.str());
    }
}

} // namespace

double Subsolution::phi2(double t, double rho) const {
    check_phi2_range(rho, dp_, "phi2");
    const double shape = 1.0 - rho +
                         dp_.kappa * std::max(dp_.rho2 - rho, 0.0) * (rho - dp_.rho1) /
                             (dp_.rho2 - dp_.rho1);
    return beta_of_t(t, dp_) * shape;
}

double Subsolution::phi2_t(double t, double rho) const {
    check_phi2_range(rho, dp_, "phi2_t");
    // beta'(t) = -2 * 2^(-gamma) a'(t) / (2^(-gamma) + a)^2
    const double w = std::pow(2.0, -dp_.gamma);
    const double a = a_of_t(t, dp_);
    const double bp = -2.0 * w * a_prime_of_t(t, dp_) / ((w + a) * (w + a));
    const double shape = 1.0 - rho +
                         dp_.kappa * std::max(dp_.rho2 - rho, 0.0) * (rho - dp_.rho1) /
                             (dp_.rho2 - dp_.rho1);
    return bp * shape;
}

double Subsolution::phi2_rho(double t, double rho, Side side) const {
    check_phi2_range(rho, dp_, "phi2_rho");
    const double b = beta_of_t(t, dp_);
    const bool inner = rho < dp_.rho2 || (rho == dp_.rho2 && side == Side::left);
    if (inner) {
        return -b * (1.0 + dp_.kappa * (2.0 * rho - dp_.rho1 - dp_.rho2) /
                               (dp_.rho2 - dp_.rho1));
    }
    return -b;
}

double Subsolution::phi2_rhorho(double t, double rho, Side side) const {
    check_phi2_range(rho, dp_, "phi2_rhorho");
    const bool inner = rho < dp_.rho2 || (rho == dp_.rho2 && side == Side::left);
    if (inner) return -2.0 * dp_.kappa * beta_of_t(t, dp_) / (dp_.rho2 - dp_.rho1);
    return 0.0;
}

double Subsolution::phi(double t, double rho) const {
    if (rho < 0.0 || rho > 1.0) throw std::domain_error("phi: rho outside [0,1]");
    if (rho == 0.0 || rho == 1.0) return 0.0;
    if (rho <= dp_.rho1) return phi1(t, rho);
    return phi2(t, rho);
}

double Subsolution::L_eval(double t, double rho) const {
    if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("L_eval: rho outside (0,1)");
    if (rho == dp_.rho1 || rho == dp_.rho2) {
        throw std::domain_error("L_eval: rho at a gradient kink; L is distributional there");
    }
    double ph, pt, pr, prr;
    if (rho < dp_.rho1) {
        ph = phi1(t, rho);
        pt = phi1_t(t, rho);
        pr = phi1_rho(t, rho);
        prr = phi1_rhorho(t, rho);
    } else {
        ph = phi2(t, rho);
        pt = phi2_t(t, rho);
        pr = phi2_rho(t, rho);
        prr = phi2_rhorho(t, rho);
    }
    const double reac = dp_.chi_N * std::pow(rho, alpha_reac_) * (pr + dp_.model.M) *
                        signed_pow(ph, dp_.model.p - 1.0);
    return pt - std::pow(rho, alpha_diff_) * prr - reac;
}

void Subsolution::phi_nodes(double t, const std::vector<double>& rho,
                            std::vector<double>& out) const {
    out.resize(rho.size());
    const double a = a_of_t(t, dp_);
    const double b = beta_of_t(t, dp_);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double r = rho[i];
        if (r <= 0.0 || r >= 1.0) {
            out[i] = 0.0;
        } else if (r <= dp_.rho1) {
            const double rg = std::pow(r, dp_.gamma);
            out[i] = rg / (rg + a);
        } else {
            out[i] = b * (1.0 - r +
                          dp_.kappa * std::max(dp_.rho2 - r, 0.0) * (r - dp_.rho1) /
                              (dp_.rho2 - dp_.rho1));
        }
    }
}

double Subsolution::phi2_argmax() const {
    const double g = dp_.gamma;
    return (g + 2.0) * (2.0 * g + 1.0) / (4.0 * (g + 1.0) * (g + 1.0));
}

double Subsolution::phi2_max(double t) const {
    return beta_of_t(t, dp_) * (1.0 - q_of_gamma(dp_.gamma));
}

namespace {

// Geometric midpoints of a geometric subdivision of [lo, hi], 0 < lo < hi.
// The extreme samples sit half a (log) spacing inside the ends, which is what
// keeps the kink points themselves out of the scan.
void geometric_midpoints(double lo, double hi, int count, std::vector<double>& out) {
    if (count <= 0) return;
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int j = 0; j < count; ++j) {
        out.push_back(std::exp(llo + (lhi - llo) * (j + 0.5) / count));
    }
}

std::vector<double> cert_rho_samples_set(const DerivedParams& dp, int rho_samples) {
    std::vector<double> rs;
    rs.reserve(rho_samples + 4);
    const int n1 = rho_samples / 2;
    const int n2 = (rho_samples - n1) / 2;
    const int n3 = rho_samples - n1 - n2;
    // (1e-8, rho1): log-spaced across the eight decades
    geometric_midpoints(1e-8, dp.rho1, n1, rs);
    // inner segments: approach each kink geometrically from both sides
    auto two_sided = [&rs](double a, double b, int count) {
        const double w = b - a;
        std::vector<double> off;
        geometric_midpoints(w * 1e-8, w, (count + 1) / 2, off);
        for (double o : off) rs.push_back(a + o * 0.999999);
        off.clear();
        geometric_midpoints(w * 1e-8, w, count / 2, off);
        for (double o : off) rs.push_back(b - o * 0.999999);
    };
    two_sided(dp.rho1, dp.rho2, n2);
    two_sided(dp.rho2, 1.0 - 1e-8, n3);
    std::sort(rs.begin(), rs.end());
    return rs;
}

void gate_thresholds(const DerivedParams& dp) {
    const auto rep = validate_model(dp.model, dp.gamma);
    if (!rep.passed()) {
        throw precondition_error("certify: parameters fail the structural thresholds:\n" +
                                 rep.to_text());
    }
    if (!(dp.gamma > 1.0 && dp.gamma < dp.gamma_max)) {
        throw precondition_error("certify: gamma outside its admissible range");
    }
    if (!(dp.epsilon > 0.0)) throw precondition_error("certify: epsilon <= 0");
}

// Kink-structure checks shared by both certify variants.
void fill_matching_checks(const Subsolution& sub, const std::vector<double>& ts,
                          CertReport& rep) {
    const auto& dp = sub.params();
    rep.c1_matching_error = 0.0;
    rep.jump_rho2_rel_error = 0.0;
    rep.jump_at_rho1_min = std::numeric_limits<double>::infinity();
    rep.jump_rho1_closed_form_error = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        const double b = beta_of_t(t, dp);
        const double p1 = sub.phi1(t, dp.rho1);
        // right slope two ways: the phi2 formula vs (gamma/rho1) phi1(t, rho1)
        const double right = sub.phi2_rho(t, dp.rho1, Subsolution::Side::right);
        rep.c1_matching_error =
            std::max(rep.c1_matching_error, std::abs(right - dp.gamma / dp.rho1 * p1));
        // gradient jump across rho2 against its closed form kappa beta(t)
        const double jump2 = sub.phi2_rho(t, dp.rho2, Subsolution::Side::right) -
                             sub.phi2_rho(t, dp.rho2, Subsolution::Side::left);
        if (k == 0) rep.jump_at_rho2 = jump2;
        rep.jump_rho2_rel_error =
            std::max(rep.jump_rho2_rel_error, std::abs(jump2 - dp.kappa * b) / b);
        // gradient jump across rho1: nonnegative, equals 2 gamma phi1(t,rho1)^2
        const double jump1 = right - sub.phi1_rho(t, dp.rho1);
        rep.jump_at_rho1_min = std::min(rep.jump_at_rho1_min, jump1);
        rep.jump_rho1_closed_form_error = std::max(
            rep.jump_rho1_closed_form_error, std::abs(jump1 - 2.0 * dp.gamma * p1 * p1));
    }
}

void finalize_report(CertReport& rep) {
    std::sort(rep.violations.begin(), rep.violations.end(),
              [](const CertViolation& a, const CertViolation& b) {
                  return a.t != b.t ? a.t < b.t : a.rho < b.rho;
              });
    rep.pass = rep.worst_L1 <= rep.tol && rep.worst_L2 <= rep.tol &&
               rep.c1_matching_error <= rep.tol && rep.jump_rho2_rel_error <= rep.tol &&
               rep.jump_at_rho1_min >= -rep.tol &&
               rep.jump_rho1_closed_form_error <= rep.tol;
}

std::vector<double> cert_t_samples_set(const DerivedParams& dp, int t_samples) {
    std::vector<double> ts(t_samples);
    for (int i = 0; i < t_samples; ++i) {
        ts[i] = t_samples == 1 ? 0.0 : 0.99 * dp.T_max * i / (t_samples - 1);
    }
    return ts;
}

} // namespace

CertReport certify_reference(const DerivedParams& dp, int rho_samples, int t_samples,
                             double tol) {
    if (rho_samples < 8 || t_samples < 1 || !(tol > 0.0)) {
        throw input_error("certify: need rho_samples >= 8, t_samples >= 1, tol > 0");
    }
    gate_thresholds(dp);
    const Subsolution sub(dp);
    const auto rs = cert_rho_samples_set(dp, rho_samples);
    const auto ts = cert_t_samples_set(dp, t_samples);

    CertReport rep;
    rep.rho_samples = static_cast<int>(rs.size());
    rep.t_samples = t_samples;
    rep.tol = tol;
    rep.worst_L1 = -std::numeric_limits<double>::infinity();
    rep.worst_L2 = -std::numeric_limits<double>::infinity();
    for (double t : ts) {
        for (double r : rs) {
            const double v = sub.L_eval(t, r);
            if (r < dp.rho1) {
                rep.worst_L1 = std::max(rep.worst_L1, v);
            } else {
                rep.worst_L2 = std::max(rep.worst_L2, v);
            }
            if (v > tol) rep.violations.push_back({t, r, v});
        }
    }
    fill_matching_checks(sub, ts, rep);
    finalize_report(rep);
    return rep;
}

CertReport certify(const DerivedParams& dp, int rho_samples, int t_samples, double tol) {
    if (rho_samples < 8 || t_samples < 1 || !(tol > 0.0)) {
        throw input_error("certify: need rho_samples >= 8, t_samples >= 1, tol > 0");
    }
    gate_thresholds(dp);
    const Subsolution sub(dp);
    const auto rs = cert_rho_samples_set(dp, rho_samples);
    const auto ts = cert_t_samples_set(dp, t_samples);

    CertReport rep;
    rep.rho_samples = static_cast<int>(rs.size());
    rep.t_samples = t_samples;
    rep.tol = tol;

    const long total = static_cast<long>(rs.size()) * t_samples;
    double worst1 = -std::numeric_limits<double>::infinity();
    double worst2 = -std::numeric_limits<double>::infinity();
    std::vector<CertViolation> violations;

#ifdef _OPENMP
#pragma omp parallel
    {
        std::vector<CertViolation> local;
#pragma omp for reduction(max : worst1, worst2) schedule(static)
        for (long idx = 0; idx < total; ++idx) {
            const double t = ts[idx / static_cast<long>(rs.size())];
            const double r = rs[idx % static_cast<long>(rs.size())];
            const double v = sub.L_eval(t, r);
            if (r < dp.rho1) {
                worst1 = std::max(worst1, v);
            } else {
                worst2 = std::max(worst2, v);
            }
            if (v > tol) local.push_back({t, r, v});
        }
#pragma omp critical
        violations.insert(violations.end(), local.begin(), local.end());
    }
#else
    for (long idx = 0; idx < total; ++idx) {
        const double t = ts[idx / static_cast<long>(rs.size())];
        const double r = rs[idx % static_cast<long>(rs.size())];
        const double v = sub.L_eval(t, r);
        if (r < dp.rho1) {
            worst1 = std::max(worst1, v);
        } else {
            worst2 = std::max(worst2, v);
        }
        if (v > tol) violations.push_back({t, r, v});
    }
#endif

    rep.worst_L1 = worst1;
    rep.worst_L2 = worst2;
    rep.violations = std::move(violations);
    fill_matching_checks(sub, ts, rep);
    finalize_report(rep);
    return rep;
}

void write_cert_csv(const std::string& path, const CertReport& rep) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open " + path + " for writing");
    out << "# worst_L1=" << csv::num(rep.worst_L1) << " worst_L2=" << csv::num(rep.worst_L2)
        << " c1_matching_error=" << csv::num(rep.c1_matching_error)
        << " jump_at_rho2=" << csv::num(rep.jump_at_rho2)
        << " jump_rho2_rel_error=" << csv::num(rep.jump_rho2_rel_error)
        << " jump_at_rho1_min=" << csv::num(rep.jump_at_rho1_min)
        << " jump_rho1_closed_form_error=" << csv::num(rep.jump_rho1_closed_form_error)
        << " rho_samples=" << rep.rho_samples << " t_samples=" << rep.t_samples
        << " tol=" << csv::num(rep.tol) << " pass=" << (rep.pass ? 1 : 0) << "\n";
    out << "t,rho,L_value\n";
    for (const auto& v : rep.violations) {
        out << csv::num(v.t) << "," << csv::num(v.rho) << "," << csv::num(v.value) << "\n";
    }
}

} // namespace fluxlim
