#pragma once

#include <vector>

#include "fluxlim/params.hpp"

namespace fluxlim {

// Closed-form blow-up subsolution glued at rho1:
//   phi1(t,rho) = rho^gamma / (rho^gamma + a(t))                 on (0, rho1]
//   phi2(t,rho) = beta(t) (1 - rho + kappa (rho2-rho)_+ (rho-rho1)/(rho2-rho1))
//                                                                on (rho1, 1)
// together with the parabolic operator
//   L(phi) = phi_t - rho^((2N-2)/N) phi_rr
//            - chi_N rho^((2-p)(N-1)/N) (phi_r + M) |phi|^(p-2) phi,
// where |phi|^(p-2) phi is evaluated as sign(phi)|phi|^(p-1) so the p < 2
// power is continuous through phi = 0.
class Subsolution {
public:
    explicit Subsolution(DerivedParams dp);

    const DerivedParams& params() const { return dp_; }

    double phi1(double t, double rho) const; // rho > 0 (formal extension past rho1 allowed)
    double phi1_t(double t, double rho) const;
    double phi1_rho(double t, double rho) const;
    double phi1_rhorho(double t, double rho) const;

    enum class Side { left, right };

    double phi2(double t, double rho) const; // rho in [rho1, 1]
    double phi2_t(double t, double rho) const;
    // One-sided at the rho2 gradient kink; elsewhere both sides agree.
    double phi2_rho(double t, double rho, Side side = Side::right) const;
    double phi2_rhorho(double t, double rho, Side side = Side::right) const;

    // Glued profile: 0 at the endpoints, phi1 on (0, rho1], phi2 on (rho1, 1).
    double phi(double t, double rho) const;

    // L at a non-kink interior point; throws std::domain_error at rho1/rho2.
    double L_eval(double t, double rho) const;

    // phi at every grid node for a fixed t; a(t), beta(t) evaluated once.
    void phi_nodes(double t, const std::vector<double>& rho, std::vector<double>& out) const;

    // (gamma+2)(2 gamma+1)/(4(gamma+1)^2), where the phi2 shape peaks.
    double phi2_argmax() const;
    // peak value coefficient: phi2_max = beta(t) (1 - q(gamma)).
    double phi2_max(double t) const;

private:
    DerivedParams dp_;
    double alpha_diff_; // (2N-2)/N
    double alpha_reac_; // (2-p)(N-1)/N
};

struct CertViolation {
    double t = 0.0, rho = 0.0, value = 0.0;
};

// Sampling certificate for L(phi) <= 0 plus the gluing structure at the kinks.
struct CertReport {
    double worst_L1 = 0.0; // max L(phi1) over the (0, rho1) samples
    double worst_L2 = 0.0; // max L(phi2) over the (rho1, 1) samples
    // max_t | phi2_rho(rho1+) - (gamma/rho1) phi1(t, rho1) |: the two closed
    // forms of the right slope whose agreement (kappa = 1 + gamma) glues phi.
    double c1_matching_error = 0.0;
    double jump_at_rho2 = 0.0;         // (right - left) phi_rho limit at rho2, t = 0
    double jump_rho2_rel_error = 0.0;  // max_t |jump(t) - kappa beta(t)| / beta(t)
    // gradient jump at rho1 must be nonnegative (subsolution-compatible) and
    // equals 2 gamma phi1(t, rho1)^2 in closed form.
    double jump_at_rho1_min = 0.0;
    double jump_rho1_closed_form_error = 0.0;
    std::vector<CertViolation> violations; // samples with L > tol, sorted by (t, rho)
    int rho_samples = 0;
    int t_samples = 0;
    double tol = 0.0;
    bool pass = false;
};

// Evaluates L on a log-spaced rho set in (1e-8, rho1) u (rho1, rho2) u
// (rho2, 1-1e-8) — kinks excluded by half-spacing — times a uniform t grid in
// [0, 0.99 T_max]. Throws precondition_error when dp fails its thresholds.
CertReport certify(const DerivedParams& dp, int rho_samples, int t_samples, double tol);

// Straight double loop, bit-identical result; kept as the reference the
// OpenMP kernel is tested against.
CertReport certify_reference(const DerivedParams& dp, int rho_samples, int t_samples,
                             double tol);

void write_cert_csv(const std::string& path, const CertReport& rep);

} // namespace fluxlim
