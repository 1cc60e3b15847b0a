#pragma once

#include <string>
#include <vector>

#include "fluxlim/errors.hpp"

namespace fluxlim {

// Model constants of the chemotaxis system on the unit ball:
// density flux  -div(chi * u * |grad v|^(p-2) grad v),  -lap v = u - M.
struct ModelParams {
    int N = 3;          // space dimension, N > 2
    double p = 1.6;     // flux exponent, p in (N/(N-1), 2)
    double M = 8.0;     // mean initial density over the ball, M > 6
    double chi = 348.0; // chemotactic strength, chi > 0
};

struct Finding {
    std::string assumption; // short label of the violated/checked assumption
    bool pass = false;
    double observed = 0.0;
    double required = 0.0; // boundary value of the admissible range
    std::string detail;
};

struct ValidationReport {
    std::vector<Finding> findings;
    double gamma_used = 0.0;         // gamma at which the chi threshold was evaluated
    double chi_N = 0.0;              // chi * N^(-p)
    double chi_threshold = 0.0;      // gate actually enforced
    double chi_threshold_strict = 0.0; // stricter 2^(5-p) variant, reported only

    bool passed() const;
    std::string to_text() const;
};

// Everything derived from (N, p, M, chi) and the subsolution exponent gamma.
struct DerivedParams {
    ModelParams model;
    double chi_N = 0.0;
    double gamma = 0.0;
    double gamma_max = 0.0; // upper bound on admissible gamma
    double theta = 0.0;     // (3-p)/2
    double epsilon = 0.0;
    double T_max = 0.0;     // 1/epsilon, rescaled time units
    double rho1 = 0.5;
    double rho2 = 0.0;      // (2+gamma)/(2(1+gamma))
    double kappa = 0.0;     // 1+gamma
    double chi_threshold = 0.0;
};

// q(gamma) = (gamma+2)(3 gamma/2 + 1) / (4 (gamma+1)^2); decreasing on [1,inf),
// q(1) = 15/32, limit 3/8. Always above the 1/3 (and 1/5) requirement, which is
// why the gamma* cap never binds and is treated as +inf.
double q_of_gamma(double gamma);

double rho2_of_gamma(double gamma);

// min{ 1+(2-p)/(N(p-1)), chi_N/2 - 1, 1+(M-6)/4, (N+1)/N }; throws
// infeasible_error when the bound does not exceed 1 (no admissible gamma).
double gamma_bound(const ModelParams& mp);

// 0.99 * gamma_bound: as large as safely admissible, maximizing subsolution mass.
double default_gamma(const ModelParams& mp);

// Minimal admissible chi_N, max{4, rho2^(2-2/N) * 4 (1+gamma) / ((rho2-1/2)(1-rho2)(M-6)) * (4/3)^(2-p)}.
double chi_threshold(const ModelParams& mp, double gamma);
// The 2^(5-p) variant of the same constant; stricter, surfaced as a diagnostic.
double chi_threshold_strict(const ModelParams& mp, double gamma);

ValidationReport validate_model(const ModelParams& mp);
ValidationReport validate_model(const ModelParams& mp, double gamma);

DerivedParams derive(const ModelParams& mp, double gamma);
DerivedParams derive(const ModelParams& mp); // with default_gamma

// a(t) = (1 - eps t)^(1/(1-theta)): strictly decreasing, a(0)=1, a(T_max)=0.
double a_of_t(double t, const DerivedParams& dp);
// a'(t) = -(eps/(1-theta)) a(t)^theta.
double a_prime_of_t(double t, const DerivedParams& dp);
// beta(t) = 2*2^(-gamma) / (2^(-gamma) + a(t)): increasing, beta <= 2.
double beta_of_t(double t, const DerivedParams& dp);

} // namespace fluxlim
