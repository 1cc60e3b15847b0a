#pragma once

#include <string>
#include <vector>

#include "fluxlim/config.hpp"

namespace fluxlim {

// Exit codes shared by the CLI:
//   0 success, 2 validation failure, 3 certificate/property failure,
//   5 no blow-up within horizon, 6 comparison violation, 7 stalled,
//   64 usage/config error.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation_failed = 2;
inline constexpr int certificate_failed = 3;
inline constexpr int no_blowup = 5;
inline constexpr int comparison_violated = 6;
inline constexpr int stalled = 7;
inline constexpr int usage = 64;
} // namespace exit_code

int cmd_validate(const ExperimentConfig& cfg);
int cmd_certify(const ExperimentConfig& cfg);
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values);
int cmd_proptest(const ExperimentConfig& cfg);

} // namespace fluxlim
