#pragma once

#include "qgibbs/dissipator.hpp"

#include <string>
#include <vector>

namespace qgibbs {

enum class VerifyLevel { fast, full };

VerifyLevel parse_verify_level(const std::string& name);

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::fast;
  /// Test hook: drop the Boltzmann weight from the jump operators of the
  /// detailed-balance checks so they must fail.
  bool corrupt_jump_weight = false;
};

struct CheckResult {
  std::string name;
  double value = 0.0;
  std::string criterion;  // e.g. "<= 1e-08"
  bool pass = false;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool ok() const;
  std::string text() const;
};

VerifyReport run_verify(const VerifyOptions& opts);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Diamond upper bounds between M steps of the randomized-mean (or
/// deterministic) product formula at tau = t / M and exp(t L), per M.
std::vector<double> trotter_error_curve(const TruncatedLindbladian& lind, double t, const std::vector<int>& ms,
                                        bool randomized, double rescale_factor = 3.0);

/// Diamond upper bounds between the gadget channel and exp(tau L_term), per tau.
std::vector<double> gadget_error_curve(const LocalGenerator& g, const std::vector<double>& taus);

}  // namespace qgibbs
