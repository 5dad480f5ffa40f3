#pragma once

#include "qgibbs/hamiltonian.hpp"
#include "qgibbs/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace qgibbs {

struct EnergyMetrics {
  double energy = 0.0;        // tr(rho H) / n
  double delta = 0.0;         // |tr(rho H) - tr(rho_ref H)| / n
  double reference = 0.0;     // tr(rho_ref H) / n
  double relative() const { return delta / std::abs(reference); }
};

EnergyMetrics energy_metrics(const Matrix& rho, const LocalHamiltonian& h, const Matrix& rho_ref);

/// <S_a S_b> - <S_a><S_b> with S = Z/2 on a full-lattice density matrix.
double two_point_correlator(const Matrix& rho, int a1, int a2);

/// Correlators for the pairs (n/2, n/2 + l), l = 1..max_separation (wrapping
/// modulo n).
std::vector<double> correlator_profile(const Matrix& rho, int max_separation);

/// beta^2 (tr(rho H^2) - tr(rho H)^2) with the dense H.
double heat_capacity(const Matrix& rho, const Matrix& h_dense, double beta);
double heat_capacity(const Matrix& rho, const LocalHamiltonian& h, double beta);

/// Gibbs heat capacity from the eigenvalues of H (energy moments).
double gibbs_heat_capacity(const Eigen::VectorXd& energies, double beta);

struct CorrelationFit {
  double length = 0.0;    // l0 = -1 / slope
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms residual of log|delta|
  bool nonpositive_decay = false;
  int points = 0;
};

/// Least-squares fit of log|delta_l| against l for l = separations[i]; values
/// with |delta| <= 1e-12 are skipped.
CorrelationFit correlation_length_fit(const std::vector<double>& separations,
                                      const std::vector<double>& delta);

struct JackknifeEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Delete-one jackknife of f(mean of samples) over samples.
JackknifeEstimate jackknife(const std::vector<std::vector<double>>& samples,
                            const std::function<double(const std::vector<double>&)>& f);

}  // namespace qgibbs
