#pragma once

#include "qgibbs/dissipator.hpp"

#include <string>

namespace qgibbs {

struct SteadyStateOptions {
  /// Target for ||L(rho)||_1.
  double tol = 1e-8;
  /// Lattices up to this size use the dense superoperator null vector.
  int dense_max_sites = 6;
  int max_iterations = 4000;
  /// Krylov basis length per GMRES cycle (reduced further if memory is short).
  int restart = 30;
  /// Use lattice-shift symmetry in the matrix-vector product when available.
  bool use_translation = true;
  /// Bytes allowed for the Krylov basis.
  double memory_budget = 2.0e9;
  /// Initial guess: the Gibbs state of this Hamiltonian (default: maximally mixed).
  const LocalHamiltonian* initial_hamiltonian = nullptr;
};

struct SteadyStateResult {
  Matrix rho;
  /// ||L(rho)||_1 (exact for the dense path; an upper bound sqrt(N)||.||_F otherwise).
  double residual = 0.0;
  int iterations = 0;
  std::string method;
};

/// Fixed point of the generator, normalized to unit trace.
SteadyStateResult steady_state(const TruncatedLindbladian& lind, const SteadyStateOptions& opts = {});

/// L(X) for Hermitian X on the full lattice, using real arithmetic when every
/// generator is real-representable and X is real.
Matrix apply_generator_hermitian(const TruncatedLindbladian& lind, const Matrix& x);

}  // namespace qgibbs
