#pragma once

#include "qgibbs/compiler.hpp"
#include "qgibbs/evolution.hpp"
#include "qgibbs/hamiltonian.hpp"
#include "qgibbs/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace qgibbs {

/// Single-qubit gates see p1 = 0.1 p, two-qubit gates p2 = p.
struct DepolarizingModel {
  double p = 0.0;

  double p1() const { return 0.1 * p; }
  double p2() const { return p; }
  double rate(int k) const { return k == 1 ? p1() : p2(); }
};

/// N_k(rho) = (1 - p) rho + p/(4^k - 1) sum_{P != I} P rho P on the qubits at
/// `positions` of the register.
Matrix depolarize(const Matrix& rho, std::span<const int> positions, double p);

/// Pauli-twirl form on a state vector: with probability p apply a uniformly
/// drawn non-identity Pauli string on `positions`.
void depolarize_sample(Vector& psi, std::span<const int> positions, double p, Rng& rng);

/// System superoperator of a compiled gadget: ancilla prepared in |0>, every
/// gate followed by depolarizing noise on its qubits, ancilla traced out.
Matrix noisy_gadget_superop(const TemplateCircuit& tpl, const Eigen::VectorXd& theta,
                            const DepolarizingModel& model);

struct NoisyRunOptions {
  int n_circuits = 1000;
  /// Shots per circuit, split evenly over the measurement bases; 0 gives
  /// exact expectation values.
  int shots = 1024;
  std::uint64_t seed = 0;
};

struct NoisyRunResult {
  double energy = 0.0;           // total energy estimate
  double stderr_energy = 0.0;    // circuit-to-circuit standard error
  double energy_density = 0.0;
  double stderr_density = 0.0;
};

// Pauli-vector representation: r_P = tr(P rho) over the 4^n Pauli strings,
// one base-4 digit per qubit (I=0, X=1, Y=2, Z=3), qubit 0 most significant.

/// Index of a Pauli string on an n-qubit register (sites are qubit positions).
std::size_t pauli_index(const PauliString& p, int n);

RVector pauli_vector(const Matrix& rho);
Matrix density_from_pauli(const RVector& r);

/// R_PQ = tr(P Phi(Q)) / 2^k for a column-major superoperator on k qubits.
RMatrix pauli_transfer_matrix(const Matrix& superop);

/// r <- R r on the qubits at `positions` of an n-qubit register.
void apply_ptm(RVector& r, const RMatrix& ptm, std::span<const int> positions, int n);

/// Outcome distribution of measuring every qubit in the X, Y or Z basis
/// (+1 eigenvector -> bit 0).
RVector basis_distribution(const RVector& r, int n, Pauli basis);

/// Exact energy from a Pauli vector.
double pauli_energy(const RVector& r, const LocalHamiltonian& h);

/// Energy estimate from `shots` samples split evenly over the measurement
/// bases the terms need. Every term must use a single Pauli type.
double sample_energy(const RVector& r, const LocalHamiltonian& h, int shots, Rng& rng);

/// Pauli transfer matrix of the channel for (site, alpha), laid out on
/// `positions[site]`.
using ChannelProvider = std::function<const RMatrix&(int site, int alpha)>;

/// Random circuits (alpha uniform per site and step, keyed by (seed, circuit)),
/// each evolved exactly from rho0 and then measured with finite shots.
NoisyRunResult noisy_trajectory_run(const LocalHamiltonian& h, const ChannelProvider& channel,
                                    const std::vector<std::vector<int>>& positions, const Matrix& rho0,
                                    const TrotterPlan& plan, const NoisyRunOptions& opts);

}  // namespace qgibbs
