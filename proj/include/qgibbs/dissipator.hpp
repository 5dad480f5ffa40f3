#pragma once

#include "qgibbs/hamiltonian.hpp"
#include "qgibbs/lattice.hpp"
#include "qgibbs/spectral.hpp"
#include "qgibbs/types.hpp"

#include <string>
#include <vector>

namespace qgibbs {

enum class EnvelopeKind { gaussian, flat, smoothed_mh, fixed_gaussian };

std::string to_string(EnvelopeKind k);
EnvelopeKind parse_envelope(const std::string& name);

/// Frequency-domain filter q(nu). All kinds are real and even in nu.
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::gaussian;
  double beta = 1.0;

  double operator()(double nu) const;
};

struct LindbladOptions {
  /// Jump operators are jump_scale * Pauli. 0.5 makes them spin operators,
  /// for which the beta = 0 generator is sum_a (tr_a(rho)/2 (x) I_a - rho).
  double jump_scale = 0.5;
  /// Include the e^{-beta nu / 4} weight in the jump operators. Switching it
  /// off breaks detailed balance and exists as a negative control.
  bool boltzmann_weight = true;
  /// Bohr clustering tolerance; <= 0 selects the default.
  double bohr_tol = 0.0;
};

/// One term L_{a,alpha}, G_{a,alpha} acting on `support` (first site = MSB).
struct LocalGenerator {
  int site = 0;
  Pauli alpha = Pauli::X;
  Region support;
  Matrix L;
  Matrix G;

  /// K = -iG - L^dagger L / 2, so that the term is X -> K X + X K^dagger + L X L^dagger.
  Matrix K() const;
};

struct TruncatedLindbladian {
  Lattice lattice;
  double beta = 0.0;
  int r = 0;
  Envelope envelope;
  LindbladOptions options;
  /// Ordered by site, then alpha in X, Y, Z order.
  std::vector<LocalGenerator> generators;
  /// Every lattice shift maps the set of generators onto itself.
  bool translation_invariant = false;

  int num_sites() const { return lattice.size(); }
  const LocalGenerator& at(int site, Pauli alpha) const;
  /// True when every K is real and every L is a phase times a real matrix.
  bool real_representable(double tol = 1e-12) const;
};

/// jump_scale times the Pauli alpha at `site`, embedded in `support`.
Matrix jump_source(Pauli alpha, int site, const Region& support, double jump_scale);

/// L = sum_nu q(nu) e^{-beta nu/4} A_nu over the Bohr frequencies of H_loc.
Matrix build_jump_operator(const Matrix& h_loc, const Matrix& a, double beta, const Envelope& q,
                           bool boltzmann_weight = true);
Matrix build_jump_operator(const Matrix& a, const SpectralDecomposition& dec,
                           const BohrSpectrum& bohr, double beta, const Envelope& q,
                           bool boltzmann_weight = true);

/// G = -(i/2) sum_nu tanh(-beta nu/4) (L^dagger L)_nu.
Matrix build_coherent_term(const Matrix& l, const SpectralDecomposition& dec,
                           const BohrSpectrum& bohr, double beta);

/// Generators for every site and alpha, built from H truncated to ball(a, r).
TruncatedLindbladian build_lindbladian(const LocalHamiltonian& h, double beta, int r,
                                       const Envelope& q, const LindbladOptions& opts = {});

/// Scale each site's L by phi_gauss / phi_q (mean Frobenius norm over alpha)
/// and its G by the square of that ratio.
TruncatedLindbladian renormalize_envelope(const TruncatedLindbladian& lind,
                                          const LocalHamiltonian& h);

/// d rho / dt for a density matrix on the full lattice (site s = qubit s).
Matrix apply_generator(const TruncatedLindbladian& lind, const Matrix& rho);

/// One term applied to an operator on its own support.
Matrix apply_local_term(const LocalGenerator& g, const Matrix& x);

/// Dense superoperator of one term on its support.
Matrix local_superop(const LocalGenerator& g);

/// Dense superoperator of sum_alpha L_{a,alpha} on the common support of site a.
Matrix site_superop(const TruncatedLindbladian& lind, int site);

/// Dense superoperator on the whole lattice. Small lattices only.
Matrix full_superop(const TruncatedLindbladian& lind);

/// X -> sum_a (tr_a(X)/2 (x) I_a - X) on n qubits.
Matrix depolarizing_generator_superop(int n);

/// e^{-beta H} / tr, computed with the spectrum shifted by its minimum.
Matrix gibbs_state(const Matrix& h_dense, double beta);
Matrix gibbs_state(const LocalHamiltonian& h, double beta);

/// Relative KMS residual of a superoperator against the Gibbs state of H:
/// max_j ||(S^dagger - Gamma^{-1} S Gamma) e_j|| / max_j ||S e_j||,
/// Gamma(X) = rho^{1/2} X rho^{1/2}. Refuses beta ||H|| > 50.
double kms_residual(const Matrix& superop, const Matrix& h_dense, double beta);

/// KMS residual of the full generator against the Gibbs state of `h`.
double kms_residual(const TruncatedLindbladian& lind, const LocalHamiltonian& h);

/// Max over terms of the KMS residual of each term against the Gibbs state of
/// the truncated patch it was built from.
double local_kms_residual(const TruncatedLindbladian& lind, const LocalHamiltonian& h);

// Time-domain representation of the Gaussian-envelope construction.

/// f(t) = sqrt(2/(pi beta^2)) exp((beta - 4it)^2 / (8 beta^2)).
cplx filter_time_domain(double beta, double t);
/// g2(t) = (2 sqrt 2 / beta) exp((beta - 4it)^2 / (4 beta^2)).
cplx kernel_g2(double beta, double t);
/// g1(t) = [-1/(pi beta cosh(2 pi t/beta))] * [(sqrt 2/beta) e^{1/4 - 4t^2/beta^2} sin(2t/beta)].
double kernel_g1(double beta, double t);
/// max over nu in [-nu_max, nu_max] of |int f(t) e^{-i nu t} dt - q(nu) e^{-beta nu/4}|.
double consistency_check(double beta, double nu_max = 8.0, int nu_points = 161);

}  // namespace qgibbs
