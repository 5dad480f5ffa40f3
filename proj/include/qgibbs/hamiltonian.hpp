#pragma once

#include "qgibbs/lattice.hpp"
#include "qgibbs/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace qgibbs {

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

/// 2x2 matrix of a single Pauli operator.
Matrix pauli_matrix(Pauli p);

/// Real coefficient times a tensor product of Paulis on distinct sites.
struct PauliString {
  double coefficient = 0.0;
  std::map<int, Pauli> factors;

  Region support() const;
  std::string label() const;  // e.g. "0.25*Z0Z1"
};

/// A Hamiltonian given as a sum of Pauli strings on a lattice.
///
/// `support` is the declared support of the operator: the full lattice for a
/// model, the ball for a truncated patch (field-free sites included).
struct LocalHamiltonian {
  Lattice lattice;
  std::vector<PauliString> terms;
  Region support;
  /// Set by the model builders when every lattice shift maps H onto itself.
  bool translation_invariant = false;

  /// Largest number of sites any single term acts on.
  int locality() const;
  /// True when every term is a real matrix (an even number of Y factors).
  bool is_real() const;
};

using ModelParams = std::map<std::string, double>;

/// Benchmark models. Spin operators are Pauli/2 so couplings carry explicit
/// 1/4 and 1/2 factors.
///   mfi    : sum ZZ/4 + g/2 sum X + h/2 sum Z          (D = 1)
///   tfi1d  : sum ZZ/4 + g/2 sum X                      (D = 1)
///   xxz    : sum (XX + YY + delta ZZ)/4                (D = 1)
///   tfim2d : sum ZZ/4 + g/2 sum X                      (D = 2)
LocalHamiltonian build_model(const std::string& name, const Lattice& lat,
                             const ModelParams& params = {});

/// Default parameters for a named model.
ModelParams default_model_params(const std::string& name);

/// Sum of all terms whose support lies inside ball(a, r).
LocalHamiltonian truncate_hamiltonian(const LocalHamiltonian& h, int a, int r);

/// Dense matrix of H on `support`; first site of the region is the most
/// significant bit.
Matrix to_dense(const LocalHamiltonian& h, const Region& support);
Matrix to_dense(const LocalHamiltonian& h);

/// Dense matrix of a single string on `support`.
Matrix pauli_string_dense(const PauliString& p, const Region& support);

/// Dense matrix of `op` (a single-site Pauli) placed at `site` inside `support`.
Matrix embed_single_site(const Matrix& op, int site, const Region& support);

/// tr(rho P) for a density matrix on `support`; P's sites must lie in it.
cplx pauli_expectation(const Matrix& rho, const PauliString& p, const Region& support);
double energy_expectation(const Matrix& rho, const LocalHamiltonian& h);

/// Apply a Pauli string to a state vector on `support`.
Vector apply_pauli_string(const PauliString& p, const Vector& psi, const Region& support);

}  // namespace qgibbs
