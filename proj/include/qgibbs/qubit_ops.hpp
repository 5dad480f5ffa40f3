#pragma once

// Kernels that apply operators acting on a few qubits to vectors, matrices and
// vectorized matrices on a larger register. Qubit position 0 is the most
// significant bit of a basis index.

#include "qgibbs/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qgibbs {

template <class Scalar>
using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Basis-index bookkeeping for an operator on `positions` of an `nq`-qubit
/// register. The operator's first qubit is its most significant bit.
struct SupportIndex {
  int nq = 0;
  std::vector<int> positions;
  std::vector<std::uint32_t> sup;  // op basis index -> full-register bits
  std::vector<std::uint32_t> env;  // environment index -> full-register bits
  bool leading = false;            // positions == {0, 1, ..., k-1}

  std::size_t d() const { return sup.size(); }
  std::size_t e() const { return env.size(); }
};

SupportIndex make_support_index(int nq, std::span<const int> positions);

namespace detail {
template <class M>
void adjoint_in_place(M& x) {
  if constexpr (Eigen::NumTraits<typename M::Scalar>::IsComplex)
    x.adjointInPlace();
  else
    x.transposeInPlace();
}
}  // namespace detail

/// X <- X (op (x) I).
template <class Scalar>
void right_apply(DynMatrix<Scalar>& x, const DynMatrix<Scalar>& op, const SupportIndex& idx) {
  const auto n = x.rows();
  const auto d = static_cast<Eigen::Index>(idx.d());
  const auto e = static_cast<Eigen::Index>(idx.e());
  require(x.cols() == d * e && op.rows() == d && op.cols() == d, "right_apply: dimension mismatch");
  if (idx.leading) {
    Eigen::Map<DynMatrix<Scalar>> view(x.data(), n * e, d);
    DynMatrix<Scalar> z = view * op;
    view = z;
    return;
  }
  DynMatrix<Scalar> y(n, d * e);
  for (Eigen::Index s = 0; s < d; ++s)
    for (Eigen::Index k = 0; k < e; ++k) y.col(s * e + k) = x.col(idx.sup[s] | idx.env[k]);
  Eigen::Map<DynMatrix<Scalar>> view(y.data(), n * e, d);
  DynMatrix<Scalar> z = view * op;
  Eigen::Map<DynMatrix<Scalar>> zv(z.data(), n, d * e);
  for (Eigen::Index s = 0; s < d; ++s)
    for (Eigen::Index k = 0; k < e; ++k) x.col(idx.sup[s] | idx.env[k]) = zv.col(s * e + k);
}

/// X <- (op (x) I) X.
template <class Scalar>
void left_apply(DynMatrix<Scalar>& x, const DynMatrix<Scalar>& op, const SupportIndex& idx) {
  detail::adjoint_in_place(x);
  DynMatrix<Scalar> opd = op.adjoint();
  right_apply<Scalar>(x, opd, idx);
  detail::adjoint_in_place(x);
}

/// psi <- (op (x) I) psi.
template <class Scalar>
void apply_to_vector(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& psi, const DynMatrix<Scalar>& op,
                     const SupportIndex& idx) {
  const auto d = static_cast<Eigen::Index>(idx.d());
  const auto e = static_cast<Eigen::Index>(idx.e());
  require(psi.size() == d * e && op.rows() == d, "apply_to_vector: dimension mismatch");
  DynMatrix<Scalar> b(d, e);
  for (Eigen::Index k = 0; k < e; ++k)
    for (Eigen::Index s = 0; s < d; ++s) b(s, k) = psi(idx.sup[s] | idx.env[k]);
  DynMatrix<Scalar> c = op * b;
  for (Eigen::Index k = 0; k < e; ++k)
    for (Eigen::Index s = 0; s < d; ++s) psi(idx.sup[s] | idx.env[k]) = c(s, k);
}

/// X <- Phi(X) where Phi acts on the support through its column-major
/// superoperator matrix (vec(A X B) = (B^T (x) A) vec(X)).
template <class Scalar>
void apply_superop(DynMatrix<Scalar>& x, const DynMatrix<Scalar>& superop,
                   const SupportIndex& idx) {
  const auto d = static_cast<Eigen::Index>(idx.d());
  const auto e = static_cast<Eigen::Index>(idx.e());
  require(x.rows() == d * e && x.cols() == d * e && superop.rows() == d * d,
          "apply_superop: dimension mismatch");
  DynMatrix<Scalar> b(d * d, e * e);
  for (Eigen::Index k2 = 0; k2 < e; ++k2)
    for (Eigen::Index s2 = 0; s2 < d; ++s2) {
      const auto col = idx.sup[s2] | idx.env[k2];
      for (Eigen::Index k1 = 0; k1 < e; ++k1)
        for (Eigen::Index s1 = 0; s1 < d; ++s1)
          b(s1 + d * s2, k1 + e * k2) = x(idx.sup[s1] | idx.env[k1], col);
    }
  DynMatrix<Scalar> c = superop * b;
  for (Eigen::Index k2 = 0; k2 < e; ++k2)
    for (Eigen::Index s2 = 0; s2 < d; ++s2) {
      const auto col = idx.sup[s2] | idx.env[k2];
      for (Eigen::Index k1 = 0; k1 < e; ++k1)
        for (Eigen::Index s1 = 0; s1 < d; ++s1)
          x(idx.sup[s1] | idx.env[k1], col) = c(s1 + d * s2, k1 + e * k2);
    }
}

/// Dense (op (x) I) on the full register. Small registers only.
Matrix embed_operator(const Matrix& op, const SupportIndex& idx);

/// Partial trace keeping the qubits at `keep` (in the given order).
Matrix partial_trace_keep(const Matrix& rho, int nq, std::span<const int> keep);

/// Qubit positions of `sites` inside a register listing `register_sites`.
std::vector<int> positions_in(std::span<const int> register_sites, std::span<const int> sites);

}  // namespace qgibbs
