#include "qgibbs/qubit_ops.hpp"
#include "qgibbs/rng.hpp"
#include "qgibbs/superop.hpp"

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>

using namespace qgibbs;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
  return m;
}

// Permutation matrix taking qubit order `perm` (new position p holds old qubit perm[p]).
Matrix permutation(int n, const std::vector<int>& perm) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix p = Matrix::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    Eigen::Index y = 0;
    for (int q = 0; q < n; ++q) {
      const int bit = (x >> (n - 1 - perm[static_cast<std::size_t>(q)])) & 1;
      y |= static_cast<Eigen::Index>(bit) << (n - 1 - q);
    }
    p(y, x) = 1;
  }
  return p;
}

// op on `positions` of n qubits, assembled as P^T (op (x) I) P.
Matrix embed_oracle(const Matrix& op, int n, const std::vector<int>& positions) {
  std::vector<int> perm = positions;
  for (int q = 0; q < n; ++q)
    if (std::find(positions.begin(), positions.end(), q) == positions.end()) perm.push_back(q);
  const Eigen::Index rest = Eigen::Index{1} << (n - static_cast<int>(positions.size()));
  const Matrix full = Eigen::kroneckerProduct(op, Matrix::Identity(rest, rest)).eval();
  const Matrix p = permutation(n, perm);
  return p.transpose() * full * p;
}

}  // namespace

TEST_CASE("embedding matches a permuted Kronecker product") {
  Rng rng(1);
  for (const std::vector<int>& pos : {std::vector<int>{0}, {2}, {3, 1}, {0, 1}, {4, 0, 2}, {1, 2, 3}}) {
    const Eigen::Index d = Eigen::Index{1} << pos.size();
    const Matrix op = random_matrix(d, d, rng);
    const auto idx = make_support_index(5, pos);
    CHECK((embed_operator(op, idx) - embed_oracle(op, 5, pos)).norm() < 1e-12);
  }
}

TEST_CASE("left, right and vector application") {
  Rng rng(2);
  for (const std::vector<int>& pos : {std::vector<int>{1}, {0, 1}, {3, 0}, {2, 4, 1}}) {
    const Eigen::Index d = Eigen::Index{1} << pos.size();
    const Matrix op = random_matrix(d, d, rng);
    const auto idx = make_support_index(5, pos);
    const Matrix full = embed_oracle(op, 5, pos);
    const Matrix x = random_matrix(32, 32, rng);
    Matrix l = x, r = x;
    left_apply<cplx>(l, op, idx);
    right_apply<cplx>(r, op, idx);
    CHECK((l - full * x).norm() < 1e-11);
    CHECK((r - x * full).norm() < 1e-11);
    Vector v = random_matrix(32, 1, rng);
    const Vector expect = full * v;
    apply_to_vector<cplx>(v, op, idx);
    CHECK((v - expect).norm() < 1e-11);
  }
}

TEST_CASE("superoperator application") {
  Rng rng(3);
  const std::vector<int> pos{3, 1};
  const Matrix a = random_matrix(4, 4, rng);
  const Matrix b = random_matrix(4, 4, rng);
  // X -> A X B as (B^T (x) A).
  const Matrix s = Eigen::kroneckerProduct(b.transpose(), a).eval();
  const auto idx = make_support_index(4, pos);
  Matrix x = random_matrix(16, 16, rng);
  const Matrix expect = embed_oracle(a, 4, pos) * x * embed_oracle(b, 4, pos);
  apply_superop<cplx>(x, s, idx);
  CHECK((x - expect).norm() < 1e-11);
}

TEST_CASE("partial trace") {
  Rng rng(4);
  const Matrix a = random_matrix(2, 2, rng), b = random_matrix(4, 4, rng);
  const Matrix ab = Eigen::kroneckerProduct(a, b).eval();
  CHECK((partial_trace_keep(ab, 3, std::vector<int>{1, 2}) - a.trace() * b).norm() < 1e-12);
  CHECK((partial_trace_keep(ab, 3, std::vector<int>{0}) - b.trace() * a).norm() < 1e-12);
  CHECK(positions_in(std::vector<int>{7, 0, 1}, std::vector<int>{1, 7}) == std::vector<int>{2, 0});
}
