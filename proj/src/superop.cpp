#include "qgibbs/superop.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace qgibbs {

Matrix generator_superop(const Matrix& k, const std::vector<Matrix>& jumps) {
  const auto d = k.rows();
  const Matrix id = Matrix::Identity(d, d);
  Matrix s = Eigen::kroneckerProduct(id, k).eval();
  s += Eigen::kroneckerProduct(k.conjugate(), id).eval();
  for (const auto& l : jumps) s += Eigen::kroneckerProduct(l.conjugate(), l).eval();
  return s;
}

Matrix lindblad_superop(const Matrix& l, const Matrix& g) {
  const Matrix k = -kI * g - 0.5 * l.adjoint() * l;
  return generator_superop(k, {l});
}

Matrix kraus_superop(const std::vector<Matrix>& kraus) {
  require(!kraus.empty(), "empty Kraus list");
  const auto d = kraus.front().rows();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& k : kraus) s += Eigen::kroneckerProduct(k.conjugate(), k).eval();
  return s;
}

Matrix superop_from_map(Eigen::Index d, const std::function<Matrix(const Matrix&)>& map) {
  Matrix s(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = 1;
      Matrix out = map(e);
      s.col(i + d * j) = Eigen::Map<const Vector>(out.data(), d * d);
    }
  return s;
}

Matrix apply_dense_superop(const Matrix& s, const Matrix& x) {
  const auto d = x.rows();
  require(s.rows() == d * d && x.cols() == d, "superoperator dimension mismatch");
  Vector v = s * Eigen::Map<const Vector>(x.data(), d * d);
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix expm(const Matrix& m) { return m.exp(); }
RMatrix expm(const RMatrix& m) { return m.exp(); }

Matrix choi_matrix(const Matrix& superop) {
  const auto d2 = superop.rows();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d2))));
  require(d * d == d2 && superop.cols() == d2, "superoperator must be d^2 x d^2");
  Matrix j(d * d, d * d);
  for (Eigen::Index b = 0; b < d; ++b)
    for (Eigen::Index a = 0; a < d; ++a) {
      const Eigen::Index col = a + d * b;
      for (Eigen::Index y = 0; y < d; ++y)
        for (Eigen::Index x = 0; x < d; ++x)
          j(a * d + x, b * d + y) = superop(x + d * y, col) / static_cast<double>(d);
    }
  return j;
}

std::pair<double, double> diamond_bounds(const Matrix& s1, const Matrix& s2) {
  require(s1.rows() == s2.rows() && s1.cols() == s2.cols(), "channel dimension mismatch");
  Matrix dj = choi_matrix(s1 - s2);
  dj = 0.5 * (dj + dj.adjoint()).eval();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s1.rows()))));
  Eigen::SelfAdjointEigenSolver<Matrix> es(dj);
  const RVector lam = es.eigenvalues();
  const double lower = lam.cwiseAbs().sum();
  const Matrix abs_j = es.eigenvectors() * lam.cwiseAbs().asDiagonal() * es.eigenvectors().adjoint();
  Matrix reduced = Matrix::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index x = 0; x < d; ++x) reduced(a, b) += abs_j(a * d + x, b * d + x);
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> er(reduced, Eigen::EigenvaluesOnly);
  const double upper = static_cast<double>(d) * er.eigenvalues().cwiseAbs().maxCoeff();
  return {lower, upper};
}

std::pair<double, double> induced_trace_norm_bounds(const Matrix& superop) {
  const auto d2 = superop.rows();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d2))));
  require(d * d == d2, "superoperator must be d^2 x d^2");
  double worst = 0;
  for (Eigen::Index c = 0; c < d2; ++c) {
    Eigen::Map<const Matrix> img(superop.col(c).data(), d, d);
    worst = std::max(worst, trace_norm(img));
  }
  return {worst, static_cast<double>(d) * worst};
}

double trace_norm_hermitian(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_norm_hermitian(const RMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

}  // namespace qgibbs
