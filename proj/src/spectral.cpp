#include "qgibbs/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qgibbs {

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

SpectralDecomposition eig_hermitian(const Matrix& m) {
  require(m.rows() == m.cols(), "eigendecomposition needs a square matrix");
  if (m.rows() > (Eigen::Index{1} << kMaxDenseQubits))
    throw ResourceCapExceeded("eigendecomposition dimension " + std::to_string(m.rows()) +
                              " exceeds the cap of 4096");
  if (m.rows() == 0) return {};
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_defect(m) > 1e-10 * scale)
    throw InvalidArgument("eigendecomposition input is not Hermitian");
  if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<RMatrix> real_solver(m.real());
    if (real_solver.info() != Eigen::Success)
      throw ConvergenceFailure("Hermitian eigensolver did not converge");
    return {real_solver.eigenvalues(), real_solver.eigenvectors().cast<cplx>()};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw ConvergenceFailure("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double default_bohr_tolerance(const SpectralDecomposition& dec) {
  double norm = 0;
  if (dec.dim() > 0) norm = dec.eigenvalues.cwiseAbs().maxCoeff();
  return 1e-9 * std::max(1.0, norm);
}

BohrSpectrum bohr_spectrum(const SpectralDecomposition& dec, double tol) {
  require(tol > 0, "Bohr clustering tolerance must be positive");
  const int d = static_cast<int>(dec.dim());
  struct Gap {
    double value;
    int i, j;
  };
  std::vector<Gap> gaps;
  gaps.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      gaps.push_back({dec.eigenvalues(i) - dec.eigenvalues(j), i, j});
  std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
    if (a.value != b.value) return a.value < b.value;
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });

  BohrSpectrum out;
  out.cluster.resize(d, d);
  std::size_t start = 0;
  while (start < gaps.size()) {
    std::size_t end = start + 1;
    while (end < gaps.size() && gaps[end].value - gaps[end - 1].value <= tol) ++end;
    double sum = 0;
    std::vector<std::pair<int, int>> members;
    for (std::size_t k = start; k < end; ++k) {
      sum += gaps[k].value;
      members.emplace_back(gaps[k].i, gaps[k].j);
      out.cluster(gaps[k].i, gaps[k].j) = static_cast<int>(out.frequencies.size());
    }
    double mean = sum / static_cast<double>(end - start);
    // Diagonal pairs pin the zero cluster exactly.
    if (std::any_of(members.begin(), members.end(), [](auto p) { return p.first == p.second; }))
      mean = 0.0;
    out.frequencies.push_back(mean);
    out.pairs.push_back(std::move(members));
    start = end;
  }
  // Make the representative frequencies exactly antisymmetric.
  const std::size_t nf = out.frequencies.size();
  for (std::size_t k = 0; k < nf / 2; ++k) {
    const double v = 0.5 * (out.frequencies[nf - 1 - k] - out.frequencies[k]);
    out.frequencies[k] = -v;
    out.frequencies[nf - 1 - k] = v;
  }
  return out;
}

Matrix weighted_components(const Matrix& a, const SpectralDecomposition& dec,
                           const BohrSpectrum& bohr,
                           const std::function<cplx(double)>& weight) {
  require(a.rows() == dec.dim() && a.cols() == dec.dim(),
          "operator dimension does not match the decomposition");
  const auto& v = dec.eigenvectors;
  Matrix eb = v.adjoint() * a * v;
  std::vector<cplx> w(bohr.frequencies.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = weight(bohr.frequencies[k]);
  for (Eigen::Index j = 0; j < eb.cols(); ++j)
    for (Eigen::Index i = 0; i < eb.rows(); ++i) eb(i, j) *= w[bohr.cluster(i, j)];
  return v * eb * v.adjoint();
}

Matrix frequency_component(const Matrix& a, const SpectralDecomposition& dec,
                           const BohrSpectrum& bohr, double nu, double tol) {
  return weighted_components(a, dec, bohr, [nu, tol](double f) {
    return std::abs(f - nu) <= tol ? cplx{1.0} : cplx{0.0};
  });
}

Matrix hermitian_function(const SpectralDecomposition& dec,
                          const std::function<cplx(double)>& f) {
  Vector fv(dec.dim());
  for (Eigen::Index i = 0; i < dec.dim(); ++i) fv(i) = f(dec.eigenvalues(i));
  return dec.eigenvectors * fv.asDiagonal() * dec.eigenvectors.adjoint();
}

}  // namespace qgibbs
