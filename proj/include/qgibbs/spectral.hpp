#pragma once

#include "qgibbs/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace qgibbs {

/// Eigen-system of a Hermitian matrix: ascending eigenvalues, unitary columns.
struct SpectralDecomposition {
  RVector eigenvalues;
  Matrix eigenvectors;

  Eigen::Index dim() const { return eigenvalues.size(); }
};

/// Distinct Bohr frequencies with the eigen-index pairs (i, j) realizing each
/// gap lambda_i - lambda_j (within the clustering tolerance).
struct BohrSpectrum {
  std::vector<double> frequencies;
  std::vector<std::vector<std::pair<int, int>>> pairs;
  /// cluster(i, j): index into `frequencies` of the gap lambda_i - lambda_j.
  Eigen::MatrixXi cluster;

  double frequency_of(int i, int j) const { return frequencies[cluster(i, j)]; }
};

/// Hermitian eigendecomposition (Householder tridiagonalization + implicit QL/QR).
/// Refuses non-Hermitian input and dimensions above the dense cap.
SpectralDecomposition eig_hermitian(const Matrix& m);

/// Default clustering tolerance: 1e-9 * max(1, ||H||_inf).
double default_bohr_tolerance(const SpectralDecomposition& dec);

/// Single-linkage clustering of the sorted gap multiset.
BohrSpectrum bohr_spectrum(const SpectralDecomposition& dec, double tol);

/// A_nu = sum over (i, j) with lambda_i - lambda_j = nu of P_i A P_j.
/// Returns zero when nu is not a Bohr frequency.
Matrix frequency_component(const Matrix& a, const SpectralDecomposition& dec,
                           const BohrSpectrum& bohr, double nu, double tol);

/// sum_nu w(nu) A_nu, evaluated in one pass in the eigenbasis.
Matrix weighted_components(const Matrix& a, const SpectralDecomposition& dec,
                           const BohrSpectrum& bohr,
                           const std::function<cplx(double)>& weight);

/// V f(Lambda) V^dagger.
Matrix hermitian_function(const SpectralDecomposition& dec,
                          const std::function<cplx(double)>& f);

/// Hermitian-part check used by several modules: max |M - M^dagger|.
double hermiticity_defect(const Matrix& m);

}  // namespace qgibbs
