#pragma once

// Superoperators in the column-major vectorization vec(A X B) = (B^T (x) A) vec(X).

#include "qgibbs/types.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace qgibbs {

/// Matrix of X -> K X + X K^dagger + sum_j L_j X L_j^dagger.
Matrix generator_superop(const Matrix& k, const std::vector<Matrix>& jumps);

/// Matrix of X -> -i[G, X] + L X L^dagger - 1/2 {L^dagger L, X}.
Matrix lindblad_superop(const Matrix& l, const Matrix& g);

/// sum_j conj(K_j) (x) K_j.
Matrix kraus_superop(const std::vector<Matrix>& kraus);

/// Superoperator of an arbitrary linear map on d x d matrices.
Matrix superop_from_map(Eigen::Index d, const std::function<Matrix(const Matrix&)>& map);

/// Apply a superoperator to a d x d matrix.
Matrix apply_dense_superop(const Matrix& s, const Matrix& x);

/// Matrix exponential (scaling and squaring Pade).
Matrix expm(const Matrix& m);
RMatrix expm(const RMatrix& m);

/// Normalized Choi matrix (1/d) sum_ij |i><j| (x) E(|i><j|); input factor first.
Matrix choi_matrix(const Matrix& superop);

/// Lower and upper bounds on the diamond distance between two channels:
/// lower = ||J(E1 - E2)||_1, upper = d * ||Tr_out |J(E1 - E2)| ||_inf.
std::pair<double, double> diamond_bounds(const Matrix& s1, const Matrix& s2);

/// Bounds (lower, upper) on the induced trace norm sup ||D(X)||_1 / ||X||_1
/// of a superoperator: max_ij ||D(|i><j|)||_1 and d times that.
std::pair<double, double> induced_trace_norm_bounds(const Matrix& superop);

/// Schatten-1 norm of a Hermitian matrix (sum of absolute eigenvalues).
double trace_norm_hermitian(const Matrix& m);
double trace_norm_hermitian(const RMatrix& m);

/// Schatten-1 norm of a general matrix via singular values.
double trace_norm(const Matrix& m);

}  // namespace qgibbs
