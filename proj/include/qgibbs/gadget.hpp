#pragma once

#include "qgibbs/types.hpp"

#include <utility>

namespace qgibbs {

/// O = [[sqrt(tau) G, L^dagger], [L, sqrt(tau) G]]; the ancilla is the block
/// index (most significant qubit).
Matrix dilation_operator(const Matrix& l, const Matrix& g, double tau);

/// U = exp(-i sqrt(tau) O).
Matrix gadget_unitary(const Matrix& l, const Matrix& g, double tau);

/// Kraus pair of the ancilla-traced gadget: K0 = <0|U|0>, K1 = <1|U|0>.
struct LocalChannel {
  Matrix k0;
  Matrix k1;

  Matrix superop() const;
  /// max |K0^dagger K0 + K1^dagger K1 - I|.
  double completeness_defect() const;
};

LocalChannel channel_from_unitary(const Matrix& u);
LocalChannel gadget_channel(const Matrix& l, const Matrix& g, double tau);

/// Superoperator of rho -> Tr_anc(U (|0><0| (x) rho) U^dagger) by explicit
/// conjugation and partial trace.
Matrix gadget_superop_by_partial_trace(const Matrix& u);

/// Diamond upper bound between the gadget channel and exp(tau L) for the term
/// X -> -i[G, X] + L X L^dagger - {L^dagger L, X}/2.
double dilation_distance_bound(const Matrix& l, const Matrix& g, double tau);

/// Both diamond bounds for the same comparison.
std::pair<double, double> gadget_error_bounds(const Matrix& l, const Matrix& g, double tau);

}  // namespace qgibbs
