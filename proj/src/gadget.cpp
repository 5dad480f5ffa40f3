#include "qgibbs/gadget.hpp"

#include "qgibbs/spectral.hpp"
#include "qgibbs/superop.hpp"

#include <cmath>

namespace qgibbs {

Matrix dilation_operator(const Matrix& l, const Matrix& g, double tau) {
  require(tau >= 0, "time step must be nonnegative");
  require(l.rows() == l.cols() && g.rows() == l.rows() && g.cols() == l.cols(),
          "dilation needs square L and G of equal size");
  const auto d = l.rows();
  const double st = std::sqrt(tau);
  Matrix o(2 * d, 2 * d);
  o.topLeftCorner(d, d) = st * g;
  o.bottomRightCorner(d, d) = st * g;
  o.topRightCorner(d, d) = l.adjoint();
  o.bottomLeftCorner(d, d) = l;
  return 0.5 * (o + o.adjoint());
}

Matrix gadget_unitary(const Matrix& l, const Matrix& g, double tau) {
  const auto dec = eig_hermitian(dilation_operator(l, g, tau));
  const double st = std::sqrt(tau);
  return hermitian_function(dec, [st](double x) { return std::exp(cplx{0.0, -st * x}); });
}

Matrix LocalChannel::superop() const { return kraus_superop({k0, k1}); }

double LocalChannel::completeness_defect() const {
  const Matrix c = k0.adjoint() * k0 + k1.adjoint() * k1;
  return (c - Matrix::Identity(c.rows(), c.cols())).cwiseAbs().maxCoeff();
}

LocalChannel channel_from_unitary(const Matrix& u) {
  require(u.rows() == u.cols() && u.rows() % 2 == 0, "gadget unitary must have even dimension");
  const auto d = u.rows() / 2;
  return {u.topLeftCorner(d, d), u.bottomLeftCorner(d, d)};
}

LocalChannel gadget_channel(const Matrix& l, const Matrix& g, double tau) {
  return channel_from_unitary(gadget_unitary(l, g, tau));
}

Matrix gadget_superop_by_partial_trace(const Matrix& u) {
  const auto d = u.rows() / 2;
  return superop_from_map(d, [&](const Matrix& x) {
    Matrix big = Matrix::Zero(2 * d, 2 * d);
    big.topLeftCorner(d, d) = x;
    const Matrix y = u * big * u.adjoint();
    return Matrix(y.topLeftCorner(d, d) + y.bottomRightCorner(d, d));
  });
}

std::pair<double, double> gadget_error_bounds(const Matrix& l, const Matrix& g, double tau) {
  if (tau == 0) return {0.0, 0.0};
  const Matrix exact = expm(Matrix(tau * lindblad_superop(l, g)));
  return diamond_bounds(gadget_channel(l, g, tau).superop(), exact);
}

double dilation_distance_bound(const Matrix& l, const Matrix& g, double tau) {
  return gadget_error_bounds(l, g, tau).second;
}

}  // namespace qgibbs
