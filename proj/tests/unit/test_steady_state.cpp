#include "qgibbs/steady_state.hpp"
#include "qgibbs/superop.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace qgibbs;

namespace {

TruncatedLindbladian gauss_lind(const LocalHamiltonian& h, double beta, int r) {
  return build_lindbladian(h, beta, r, Envelope{EnvelopeKind::gaussian, beta});
}

double distance(const Matrix& a, const Matrix& b) { return trace_norm_hermitian(Matrix(a - b)); }

}  // namespace

TEST_CASE("infinite temperature fixed point is maximally mixed") {
  const auto h = build_model("mfi", Lattice::chain(4));
  const auto ss = steady_state(gauss_lind(h, 0.0, 1));
  CHECK(distance(ss.rho, Matrix::Identity(16, 16) / 16.0) < 1e-9);
  CHECK(ss.residual <= 1e-8);
}

TEST_CASE("untruncated fixed point is the Gibbs state") {
  for (int n : {3, 4, 5}) {
    const auto h = build_model("mfi", Lattice::chain(n));
    const auto ss = steady_state(gauss_lind(h, 1.0, h.lattice.diameter()));
    CHECK(ss.method.rfind("dense", 0) == 0);
    CHECK(distance(ss.rho, gibbs_state(h, 1.0)) <= 1e-6);
    CHECK(std::abs(ss.rho.trace() - 1.0) < 1e-12);
  }
  const auto h2 = build_model("tfim2d", Lattice::square(2, 2));
  const auto ss = steady_state(gauss_lind(h2, 2.0, h2.lattice.diameter()));
  CHECK(distance(ss.rho, gibbs_state(h2, 2.0)) <= 1e-6);
}

TEST_CASE("iterative solver agrees with the dense null vector") {
  const auto h = build_model("mfi", Lattice::chain(5));
  const auto lind = gauss_lind(h, 1.0, 1);
  const auto dense = steady_state(lind);
  SteadyStateOptions o;
  o.dense_max_sites = 4;
  o.tol = 1e-10;
  for (bool translation : {false, true}) {
    o.use_translation = translation;
    const auto it = steady_state(lind, o);
    CHECK(it.method.rfind("gmres", 0) == 0);
    CHECK(distance(it.rho, dense.rho) < 1e-7);
  }
  const Matrix res = apply_generator(lind, dense.rho);
  CHECK(trace_norm_hermitian(Matrix(0.5 * (res + res.adjoint()))) <= 1e-8);
}

TEST_CASE("Hermitian generator application matches the general one") {
  const auto h = build_model("mfi", Lattice::chain(4));
  const auto lind = gauss_lind(h, 1.0, 1);
  const Matrix x = gibbs_state(h, 0.3);
  CHECK((apply_generator_hermitian(lind, x) - apply_generator(lind, x)).norm() < 1e-12);
}

TEST_CASE("distance to the Gibbs state does not grow with r (n = 8)") {
  const auto h = build_model("mfi", Lattice::chain(8));
  const Matrix gibbs = gibbs_state(h, 1.0);
  SteadyStateOptions o;
  o.initial_hamiltonian = &h;
  double prev = std::numeric_limits<double>::infinity();
  for (int r = 1; r <= 3; ++r) {
    const auto ss = steady_state(gauss_lind(h, 1.0, r), o);
    const double d = distance(ss.rho, gibbs);
    MESSAGE("r=" << r << " distance=" << d << " residual=" << ss.residual);
    CHECK(d <= prev);
    prev = d;
  }
}
