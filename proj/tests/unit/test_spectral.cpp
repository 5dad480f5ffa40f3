#include "qgibbs/hamiltonian.hpp"
#include "qgibbs/rng.hpp"
#include "qgibbs/spectral.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace qgibbs;

namespace {

Matrix z_half() {
  Matrix z(2, 2);
  z << 0.5, 0, 0, -0.5;
  return z;
}

Matrix pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

Matrix random_matrix(Eigen::Index d, Rng& rng) {
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
  return m;
}

Matrix random_hermitian(Eigen::Index d, Rng& rng) {
  const Matrix m = random_matrix(d, rng);
  return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("eigenvalues of small examples") {
  const auto dec = eig_hermitian(z_half());
  CHECK(dec.eigenvalues(0) == doctest::Approx(-0.5));
  CHECK(dec.eigenvalues(1) == doctest::Approx(0.5));
  const auto id = eig_hermitian(Matrix::Identity(4, 4));
  CHECK((id.eigenvalues.array() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("eigenvalues match power-sum moments of the Kronecker matrix") {
  const Matrix h = to_dense(build_model("mfi", Lattice::chain(4)));
  const auto dec = eig_hermitian(h);
  Matrix power = Matrix::Identity(16, 16);
  for (int p = 1; p <= 4; ++p) {
    power = power * h;
    const double moment = power.trace().real();
    const double from_eigs = dec.eigenvalues.array().pow(p).sum();
    CHECK(std::abs(moment - from_eigs) <= 1e-9 * std::max(1.0, std::abs(moment)));
  }
  const Matrix rebuilt = dec.eigenvectors * dec.eigenvalues.cast<cplx>().asDiagonal() * dec.eigenvectors.adjoint();
  CHECK((rebuilt - h).norm() < 1e-12);
}

TEST_CASE("eigensolver refuses invalid input") {
  Matrix nh(2, 2);
  nh << 0, 1, 0, 0;
  CHECK_THROWS_AS(eig_hermitian(nh), InvalidArgument);
  CHECK_THROWS_AS(eig_hermitian(Matrix::Identity(8192, 1)), InvalidArgument);
}

TEST_CASE("Bohr frequencies") {
  const auto dz = eig_hermitian(z_half());
  auto b = bohr_spectrum(dz, default_bohr_tolerance(dz));
  REQUIRE(b.frequencies.size() == 3);
  CHECK(b.frequencies[0] == doctest::Approx(-1));
  CHECK(b.frequencies[1] == doctest::Approx(0));
  CHECK(b.frequencies[2] == doctest::Approx(1));

  const auto di = eig_hermitian(Matrix::Identity(4, 4));
  CHECK(bohr_spectrum(di, default_bohr_tolerance(di)).frequencies.size() == 1);

  const auto d2 = eig_hermitian(to_dense(build_model("mfi", Lattice::chain(2))));
  auto b2 = bohr_spectrum(d2, default_bohr_tolerance(d2));
  std::vector<double> gaps;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gaps.push_back(d2.eigenvalues(i) - d2.eigenvalues(j));
  std::sort(gaps.begin(), gaps.end());
  std::vector<double> distinct;
  for (double g : gaps)
    if (distinct.empty() || g - distinct.back() > 1e-9) distinct.push_back(g);
  REQUIRE(distinct.size() == b2.frequencies.size());
  for (std::size_t k = 0; k < distinct.size(); ++k) CHECK(b2.frequencies[k] == doctest::Approx(distinct[k]));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(b2.frequency_of(i, j) == doctest::Approx(d2.eigenvalues(i) - d2.eigenvalues(j)));
}

TEST_CASE("frequency components") {
  const auto dec = eig_hermitian(z_half());
  const auto b = bohr_spectrum(dec, default_bohr_tolerance(dec));
  const double tol = default_bohr_tolerance(dec);
  Matrix up(2, 2), down(2, 2);
  up << 0, 1, 0, 0;
  down << 0, 0, 1, 0;
  CHECK((frequency_component(pauli_x(), dec, b, 1.0, tol) - up).norm() < 1e-14);
  CHECK((frequency_component(pauli_x(), dec, b, -1.0, tol) - down).norm() < 1e-14);
  CHECK(frequency_component(pauli_x(), dec, b, 0.0, tol).norm() < 1e-14);
  // A commuting with H lives at nu = 0.
  CHECK((frequency_component(z_half(), dec, b, 0.0, tol) - z_half()).norm() < 1e-14);
  CHECK(frequency_component(z_half(), dec, b, 1.0, tol).norm() < 1e-14);
}

TEST_CASE("components sum to the operator and satisfy the adjoint relation") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix h = random_hermitian(8, rng);
    const Matrix a = random_matrix(8, rng);
    const auto dec = eig_hermitian(h);
    const double tol = default_bohr_tolerance(dec);
    const auto b = bohr_spectrum(dec, tol);
    Matrix sum = Matrix::Zero(8, 8);
    for (double nu : b.frequencies) {
      const Matrix anu = frequency_component(a, dec, b, nu, tol);
      sum += anu;
      const Matrix adag_minus = frequency_component(a.adjoint(), dec, b, -nu, tol);
      CHECK((anu.adjoint() - adag_minus).norm() < 1e-10);
    }
    CHECK((sum - a).cwiseAbs().rowwise().sum().maxCoeff() <= 1e-9 * a.cwiseAbs().rowwise().sum().maxCoeff());
    CHECK((weighted_components(a, dec, b, [](double) { return cplx(1.0); }) - a).norm() < 1e-10);
  }
}

TEST_CASE("components are invariant under re-mixing degenerate eigenvectors") {
  const Matrix h = to_dense(build_model("xxz", Lattice::chain(4), {{"delta", 1.0}}));
  Rng rng(5);
  const Matrix a = random_matrix(16, rng);
  auto dec = eig_hermitian(h);
  const auto w = [](double nu) { return cplx(std::exp(-nu * nu)); };
  const auto b = bohr_spectrum(dec, default_bohr_tolerance(dec));
  const Matrix before = weighted_components(a, dec, b, w);
  // Rotate every degenerate block by a random unitary.
  Eigen::Index start = 0;
  while (start < dec.dim()) {
    Eigen::Index stop = start + 1;
    while (stop < dec.dim() && dec.eigenvalues(stop) - dec.eigenvalues(start) < 1e-9) ++stop;
    const Eigen::Index k = stop - start;
    if (k > 1) {
      const Matrix m = random_matrix(k, rng);
      const Eigen::HouseholderQR<Matrix> qr(m);
      const Matrix q = qr.householderQ();
      dec.eigenvectors.middleCols(start, k) = (dec.eigenvectors.middleCols(start, k) * q).eval();
    }
    start = stop;
  }
  CHECK((weighted_components(a, dec, b, w) - before).norm() < 1e-10);
}

TEST_CASE("hermitian functions") {
  Rng rng(3);
  const Matrix h = random_hermitian(6, rng);
  const auto dec = eig_hermitian(h);
  CHECK((hermitian_function(dec, [](double l) { return cplx(l); }) - h).norm() < 1e-12);
  CHECK((hermitian_function(dec, [](double l) { return std::exp(-kI * l * 0.0); }) - Matrix::Identity(6, 6)).norm() <
        1e-12);
  const Matrix u = hermitian_function(dec, [](double l) { return std::exp(-kI * l * 0.8); });
  CHECK((u.adjoint() * u - Matrix::Identity(6, 6)).norm() <= 1e-9 * 6);

  const auto dz = eig_hermitian(z_half());
  const Matrix uz = hermitian_function(dz, [](double l) { return std::exp(-kI * l * std::numbers::pi); });
  CHECK(std::abs(uz(0, 0) - std::exp(-kI * std::numbers::pi / 2.0)) < 1e-14);
  CHECK(std::abs(uz(1, 1) - std::exp(kI * std::numbers::pi / 2.0)) < 1e-14);

  const Matrix g = hermitian_function(dec, [](double l) { return cplx(std::exp(-l)); });
  const Matrix rho = g / g.trace();
  CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
  CHECK(eig_hermitian(Matrix(0.5 * (rho + rho.adjoint()))).eigenvalues.minCoeff() >= -1e-15);
}
