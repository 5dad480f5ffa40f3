#include "qgibbs/hamiltonian.hpp"
#include "qgibbs/spectral.hpp"

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

using namespace qgibbs;

namespace {

// Independent Kronecker assembly: one 2x2 factor per site, site 0 leftmost.
Matrix kron_oracle(const LocalHamiltonian& h) {
  const int n = h.lattice.size();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix total = Matrix::Zero(dim, dim);
  Matrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, cplx(0, -1), cplx(0, 1), 0;
  z << 1, 0, 0, -1;
  for (const auto& t : h.terms) {
    Matrix m = Matrix::Identity(1, 1);
    for (int s = 0; s < n; ++s) {
      Matrix f = Matrix::Identity(2, 2);
      const auto it = t.factors.find(s);
      if (it != t.factors.end()) f = it->second == Pauli::X ? x : it->second == Pauli::Y ? y : z;
      m = Eigen::kroneckerProduct(m, f).eval();
    }
    total += t.coefficient * m;
  }
  return total;
}

int count_terms(const LocalHamiltonian& h, std::size_t weight, Pauli p) {
  return static_cast<int>(std::count_if(h.terms.begin(), h.terms.end(), [&](const PauliString& t) {
    return t.factors.size() == weight && t.factors.begin()->second == p;
  }));
}

}  // namespace

TEST_CASE("mfi term counting") {
  const auto h = build_model("mfi", Lattice::chain(3));
  const auto p = default_model_params("mfi");
  CHECK(h.terms.size() == 9);
  CHECK(count_terms(h, 2, Pauli::Z) == 3);
  CHECK(count_terms(h, 1, Pauli::X) == 3);
  CHECK(count_terms(h, 1, Pauli::Z) == 3);
  for (const auto& t : h.terms) {
    if (t.factors.size() == 2) CHECK(t.coefficient == doctest::Approx(0.25));
    if (t.factors.size() == 1 && t.factors.begin()->second == Pauli::X)
      CHECK(t.coefficient == doctest::Approx(p.at("g") / 2));
    if (t.factors.size() == 1 && t.factors.begin()->second == Pauli::Z)
      CHECK(t.coefficient == doctest::Approx(p.at("h") / 2));
  }
  CHECK(h.translation_invariant);
  CHECK(h.locality() == 2);
}

TEST_CASE("xxz on an open pair") {
  const auto h = build_model("xxz", Lattice::chain(2, Boundary::open), {{"delta", 0.3}});
  REQUIRE(h.terms.size() == 3);
  std::vector<std::string> labels;
  for (const auto& t : h.terms) labels.push_back(t.label());
  CHECK(count_terms(h, 2, Pauli::X) == 1);
  CHECK(count_terms(h, 2, Pauli::Y) == 1);
  CHECK(count_terms(h, 2, Pauli::Z) == 1);
  for (const auto& t : h.terms)
    CHECK(t.coefficient == doctest::Approx(t.factors.begin()->second == Pauli::Z ? 0.3 / 4 : 0.25));
  CHECK(h.is_real());
}

TEST_CASE("a two-site periodic chain keeps a single bond") {
  const auto h = build_model("tfi1d", Lattice::chain(2));
  CHECK(count_terms(h, 2, Pauli::Z) == 1);
}

TEST_CASE("truncation") {
  const auto h = build_model("mfi", Lattice::chain(8));
  const auto t1 = truncate_hamiltonian(h, 0, 1);
  CHECK(t1.terms.size() == 8);
  CHECK(t1.support == Region{7, 0, 1});
  CHECK(truncate_hamiltonian(h, 3, 0).terms.size() == 2);
  CHECK(truncate_hamiltonian(h, 2, h.lattice.diameter()).terms.size() == h.terms.size());
  for (int r1 = 0; r1 <= 3; ++r1)
    for (int r2 = r1; r2 <= 4; ++r2) {
      const auto a = truncate_hamiltonian(h, 5, r1);
      const auto b = truncate_hamiltonian(h, 5, r2);
      for (const auto& t : a.terms) {
        const bool found = std::any_of(b.terms.begin(), b.terms.end(), [&](const PauliString& u) {
          return u.factors == t.factors && u.coefficient == t.coefficient;
        });
        CHECK(found);
      }
    }
}

TEST_CASE("truncated patches of a translation-invariant model share a spectrum") {
  const auto h = build_model("mfi", Lattice::chain(7));
  const auto ref = eig_hermitian(to_dense(truncate_hamiltonian(h, 0, 2))).eigenvalues;
  for (int a = 1; a < 7; ++a) {
    const auto ev = eig_hermitian(to_dense(truncate_hamiltonian(h, a, 2))).eigenvalues;
    CHECK((ev - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
  const auto h2 = build_model("tfim2d", Lattice::square(3, 3));
  const auto ref2 = eig_hermitian(to_dense(truncate_hamiltonian(h2, 0, 1))).eigenvalues;
  for (int a = 1; a < 9; ++a)
    CHECK((eig_hermitian(to_dense(truncate_hamiltonian(h2, a, 1))).eigenvalues - ref2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dense matrices") {
  const Lattice one = Lattice::chain(1, Boundary::open);
  LocalHamiltonian z{one, {{0.7, {{0, Pauli::Z}}}}, one.all_sites(), false};
  Matrix expect(2, 2);
  expect << 0.7, 0, 0, -0.7;
  CHECK((to_dense(z) - expect).norm() < 1e-15);
  LocalHamiltonian empty{Lattice::chain(3), {}, Lattice::chain(3).all_sites(), true};
  CHECK(to_dense(empty).norm() == 0.0);

  for (const std::string model : {"mfi", "xxz", "tfi1d"}) {
    const auto h = build_model(model, Lattice::chain(4));
    const Matrix d = to_dense(h);
    CHECK((d - kron_oracle(h)).norm() < 1e-13);
    CHECK(hermiticity_defect(d) < 1e-15);
    for (const auto& t : h.terms) CHECK(std::abs(pauli_string_dense(t, h.support).trace()) < 1e-14);
  }
  const auto h2 = build_model("tfim2d", Lattice::square(2, 3));
  CHECK((to_dense(h2) - kron_oracle(h2)).norm() < 1e-13);
}

TEST_CASE("expectations and Pauli application agree with dense algebra") {
  const auto h = build_model("xxz", Lattice::chain(4));
  const Region sup = h.support;
  Vector psi(16);
  for (int i = 0; i < 16; ++i) psi(i) = cplx(std::sin(1.3 * i + 0.2), std::cos(0.7 * i));
  psi.normalize();
  const Matrix rho = psi * psi.adjoint();
  for (const auto& t : h.terms) {
    const Matrix p = pauli_string_dense(t, sup);
    CHECK((apply_pauli_string(t, psi, sup) - p * psi).norm() < 1e-13);
    CHECK(std::abs(pauli_expectation(rho, t, sup) - (rho * p).trace()) < 1e-13);
  }
  CHECK(energy_expectation(rho, h) == doctest::Approx((rho * to_dense(h)).trace().real()).epsilon(1e-12));
}

TEST_CASE("mfi ground-state energy density at n = 12") {
  const auto h = build_model("mfi", Lattice::chain(12));
  const Matrix hd = to_dense(h);
  CHECK(hd.imag().norm() == 0.0);
  const Eigen::MatrixXd hr = hd.real();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hr, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() / 12 == doctest::Approx(-0.557).epsilon(0.001 / 0.557));
}

TEST_CASE("invalid model input") {
  CHECK_THROWS_AS(build_model("nope", Lattice::chain(3)), InvalidArgument);
  CHECK_THROWS_AS(build_model("mfi", Lattice::square(2, 2)), InvalidArgument);
  CHECK_THROWS_AS(build_model("mfi", Lattice::chain(3), {{"q", 1.0}}), InvalidArgument);
}
