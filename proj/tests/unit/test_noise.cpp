#include "qgibbs/noise.hpp"
#include "qgibbs/gadget.hpp"
#include "qgibbs/qubit_ops.hpp"
#include "qgibbs/superop.hpp"

#include <doctest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cmath>
#include <numeric>

using namespace qgibbs;

namespace {

Matrix random_density(int n, Rng& rng) {
  const Eigen::Index d = Eigen::Index{1} << n;
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(rng.normal(), rng.normal());
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

Matrix single(int code) {
  Matrix m(2, 2);
  switch (code) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Explicit Pauli sum on the first two qubits of a 3-qubit register.
Matrix two_qubit_depolarize_oracle(const Matrix& rho, double p) {
  Matrix out = (1 - p) * rho;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      Matrix pp = Eigen::kroneckerProduct(Eigen::kroneckerProduct(single(a), single(b)).eval(), single(0)).eval();
      out += p / 15.0 * pp * rho * pp.adjoint();
    }
  return out;
}

Matrix marginal(const Matrix& rho, int n, int q) {
  const std::array<int, 1> keep{q};
  return partial_trace_keep(rho, n, keep);
}

}  // namespace

TEST_CASE("depolarizing model rates") {
  DepolarizingModel m{0.02};
  CHECK(m.p1() == doctest::Approx(0.002));
  CHECK(m.p2() == 0.02);
  CHECK(m.rate(1) == m.p1());
  CHECK(m.rate(2) == m.p2());
}

TEST_CASE("depolarizing channel examples") {
  const double p = 0.3;
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1;
  const std::array<int, 1> q0{0};
  const Matrix out = depolarize(rho, q0, p);
  CHECK(std::abs(out(0, 0) - (1 - 2 * p / 3)) < 1e-14);
  CHECK(std::abs(out(1, 1) - 2 * p / 3) < 1e-14);
  CHECK(std::abs(out(0, 1)) < 1e-14);

  Rng rng(1);
  const std::array<int, 2> q01{0, 1};
  const std::array<int, 1> q2{2};
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix r = random_density(3, rng);
    CHECK((depolarize(r, q01, 0.0) - r).norm() < 1e-14);
    const Matrix d2 = depolarize(r, q01, 0.17);
    CHECK(std::abs(d2.trace() - 1.0) < 1e-12);
    CHECK((d2 - d2.adjoint()).norm() < 1e-12);
    CHECK((d2 - two_qubit_depolarize_oracle(r, 0.17)).norm() < 1e-12);
    CHECK(std::abs(depolarize(r, q2, 0.5).trace() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(depolarize(rho, q0, 1.5), InvalidArgument);
}

TEST_CASE("Pauli twirl sampling matches the channel") {
  // n = 2 entangled state; estimate <Z0 Z1> and <X0> after two-qubit noise.
  Vector psi(4);
  psi << std::sqrt(0.7), 0, cplx(0, std::sqrt(0.1)), std::sqrt(0.2);
  const Matrix rho = psi * psi.adjoint();
  const std::array<int, 2> q01{0, 1};
  const double p = 0.25;
  const Matrix exact = depolarize(rho, q01, p);
  const Matrix zz = Eigen::kroneckerProduct(single(3), single(3)).eval();
  const Matrix x0 = Eigen::kroneckerProduct(single(1), single(0)).eval();
  const double want_zz = (exact * zz).trace().real(), want_x = (exact * x0).trace().real();
  Rng rng(2);
  const int samples = 100000;
  double s_zz = 0, s2_zz = 0, s_x = 0, s2_x = 0;
  for (int i = 0; i < samples; ++i) {
    Vector v = psi;
    depolarize_sample(v, q01, p, rng);
    const double a = (v.adjoint() * zz * v)(0, 0).real(), b = (v.adjoint() * x0 * v)(0, 0).real();
    s_zz += a;
    s2_zz += a * a;
    s_x += b;
    s2_x += b * b;
  }
  auto se = [&](double s, double s2) { return std::sqrt((s2 / samples - (s / samples) * (s / samples)) / (samples - 1)); };
  CHECK(std::abs(s_zz / samples - want_zz) <= 3 * se(s_zz, s2_zz));
  CHECK(std::abs(s_x / samples - want_x) <= 3 * se(s_x, s2_x));
}

TEST_CASE("repeated single-qubit noise drives marginals to the maximally mixed state") {
  Rng rng(3);
  Matrix rho = random_density(2, rng);
  const std::array<int, 1> q1{1};
  const Matrix half = Matrix::Identity(2, 2) / 2.0;
  double prev = trace_norm_hermitian(Matrix(marginal(rho, 2, 1) - half));
  for (int k = 0; k < 30; ++k) {
    rho = depolarize(rho, q1, 0.2);
    const double d = trace_norm_hermitian(Matrix(marginal(rho, 2, 1) - half));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("Pauli vectors") {
  Rng rng(4);
  const Matrix rho = random_density(3, rng);
  const RVector r = pauli_vector(rho);
  CHECK(r.size() == 64);
  CHECK(r(0) == doctest::Approx(1.0));
  CHECK((density_from_pauli(r) - rho).norm() < 1e-12);

  PauliString s;
  s.coefficient = 1.0;
  s.factors[0] = Pauli::X;
  s.factors[2] = Pauli::Y;
  const Region all{0, 1, 2};
  CHECK(pauli_index(s, 3) == 1 * 16 + 0 * 4 + 2);
  CHECK(r(static_cast<Eigen::Index>(pauli_index(s, 3))) == doctest::Approx(pauli_expectation(rho, s, all).real()));

  // A channel applied through its transfer matrix matches the superoperator.
  const std::array<int, 2> pos{2, 0};
  const Matrix u = Eigen::HouseholderQR<Matrix>(random_density(2, rng) + Matrix::Identity(4, 4)).householderQ();
  const Matrix sup = kraus_superop({u});
  const RMatrix ptm = pauli_transfer_matrix(sup);
  CHECK(ptm(0, 0) == doctest::Approx(1.0));
  RVector rr = r;
  apply_ptm(rr, ptm, pos, 3);
  Matrix x = rho;
  apply_superop<cplx>(x, sup, make_support_index(3, pos));
  CHECK((density_from_pauli(rr) - x).norm() < 1e-12);
}

TEST_CASE("measurement distributions") {
  Rng rng(5);
  const Matrix rho = random_density(2, rng);
  const RVector r = pauli_vector(rho);
  const RVector pz = basis_distribution(r, 2, Pauli::Z);
  for (int i = 0; i < 4; ++i) CHECK(pz(i) == doctest::Approx(rho(i, i).real()));
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  const Matrix hh = Eigen::kroneckerProduct(h, h).eval();
  const Matrix rx = hh * rho * hh.adjoint();
  const RVector px = basis_distribution(r, 2, Pauli::X);
  for (int i = 0; i < 4; ++i) CHECK(px(i) == doctest::Approx(rx(i, i).real()));
  Matrix sd(2, 2);  // maps the Y eigenbasis onto the computational one
  sd << 1, cplx(0, -1), 1, cplx(0, 1);
  sd /= std::sqrt(2.0);
  const Matrix ss = Eigen::kroneckerProduct(sd, sd).eval();
  const Matrix ry = ss * rho * ss.adjoint();
  const RVector py = basis_distribution(r, 2, Pauli::Y);
  for (int i = 0; i < 4; ++i) CHECK(py(i) == doctest::Approx(ry(i, i).real()));
  CHECK(py.sum() == doctest::Approx(1.0));
}

TEST_CASE("energy from Pauli vectors and shots") {
  const auto h = build_model("mfi", Lattice::chain(4));
  const Matrix rho = gibbs_state(h, 0.8);
  const RVector r = pauli_vector(rho);
  const double exact = energy_expectation(rho, h);
  CHECK(pauli_energy(r, h) == doctest::Approx(exact).epsilon(1e-12));
  Rng rng(6);
  const int reps = 2000;
  double s = 0, s2 = 0;
  for (int i = 0; i < reps; ++i) {
    const double e = sample_energy(r, h, 256, rng);
    s += e;
    s2 += e * e;
  }
  const double mean = s / reps, se = std::sqrt((s2 / reps - mean * mean) / (reps - 1));
  CHECK(std::abs(mean - exact) <= 3 * se);
  PauliString xz;
  xz.coefficient = 1.0;
  xz.factors[0] = Pauli::X;
  xz.factors[1] = Pauli::Z;
  const LocalHamiltonian mixed{Lattice::chain(2), {xz}, Region{0, 1}};
  CHECK_THROWS_AS(sample_energy(RVector::Unit(16, 0), mixed, 100, rng), InvalidArgument);
}

TEST_CASE("noiseless compiled gadget equals its unitary channel") {
  Rng rng(7);
  const auto tpl = ladder_template(1, 2);
  Eigen::VectorXd theta(tpl.n_params);
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = 6.28 * rng.uniform();
  const Matrix exact = channel_from_unitary(template_unitary(tpl, theta)).superop();
  CHECK((noisy_gadget_superop(tpl, theta, DepolarizingModel{0.0}) - exact).norm() < 1e-10);
  const Matrix noisy = noisy_gadget_superop(tpl, theta, DepolarizingModel{0.01});
  const RMatrix ptm = pauli_transfer_matrix(noisy);
  CHECK(ptm(0, 0) == doctest::Approx(1.0));
  CHECK(ptm.row(0).tail(ptm.cols() - 1).norm() < 1e-12);
  CHECK((noisy - exact).norm() > 1e-4);
  // Noise contracts the channel towards the depolarized output.
  const double noisy_purity = ptm.squaredNorm();
  CHECK(noisy_purity < pauli_transfer_matrix(exact).squaredNorm());
}

TEST_CASE("noisy trajectories reduce to the exact sampled evolution") {
  const auto h = build_model("mfi", Lattice::chain(3));
  const auto lind = build_lindbladian(h, 1.0, 1, Envelope{EnvelopeKind::gaussian, 1.0});
  ChannelBank bank(lind, 0.2);
  TrotterPlan plan;
  plan.tau = 0.2;
  plan.steps = 6;
  std::vector<std::vector<int>> positions;
  std::vector<std::array<RMatrix, 3>> ptms(3);
  for (int a = 0; a < 3; ++a) {
    positions.push_back(bank.positions(a));
    for (int alpha = 0; alpha < 3; ++alpha) ptms[a][alpha] = pauli_transfer_matrix(bank.sampled(a, alpha));
  }
  const ChannelProvider provider = [&](int a, int alpha) -> const RMatrix& { return ptms[a][alpha]; };
  Matrix rho0 = Matrix::Zero(8, 8);
  rho0(0, 0) = 1;
  NoisyRunOptions o;
  o.n_circuits = 12;
  o.shots = 0;
  o.seed = 77;
  const auto exact = noisy_trajectory_run(h, provider, positions, rho0, plan, o);
  double want = 0;
  for (int c = 0; c < o.n_circuits; ++c)
    want += energy_expectation(sample_trajectory(bank, rho0, plan, {o.seed, static_cast<std::uint64_t>(c)}), h);
  want /= o.n_circuits;
  CHECK(exact.energy == doctest::Approx(want).epsilon(1e-10));
  CHECK(exact.energy_density == doctest::Approx(want / 3).epsilon(1e-10));

  o.n_circuits = 400;
  o.shots = 0;
  const auto ref = noisy_trajectory_run(h, provider, positions, rho0, plan, o);
  o.shots = 1024;
  const auto shot = noisy_trajectory_run(h, provider, positions, rho0, plan, o);
  CHECK(std::abs(shot.energy - ref.energy) <= 3 * shot.stderr_energy);
  const auto again = noisy_trajectory_run(h, provider, positions, rho0, plan, o);
  CHECK(again.energy == shot.energy);
}
