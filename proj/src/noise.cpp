#include "qgibbs/noise.hpp"

#include "qgibbs/qubit_ops.hpp"
#include "qgibbs/superop.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>

namespace qgibbs {
namespace {

int qubits_of(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  require((Eigen::Index{1} << n) == dim, "dimension is not a power of two");
  return n;
}

int pauli_code(Pauli p) {
  switch (p) {
    case Pauli::X: return 1;
    case Pauli::Y: return 2;
    case Pauli::Z: return 3;
  }
  return 0;
}

// Base-4 digits of a Pauli index, qubit 0 first.
std::vector<int> digits_of(std::size_t idx, int n) {
  std::vector<int> d(static_cast<std::size_t>(n));
  for (int q = n - 1; q >= 0; --q) {
    d[static_cast<std::size_t>(q)] = static_cast<int>(idx & 3U);
    idx >>= 2;
  }
  return d;
}

// P|z> = phase(z) |z ^ flip>.
struct PauliAction {
  std::uint32_t flip = 0;
  std::uint32_t zmask = 0;  // qubits contributing (-1)^{z_q}
  int y_count = 0;          // factor i per Y
};

PauliAction action_of(std::size_t idx, int n) {
  PauliAction a;
  const auto d = digits_of(idx, n);
  for (int q = 0; q < n; ++q) {
    const std::uint32_t bit = 1U << (n - 1 - q);
    switch (d[static_cast<std::size_t>(q)]) {
      case 1: a.flip |= bit; break;
      case 2: a.flip |= bit; a.zmask |= bit; ++a.y_count; break;
      case 3: a.zmask |= bit; break;
      default: break;
    }
  }
  return a;
}

cplx phase_of(const PauliAction& a, std::uint32_t z) {
  static const std::array<cplx, 4> ipow{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};
  const double sign = (std::popcount(z & a.zmask) & 1) ? -1.0 : 1.0;
  return sign * ipow[static_cast<std::size_t>(a.y_count & 3)];
}

Matrix pauli_dense(std::size_t idx, int n) {
  const auto dim = std::size_t{1} << n;
  const auto a = action_of(idx, n);
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint32_t z = 0; z < dim; ++z) p(z ^ a.flip, z) = phase_of(a, z);
  return p;
}

void walsh_hadamard(RVector& f) {
  const auto n = f.size();
  for (Eigen::Index h = 1; h < n; h <<= 1)
    for (Eigen::Index i = 0; i < n; i += 2 * h)
      for (Eigen::Index j = i; j < i + h; ++j) {
        const double a = f(j);
        const double b = f(j + h);
        f(j) = a + b;
        f(j + h) = a - b;
      }
}

// Basis used by a term, and the qubit mask it reads.
std::pair<Pauli, std::uint32_t> term_basis(const PauliString& p, int n) {
  require(!p.factors.empty(), "sample_energy: identity term");
  const Pauli b = p.factors.begin()->second;
  std::uint32_t mask = 0;
  for (const auto& [site, f] : p.factors) {
    require(f == b, "sample_energy: term mixes measurement bases: " + p.label());
    require(site >= 0 && site < n, "sample_energy: site outside register");
    mask |= 1U << (n - 1 - site);
  }
  return {b, mask};
}

}  // namespace

Matrix depolarize(const Matrix& rho, std::span<const int> positions, double p) {
  require(p >= 0.0 && p <= 1.0, "depolarize: p must lie in [0, 1]");
  const int n = qubits_of(rho.rows());
  const int k = static_cast<int>(positions.size());
  require(k >= 1, "depolarize: empty support");
  const auto d = Eigen::Index{1} << k;
  const double four_k = std::pow(4.0, k);
  // sum_{P != I} P X P = 2^k tr(X) I - X on the support.
  Matrix vec_id = Matrix::Identity(d, d).reshaped(d * d, 1);
  Matrix s = (1.0 - p - p / (four_k - 1.0)) * Matrix::Identity(d * d, d * d) +
             (p / (four_k - 1.0)) * static_cast<double>(d) * vec_id * vec_id.transpose();
  Matrix out = rho;
  apply_superop<cplx>(out, s, make_support_index(n, positions));
  return out;
}

void depolarize_sample(Vector& psi, std::span<const int> positions, double p, Rng& rng) {
  if (rng.uniform() >= p) return;
  const int n = qubits_of(psi.size());
  const int k = static_cast<int>(positions.size());
  const auto which = static_cast<std::size_t>(1 + rng.below((1 << (2 * k)) - 1));
  apply_to_vector<cplx>(psi, pauli_dense(which, k), make_support_index(n, positions));
}

Matrix noisy_gadget_superop(const TemplateCircuit& tpl, const Eigen::VectorXd& theta,
                            const DepolarizingModel& model) {
  require(tpl.k >= 2, "noisy_gadget_superop: template needs an ancilla and a system");
  require(theta.size() == tpl.n_params, "noisy_gadget_superop: parameter count mismatch");
  const int k = tpl.k;
  const auto ds = Eigen::Index{1} << (k - 1);
  const auto df = Eigen::Index{1} << k;
  std::vector<int> system(static_cast<std::size_t>(k - 1));
  for (int q = 1; q < k; ++q) system[static_cast<std::size_t>(q - 1)] = q;

  std::vector<Matrix> ops;
  std::vector<SupportIndex> idx;
  std::vector<std::vector<int>> where;
  for (const auto& g : tpl.gates) {
    ops.push_back(gate_matrix(g, theta));
    where.push_back(g.type == Gate::Type::cz ? std::vector<int>{g.q0, g.q1} : std::vector<int>{g.q0});
    idx.push_back(make_support_index(k, where.back()));
  }

  Matrix out(ds * ds, ds * ds);
  for (Eigen::Index j = 0; j < ds; ++j)
    for (Eigen::Index i = 0; i < ds; ++i) {
      Matrix rho = Matrix::Zero(df, df);
      rho(i, j) = 1.0;  // ancilla |0> is the upper block
      for (std::size_t g = 0; g < ops.size(); ++g) {
        left_apply<cplx>(rho, ops[g], idx[g]);
        Matrix opd = ops[g].adjoint();
        right_apply<cplx>(rho, opd, idx[g]);
        const double pk = model.rate(static_cast<int>(where[g].size()));
        if (pk > 0.0) rho = depolarize(rho, where[g], pk);
      }
      out.col(i + ds * j) = partial_trace_keep(rho, k, system).reshaped(ds * ds, 1);
    }
  return out;
}

std::size_t pauli_index(const PauliString& p, int n) {
  std::size_t idx = 0;
  for (const auto& [site, f] : p.factors) {
    require(site >= 0 && site < n, "pauli_index: site outside register");
    idx += static_cast<std::size_t>(pauli_code(f)) << (2 * (n - 1 - site));
  }
  return idx;
}

RVector pauli_vector(const Matrix& rho) {
  const int n = qubits_of(rho.rows());
  const auto dim = std::uint32_t{1} << n;
  const auto count = std::size_t{1} << (2 * n);
  RVector r(static_cast<Eigen::Index>(count));
  for (std::size_t idx = 0; idx < count; ++idx) {
    const auto a = action_of(idx, n);
    cplx acc = 0.0;
    // tr(P rho) = sum_z phase(z) rho(z, z ^ flip)
    for (std::uint32_t z = 0; z < dim; ++z) acc += phase_of(a, z) * rho(z, z ^ a.flip);
    r(static_cast<Eigen::Index>(idx)) = acc.real();
  }
  return r;
}

Matrix density_from_pauli(const RVector& r) {
  const int n = qubits_of(r.size()) / 2;
  require((Eigen::Index{1} << (2 * n)) == r.size(), "density_from_pauli: length is not 4^n");
  const auto dim = std::uint32_t{1} << n;
  Matrix rho = Matrix::Zero(dim, dim);
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(r.size()); ++idx) {
    const double c = r(static_cast<Eigen::Index>(idx));
    if (c == 0.0) continue;
    const auto a = action_of(idx, n);
    for (std::uint32_t z = 0; z < dim; ++z) rho(z ^ a.flip, z) += c * phase_of(a, z);
  }
  return rho / static_cast<double>(dim);
}

RMatrix pauli_transfer_matrix(const Matrix& superop) {
  const auto d2 = superop.rows();
  const int k = qubits_of(d2) / 2;
  const auto d = Eigen::Index{1} << k;
  require(d * d == d2 && superop.cols() == d2, "pauli_transfer_matrix: not a superoperator");
  std::vector<Matrix> paulis;
  for (Eigen::Index i = 0; i < d2; ++i) paulis.push_back(pauli_dense(static_cast<std::size_t>(i), k));
  RMatrix r(d2, d2);
  for (Eigen::Index q = 0; q < d2; ++q) {
    Matrix image = (superop * paulis[static_cast<std::size_t>(q)].reshaped(d2, 1)).reshaped(d, d);
    for (Eigen::Index p = 0; p < d2; ++p)
      r(p, q) = (paulis[static_cast<std::size_t>(p)].cwiseProduct(image.transpose())).sum().real() /
                static_cast<double>(d);
  }
  return r;
}

void apply_ptm(RVector& r, const RMatrix& ptm, std::span<const int> positions, int n) {
  std::vector<int> digits;
  for (int q : positions) {
    digits.push_back(2 * q);
    digits.push_back(2 * q + 1);
  }
  apply_to_vector<double>(r, ptm, make_support_index(2 * n, digits));
}

RVector basis_distribution(const RVector& r, int n, Pauli basis) {
  const auto dim = std::size_t{1} << n;
  const auto code = static_cast<std::size_t>(pauli_code(basis));
  RVector f(static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    std::size_t idx = 0;
    for (int q = 0; q < n; ++q)
      if (s & (std::size_t{1} << (n - 1 - q))) idx += code << (2 * (n - 1 - q));
    f(static_cast<Eigen::Index>(s)) = r(static_cast<Eigen::Index>(idx));
  }
  walsh_hadamard(f);
  f /= static_cast<double>(dim);
  return f.cwiseMax(0.0);
}

double pauli_energy(const RVector& r, const LocalHamiltonian& h) {
  const int n = h.lattice.size();
  double e = 0.0;
  for (const auto& t : h.terms) e += t.coefficient * r(static_cast<Eigen::Index>(pauli_index(t, n)));
  return e;
}

double sample_energy(const RVector& r, const LocalHamiltonian& h, int shots, Rng& rng) {
  const int n = h.lattice.size();
  std::map<Pauli, std::vector<std::pair<double, std::uint32_t>>> by_basis;
  for (const auto& t : h.terms) {
    const auto [b, mask] = term_basis(t, n);
    by_basis[b].emplace_back(t.coefficient, mask);
  }
  if (by_basis.empty()) return 0.0;
  const int per_basis = shots / static_cast<int>(by_basis.size());
  require(per_basis >= 1, "sample_energy: fewer shots than measurement bases");
  double e = 0.0;
  for (const auto& [b, terms] : by_basis) {
    RVector p = basis_distribution(r, n, b);
    std::vector<double> cdf(static_cast<std::size_t>(p.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) cdf[static_cast<std::size_t>(i)] = (acc += p(i));
    std::vector<double> sums(terms.size(), 0.0);
    for (int s = 0; s < per_basis; ++s) {
      const double u = rng.uniform() * acc;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto outcome = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(
          it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
      for (std::size_t t = 0; t < terms.size(); ++t)
        sums[t] += (std::popcount(outcome & terms[t].second) & 1) ? -1.0 : 1.0;
    }
    for (std::size_t t = 0; t < terms.size(); ++t) e += terms[t].first * sums[t] / per_basis;
  }
  return e;
}

NoisyRunResult noisy_trajectory_run(const LocalHamiltonian& h, const ChannelProvider& channel,
                                    const std::vector<std::vector<int>>& positions, const Matrix& rho0,
                                    const TrotterPlan& plan, const NoisyRunOptions& opts) {
  const int n = h.lattice.size();
  require(static_cast<int>(positions.size()) == n, "noisy_trajectory_run: one position list per site");
  require(opts.n_circuits >= 2, "noisy_trajectory_run: need at least two circuits");
  require(opts.shots >= 0, "noisy_trajectory_run: shots must be nonnegative");
  require(plan.steps >= 0 && plan.tau > 0.0, "noisy_trajectory_run: invalid plan");
  std::vector<int> order = plan.site_order;
  if (order.empty())
    for (int a = 0; a < n; ++a) order.push_back(a);

  std::vector<SupportIndex> idx;
  for (const auto& pos : positions) {
    std::vector<int> digits;
    for (int q : pos) {
      digits.push_back(2 * q);
      digits.push_back(2 * q + 1);
    }
    idx.push_back(make_support_index(2 * n, digits));
  }
  const RVector r0 = pauli_vector(rho0);

  std::vector<double> energies;
  energies.reserve(static_cast<std::size_t>(opts.n_circuits));
  for (int c = 0; c < opts.n_circuits; ++c) {
    const TrajectoryKey key{opts.seed, static_cast<std::uint64_t>(c)};
    const auto alphas = draw_alphas(key, n, plan);
    RVector r = r0;
    for (int step = 0; step < plan.steps; ++step) {
      const auto& row = alphas[alphas.size() == 1 ? 0 : static_cast<std::size_t>(step)];
      for (int a : order) {
        const auto sa = static_cast<std::size_t>(a);
        apply_to_vector<double>(r, channel(a, row[sa]), idx[sa]);
      }
    }
    if (opts.shots == 0) {
      energies.push_back(pauli_energy(r, h));
    } else {
      Rng shot_rng(opts.seed ^ 0xd1b54a32d192ed03ULL, static_cast<std::uint64_t>(c));
      energies.push_back(sample_energy(r, h, opts.shots, shot_rng));
    }
  }

  double mean = 0.0;
  for (double e : energies) mean += e;
  mean /= static_cast<double>(energies.size());
  double var = 0.0;
  for (double e : energies) var += (e - mean) * (e - mean);
  var /= static_cast<double>(energies.size() - 1);
  NoisyRunResult out;
  out.energy = mean;
  out.stderr_energy = std::sqrt(var / static_cast<double>(energies.size()));
  out.energy_density = mean / n;
  out.stderr_density = out.stderr_energy / n;
  return out;
}

}  // namespace qgibbs
