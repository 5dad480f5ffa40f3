#include "qgibbs/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace qgibbs {

namespace {

struct PauliMask {
  std::uint64_t flip = 0;
  std::uint64_t sign = 0;  // bits contributing (-1)^bit (Y and Z factors)
  int n_y = 0;
};

PauliMask mask_for(const PauliString& p, const Region& support) {
  PauliMask m;
  const int k = support.size();
  for (const auto& [site, op] : p.factors) {
    const int pos = support.position(site);
    if (pos < 0)
      throw InvalidArgument("Pauli string " + p.label() + " acts outside the support");
    const std::uint64_t bit = std::uint64_t{1} << (k - 1 - pos);
    switch (op) {
      case Pauli::X: m.flip |= bit; break;
      case Pauli::Y: m.flip |= bit; m.sign |= bit; ++m.n_y; break;
      case Pauli::Z: m.sign |= bit; break;
    }
  }
  return m;
}

cplx i_power(int k) {
  switch (k & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// <j ^ flip| P |j>
cplx phase_of(const PauliMask& m, std::uint64_t j) {
  const cplx base = i_power(m.n_y);
  return (std::popcount(j & m.sign) & 1) ? -base : base;
}

void check_dense_cap(int k) {
  if (k > kMaxDenseQubits)
    throw ResourceCapExceeded("dense matrix on " + std::to_string(k) +
                              " qubits exceeds the cap of " +
                              std::to_string(kMaxDenseQubits));
}

double param(const ModelParams& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw InvalidArgument("missing model parameter '" + key + "'");
  return it->second;
}

}  // namespace

Matrix pauli_matrix(Pauli p) {
  Matrix m = Matrix::Zero(2, 2);
  switch (p) {
    case Pauli::X: m(0, 1) = 1; m(1, 0) = 1; break;
    case Pauli::Y: m(0, 1) = -kI; m(1, 0) = kI; break;
    case Pauli::Z: m(0, 0) = 1; m(1, 1) = -1; break;
  }
  return m;
}

Region PauliString::support() const {
  std::vector<int> s;
  for (const auto& f : factors) s.push_back(f.first);
  return Region(std::move(s));
}

std::string PauliString::label() const {
  std::ostringstream os;
  os << coefficient << "*";
  for (const auto& [site, op] : factors) os << static_cast<char>(op) << site;
  return os.str();
}

int LocalHamiltonian::locality() const {
  int k = 0;
  for (const auto& t : terms) k = std::max(k, static_cast<int>(t.factors.size()));
  return k;
}

bool LocalHamiltonian::is_real() const {
  for (const auto& t : terms) {
    int ny = 0;
    for (const auto& f : t.factors) ny += f.second == Pauli::Y;
    if (ny % 2) return false;
  }
  return true;
}

ModelParams default_model_params(const std::string& name) {
  if (name == "mfi") return {{"g", (std::sqrt(5.0) + 5.0) / 8.0}, {"h", (std::sqrt(5.0) + 1.0) / 4.0}};
  if (name == "tfi1d") return {{"g", 0.6}};
  if (name == "xxz") return {{"delta", 0.6}};
  if (name == "tfim2d") return {{"g", 0.2}};
  throw InvalidArgument("unknown model '" + name + "'");
}

LocalHamiltonian build_model(const std::string& name, const Lattice& lat,
                             const ModelParams& params) {
  ModelParams p = default_model_params(name);
  for (const auto& [k, v] : params) {
    if (!p.count(k)) throw InvalidArgument("unknown parameter '" + k + "' for model " + name);
    p[k] = v;
  }
  const bool one_d = name != "tfim2d";
  if (one_d && lat.dimension() != 1)
    throw InvalidArgument("model " + name + " needs a one-dimensional lattice");
  if (!one_d && lat.dimension() != 2)
    throw InvalidArgument("model tfim2d needs a two-dimensional lattice");

  LocalHamiltonian h{lat, {}, lat.all_sites(), lat.fully_periodic()};
  const auto edges = lat.nearest_neighbor_pairs();
  auto add = [&](double c, std::map<int, Pauli> f) {
    if (c != 0.0) h.terms.push_back({c, std::move(f)});
  };
  if (name == "xxz") {
    const double delta = param(p, "delta");
    for (auto [i, j] : edges) {
      add(0.25, {{i, Pauli::X}, {j, Pauli::X}});
      add(0.25, {{i, Pauli::Y}, {j, Pauli::Y}});
      add(0.25 * delta, {{i, Pauli::Z}, {j, Pauli::Z}});
    }
    return h;
  }
  for (auto [i, j] : edges) add(0.25, {{i, Pauli::Z}, {j, Pauli::Z}});
  const double g = param(p, "g");
  for (int s = 0; s < lat.size(); ++s) add(0.5 * g, {{s, Pauli::X}});
  if (name == "mfi") {
    const double hz = param(p, "h");
    for (int s = 0; s < lat.size(); ++s) add(0.5 * hz, {{s, Pauli::Z}});
  }
  return h;
}

LocalHamiltonian truncate_hamiltonian(const LocalHamiltonian& h, int a, int r) {
  const Region ball = h.lattice.ball(a, r);
  LocalHamiltonian out{h.lattice, {}, ball, false};
  for (const auto& t : h.terms)
    if (ball.contains(t.support())) out.terms.push_back(t);
  return out;
}

Matrix pauli_string_dense(const PauliString& p, const Region& support) {
  const int k = support.size();
  check_dense_cap(k);
  const std::uint64_t dim = std::uint64_t{1} << k;
  const auto m = mask_for(p, support);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t j = 0; j < dim; ++j)
    out(static_cast<Eigen::Index>(j ^ m.flip), static_cast<Eigen::Index>(j)) =
        p.coefficient * phase_of(m, j);
  return out;
}

Matrix to_dense(const LocalHamiltonian& h, const Region& support) {
  const int k = support.size();
  check_dense_cap(k);
  const std::uint64_t dim = std::uint64_t{1} << k;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& t : h.terms) {
    const auto m = mask_for(t, support);
    for (std::uint64_t j = 0; j < dim; ++j)
      out(static_cast<Eigen::Index>(j ^ m.flip), static_cast<Eigen::Index>(j)) +=
          t.coefficient * phase_of(m, j);
  }
  return out;
}

Matrix to_dense(const LocalHamiltonian& h) { return to_dense(h, h.support); }

Matrix embed_single_site(const Matrix& op, int site, const Region& support) {
  require(op.rows() == 2 && op.cols() == 2, "single-site operator must be 2x2");
  const int k = support.size();
  check_dense_cap(k);
  const int pos = support.position(site);
  require(pos >= 0, "site outside the support");
  const std::uint64_t dim = std::uint64_t{1} << k;
  const std::uint64_t bit = std::uint64_t{1} << (k - 1 - pos);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t j = 0; j < dim; ++j) {
    const int bj = (j & bit) ? 1 : 0;
    for (int bi = 0; bi < 2; ++bi) {
      const std::uint64_t i = bi ? (j | bit) : (j & ~bit);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = op(bi, bj);
    }
  }
  return out;
}

cplx pauli_expectation(const Matrix& rho, const PauliString& p, const Region& support) {
  const auto m = mask_for(p, support);
  const auto dim = static_cast<std::uint64_t>(rho.rows());
  require(dim == (std::uint64_t{1} << support.size()), "state dimension does not match support");
  cplx acc = 0;
  for (std::uint64_t a = 0; a < dim; ++a)
    acc += rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a ^ m.flip)) * phase_of(m, a);
  return p.coefficient * acc;
}

double energy_expectation(const Matrix& rho, const LocalHamiltonian& h) {
  cplx e = 0;
  for (const auto& t : h.terms) e += pauli_expectation(rho, t, h.support);
  return e.real();
}

Vector apply_pauli_string(const PauliString& p, const Vector& psi, const Region& support) {
  const auto m = mask_for(p, support);
  const auto dim = static_cast<std::uint64_t>(psi.size());
  require(dim == (std::uint64_t{1} << support.size()), "state dimension does not match support");
  Vector out(psi.size());
  for (std::uint64_t j = 0; j < dim; ++j)
    out(static_cast<Eigen::Index>(j ^ m.flip)) =
        p.coefficient * phase_of(m, j) * psi(static_cast<Eigen::Index>(j));
  return out;
}

}  // namespace qgibbs
