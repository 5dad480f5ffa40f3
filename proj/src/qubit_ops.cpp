#include "qgibbs/qubit_ops.hpp"

#include <algorithm>

namespace qgibbs {

SupportIndex make_support_index(int nq, std::span<const int> positions) {
  require(nq >= 0 && nq < 31, "register size out of range");
  const int k = static_cast<int>(positions.size());
  std::vector<bool> used(static_cast<std::size_t>(nq), false);
  for (int p : positions) {
    require(p >= 0 && p < nq, "qubit position out of range");
    require(!used[static_cast<std::size_t>(p)], "repeated qubit position");
    used[static_cast<std::size_t>(p)] = true;
  }
  SupportIndex idx;
  idx.nq = nq;
  idx.positions.assign(positions.begin(), positions.end());
  idx.leading = true;
  for (int i = 0; i < k; ++i) idx.leading = idx.leading && positions[static_cast<std::size_t>(i)] == i;

  auto full_bit = [nq](int pos) { return std::uint32_t{1} << (nq - 1 - pos); };
  idx.sup.resize(std::size_t{1} << k);
  for (std::uint32_t s = 0; s < idx.sup.size(); ++s) {
    std::uint32_t v = 0;
    for (int q = 0; q < k; ++q)
      if (s & (std::uint32_t{1} << (k - 1 - q))) v |= full_bit(positions[static_cast<std::size_t>(q)]);
    idx.sup[s] = v;
  }
  std::vector<int> rest;
  for (int p = 0; p < nq; ++p)
    if (!used[static_cast<std::size_t>(p)]) rest.push_back(p);
  const int ne = static_cast<int>(rest.size());
  idx.env.resize(std::size_t{1} << ne);
  for (std::uint32_t e = 0; e < idx.env.size(); ++e) {
    std::uint32_t v = 0;
    for (int q = 0; q < ne; ++q)
      if (e & (std::uint32_t{1} << (ne - 1 - q))) v |= full_bit(rest[static_cast<std::size_t>(q)]);
    idx.env[e] = v;
  }
  return idx;
}

Matrix embed_operator(const Matrix& op, const SupportIndex& idx) {
  require(idx.nq <= kMaxDenseQubits, "embedding exceeds the dense cap");
  const auto d = static_cast<Eigen::Index>(idx.d());
  require(op.rows() == d && op.cols() == d, "embed_operator: dimension mismatch");
  const Eigen::Index n = Eigen::Index{1} << idx.nq;
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t e = 0; e < idx.e(); ++e)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i)
        out(idx.sup[i] | idx.env[e], idx.sup[j] | idx.env[e]) = op(i, j);
  return out;
}

Matrix partial_trace_keep(const Matrix& rho, int nq, std::span<const int> keep) {
  require(rho.rows() == (Eigen::Index{1} << nq) && rho.cols() == rho.rows(),
          "partial_trace_keep: dimension mismatch");
  const auto idx = make_support_index(nq, keep);
  const auto d = static_cast<Eigen::Index>(idx.d());
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t e = 0; e < idx.e(); ++e)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = 0; i < d; ++i) out(i, j) += rho(idx.sup[i] | idx.env[e], idx.sup[j] | idx.env[e]);
  return out;
}

std::vector<int> positions_in(std::span<const int> register_sites, std::span<const int> sites) {
  std::vector<int> out;
  out.reserve(sites.size());
  for (int s : sites) {
    auto it = std::find(register_sites.begin(), register_sites.end(), s);
    require(it != register_sites.end(), "site " + std::to_string(s) + " not in register");
    out.push_back(static_cast<int>(it - register_sites.begin()));
  }
  return out;
}

}  // namespace qgibbs
