#include "qgibbs/steady_state.hpp"

#include "qgibbs/qubit_ops.hpp"
#include "qgibbs/superop.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

namespace qgibbs {

namespace {

template <class Scalar>
struct SiteBlock {
  SupportIndex idx;
  DynMatrix<Scalar> k;
  std::vector<DynMatrix<Scalar>> l;
  std::vector<DynMatrix<Scalar>> l_adj;
};

// Real form of a jump operator: L = phase * R with R real.
RMatrix real_part_of_jump(const Matrix& l) {
  Eigen::Index r = 0, c = 0;
  const double lmax = l.cwiseAbs().maxCoeff(&r, &c);
  if (lmax == 0) return RMatrix::Zero(l.rows(), l.cols());
  const cplx phase = l(r, c) / lmax;
  return (l / phase).real();
}

template <class Scalar>
DynMatrix<Scalar> convert_k(const Matrix& k) {
  if constexpr (std::is_same_v<Scalar, double>)
    return k.real();
  else
    return k;
}

template <class Scalar>
DynMatrix<Scalar> convert_l(const Matrix& l) {
  if constexpr (std::is_same_v<Scalar, double>)
    return real_part_of_jump(l);
  else
    return l;
}

// X -> L(X) for Hermitian X on the full register.
template <class Scalar>
class GeneratorAction {
 public:
  GeneratorAction(const TruncatedLindbladian& lind, bool translate) : n_(lind.num_sites()) {
    std::vector<int> sites;
    if (translate) {
      ref_ = pick_reference(lind);
      sites.push_back(ref_);
      build_permutations(lind.lattice);
    } else {
      for (int a = 0; a < n_; ++a) sites.push_back(a);
    }
    for (int a : sites) {
      const auto& first = lind.at(a, Pauli::X);
      SiteBlock<Scalar> b;
      b.idx = make_support_index(n_, first.support.sites());
      Matrix k = Matrix::Zero(first.L.rows(), first.L.cols());
      for (Pauli alpha : {Pauli::X, Pauli::Y, Pauli::Z}) {
        const auto& g = lind.at(a, alpha);
        k += g.K();
        b.l.push_back(convert_l<Scalar>(g.L));
        b.l_adj.push_back(b.l.back().adjoint());
      }
      b.k = convert_k<Scalar>(k);
      blocks_.push_back(std::move(b));
    }
  }

  DynMatrix<Scalar> apply(const DynMatrix<Scalar>& x) const {
    DynMatrix<Scalar> acc = DynMatrix<Scalar>::Zero(x.rows(), x.cols());
    DynMatrix<Scalar> y;
    for (const auto& b : blocks_) {
      y = x;
      left_apply<Scalar>(y, b.k, b.idx);
      acc += y;
      acc += y.adjoint();
      for (std::size_t j = 0; j < b.l.size(); ++j) {
        y = x;
        left_apply<Scalar>(y, b.l[j], b.idx);
        right_apply<Scalar>(y, b.l_adj[j], b.idx);
        acc += y;
      }
    }
    if (perms_.empty()) return hermitize(acc);
    DynMatrix<Scalar> out = DynMatrix<Scalar>::Zero(x.rows(), x.cols());
    const Eigen::Index dim = x.rows();
    for (const auto& p : perms_)
      for (Eigen::Index j = 0; j < dim; ++j) {
        const auto pj = p[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < dim; ++i) out(p[static_cast<std::size_t>(i)], pj) += acc(i, j);
      }
    return hermitize(out);
  }

 private:
  static DynMatrix<Scalar> hermitize(DynMatrix<Scalar>& m) {
    DynMatrix<Scalar> out = 0.5 * (m + m.adjoint());
    return out;
  }

  // The site whose ball sits on the leading qubits, if any.
  int pick_reference(const TruncatedLindbladian& lind) const {
    for (int a = 0; a < n_; ++a) {
      const auto& s = lind.at(a, Pauli::X).support.sites();
      bool leading = true;
      for (std::size_t i = 0; i < s.size(); ++i) leading = leading && s[i] == static_cast<int>(i);
      if (leading) return a;
    }
    return 0;
  }

  void build_permutations(const Lattice& lat) {
    const std::size_t dim = std::size_t{1} << n_;
    for (int a = 0; a < n_; ++a) {
      std::vector<int> target(static_cast<std::size_t>(n_));
      for (int s = 0; s < n_; ++s) target[static_cast<std::size_t>(s)] = lat.translate(s, ref_, a);
      std::vector<std::uint32_t> p(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        std::uint32_t v = 0;
        for (int s = 0; s < n_; ++s)
          if (i & (std::size_t{1} << (n_ - 1 - s)))
            v |= std::uint32_t{1} << (n_ - 1 - target[static_cast<std::size_t>(s)]);
        p[i] = v;
      }
      perms_.push_back(std::move(p));
    }
  }

  int n_;
  int ref_ = 0;
  std::vector<SiteBlock<Scalar>> blocks_;
  std::vector<std::vector<std::uint32_t>> perms_;
};

template <class Scalar>
double inner(const DynMatrix<Scalar>& a, const DynMatrix<Scalar>& b) {
  if constexpr (std::is_same_v<Scalar, double>)
    return a.cwiseProduct(b).sum();
  else
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

// Restarted GMRES on the space of Hermitian matrices for L(x0 + d) = 0.
template <class Scalar>
SteadyStateResult gmres_fixed_point(const GeneratorAction<Scalar>& op, DynMatrix<Scalar> x,
                                    const SteadyStateOptions& opts, const std::string& method) {
  const Eigen::Index dim = x.rows();
  const double bytes = static_cast<double>(dim) * dim * sizeof(Scalar);
  const int m = std::max(2, std::min(opts.restart, static_cast<int>(opts.memory_budget / bytes) - 1));
  const double target = opts.tol / std::sqrt(static_cast<double>(dim));

  int iterations = 0;
  DynMatrix<Scalar> r = op.apply(x);
  r = -r;
  double rnorm = std::sqrt(inner(r, r));
  while (rnorm > target && iterations < opts.max_iterations) {
    std::vector<DynMatrix<Scalar>> v;
    v.reserve(static_cast<std::size_t>(m + 1));
    v.push_back(r / rnorm);
    RMatrix h = RMatrix::Zero(m + 1, m);
    RVector cs = RVector::Zero(m), sn = RVector::Zero(m), g = RVector::Zero(m + 1);
    g(0) = rnorm;
    int j = 0;
    for (; j < m && iterations < opts.max_iterations; ++j) {
      ++iterations;
      DynMatrix<Scalar> w = op.apply(v[static_cast<std::size_t>(j)]);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const double c = inner(v[static_cast<std::size_t>(i)], w);
          h(i, j) += c;
          w -= c * v[static_cast<std::size_t>(i)];
        }
      h(j + 1, j) = std::sqrt(inner(w, w));
      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j) = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j) = t;
      }
      const double den = std::hypot(h(j, j), h(j + 1, j));
      cs(j) = den > 0 ? h(j, j) / den : 1.0;
      sn(j) = den > 0 ? h(j + 1, j) / den : 0.0;
      const double hj1 = h(j + 1, j);
      h(j, j) = cs(j) * h(j, j) + sn(j) * hj1;
      h(j + 1, j) = 0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      const bool breakdown = hj1 <= 1e-300;
      if (!breakdown) v.push_back(w / hj1);
      if (std::abs(g(j + 1)) <= 0.5 * target || breakdown) {
        ++j;
        break;
      }
    }
    RVector y = h.topLeftCorner(j, j).template triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) x += y(i) * v[static_cast<std::size_t>(i)];
    v.clear();
    r = op.apply(x);
    r = -r;
    const double next = std::sqrt(inner(r, r));
    if (!(next < rnorm) && next > target) {
      rnorm = next;
      break;
    }
    rnorm = next;
  }
  SteadyStateResult out;
  Scalar tr = x.trace();
  x /= tr;
  out.rho = x.template cast<cplx>();
  out.residual = rnorm / std::abs(tr) * std::sqrt(static_cast<double>(dim));
  out.iterations = iterations;
  out.method = method;
  if (out.residual > opts.tol)
    throw ConvergenceFailure("steady state did not reach the residual target (residual bound " +
                             std::to_string(out.residual) + ")");
  return out;
}

template <class Scalar>
DynMatrix<Scalar> dense_superop(const TruncatedLindbladian& lind) {
  const int n = lind.num_sites();
  const Eigen::Index dim = Eigen::Index{1} << n;
  DynMatrix<Scalar> k = DynMatrix<Scalar>::Zero(dim, dim);
  const DynMatrix<Scalar> id = DynMatrix<Scalar>::Identity(dim, dim);
  DynMatrix<Scalar> s = DynMatrix<Scalar>::Zero(dim * dim, dim * dim);
  for (const auto& g : lind.generators) {
    const auto idx = make_support_index(n, g.support.sites());
    k += convert_k<Scalar>(embed_operator(g.K(), idx));
    const DynMatrix<Scalar> l = convert_l<Scalar>(embed_operator(g.L, idx));
    s += Eigen::kroneckerProduct(DynMatrix<Scalar>(l.conjugate()), l).eval();
  }
  s += Eigen::kroneckerProduct(id, k).eval();
  s += Eigen::kroneckerProduct(DynMatrix<Scalar>(k.conjugate()), id).eval();
  return s;
}

template <class Scalar>
SteadyStateResult dense_fixed_point(const TruncatedLindbladian& lind, const std::string& method) {
  const Eigen::Index dim = Eigen::Index{1} << lind.num_sites();
  DynMatrix<Scalar> s = dense_superop<Scalar>(lind);
  const DynMatrix<Scalar> s_orig = s;
  // Replace the (0,0) output row by the trace functional.
  s.row(0).setZero();
  for (Eigen::Index i = 0; i < dim; ++i) s(0, i + dim * i) = 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(dim * dim);
  rhs(0) = 1;
  Eigen::PartialPivLU<DynMatrix<Scalar>> lu(s);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = lu.solve(rhs);
  DynMatrix<Scalar> rho = Eigen::Map<DynMatrix<Scalar>>(v.data(), dim, dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> res = s_orig * Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(rho.data(), dim * dim);
  DynMatrix<Scalar> resm = Eigen::Map<DynMatrix<Scalar>>(res.data(), dim, dim);
  resm = 0.5 * (resm + resm.adjoint()).eval();
  SteadyStateResult out;
  out.rho = rho.template cast<cplx>();
  out.residual = trace_norm_hermitian(Matrix(resm.template cast<cplx>()));
  out.iterations = 0;
  out.method = method;
  return out;
}

}  // namespace

Matrix apply_generator_hermitian(const TruncatedLindbladian& lind, const Matrix& x) {
  require(lind.num_sites() <= kMaxDenseQubits, "density matrix exceeds the dense cap");
  const bool real = lind.real_representable() && x.imag().cwiseAbs().maxCoeff() == 0.0;
  if (real) {
    GeneratorAction<double> op(lind, false);
    return op.apply(x.real()).cast<cplx>();
  }
  GeneratorAction<cplx> op(lind, false);
  return op.apply(x);
}

SteadyStateResult steady_state(const TruncatedLindbladian& lind, const SteadyStateOptions& opts) {
  const int n = lind.num_sites();
  if (n > kMaxDenseQubits)
    throw ResourceCapExceeded("steady state limited to " + std::to_string(kMaxDenseQubits) + " sites");
  const bool real = lind.real_representable();
  if (n <= opts.dense_max_sites) {
    auto out = real ? dense_fixed_point<double>(lind, "dense-real") : dense_fixed_point<cplx>(lind, "dense");
    if (out.residual > opts.tol)
      throw ConvergenceFailure("dense steady state residual " + std::to_string(out.residual) +
                               " above target");
    return out;
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix x0 = opts.initial_hamiltonian ? gibbs_state(*opts.initial_hamiltonian, lind.beta)
                                       : Matrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
  const bool start_symmetric = !opts.initial_hamiltonian || opts.initial_hamiltonian->translation_invariant;
  const bool translate = opts.use_translation && lind.translation_invariant &&
                         lind.lattice.fully_periodic() && start_symmetric;
  const bool real_start = x0.imag().cwiseAbs().maxCoeff() < 1e-14;
  const std::string tag = std::string(translate ? "gmres-translation" : "gmres");
  if (real && real_start) {
    GeneratorAction<double> op(lind, translate);
    RMatrix xr = x0.real();
    x0.resize(0, 0);
    return gmres_fixed_point<double>(op, std::move(xr), opts, tag + "-real");
  }
  GeneratorAction<cplx> op(lind, translate);
  return gmres_fixed_point<cplx>(op, std::move(x0), opts, tag);
}

}  // namespace qgibbs
