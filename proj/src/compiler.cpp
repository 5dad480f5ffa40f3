#include "qgibbs/compiler.hpp"

#include "qgibbs/rng.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace qgibbs {

namespace {

using Block = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

void apply_u(Block& x, int k, int q, const Matrix& u) {
  const Eigen::Index bit = Eigen::Index{1} << (k - 1 - q);
  const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (i & bit) continue;
      const cplx a = x(i, c), b = x(i | bit, c);
      x(i, c) = u00 * a + u01 * b;
      x(i | bit, c) = u10 * a + u11 * b;
    }
}

void apply_cz(Block& x, int k, int q0, int q1) {
  const Eigen::Index mask = (Eigen::Index{1} << (k - 1 - q0)) | (Eigen::Index{1} << (k - 1 - q1));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if ((i & mask) == mask) x.row(i) *= -1.0;
}

void apply_gate(Block& x, int k, const Gate& g, const Eigen::VectorXd& theta, bool adjoint) {
  if (g.type == Gate::Type::cz) {
    apply_cz(x, k, g.q0, g.q1);
    return;
  }
  Matrix u = u_gate(theta(g.param), theta(g.param + 1), theta(g.param + 2));
  if (adjoint) u = u.adjoint().eval();
  apply_u(x, k, g.q0, u);
}

// d u / d(theta, phi, lambda).
std::array<Matrix, 3> u_derivatives(double t, double p, double l) {
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  const cplx ep = std::exp(cplx{0, p}), el = std::exp(cplx{0, l}), epl = std::exp(cplx{0, p + l});
  std::array<Matrix, 3> d;
  for (auto& m : d) m = Matrix::Zero(2, 2);
  d[0](0, 0) = -0.5 * s;
  d[0](0, 1) = -0.5 * el * c;
  d[0](1, 0) = 0.5 * ep * c;
  d[0](1, 1) = -0.5 * epl * s;
  d[1](1, 0) = kI * ep * s;
  d[1](1, 1) = kI * epl * c;
  d[2](0, 1) = -kI * el * s;
  d[2](1, 1) = kI * epl * c;
  return d;
}

void add_gate_pair(std::vector<Gate>& gates, int& n_params, int q) {
  gates.push_back({Gate::Type::u, q, -1, n_params});
  n_params += 3;
}

}  // namespace

Matrix u_gate(double theta, double phi, double lambda) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Matrix u(2, 2);
  u(0, 0) = c;
  u(0, 1) = -std::exp(cplx{0, lambda}) * s;
  u(1, 0) = std::exp(cplx{0, phi}) * s;
  u(1, 1) = std::exp(cplx{0, phi + lambda}) * c;
  return u;
}

TemplateCircuit make_template(int k, int m, std::vector<std::pair<int, int>> cz_pattern) {
  require(k >= 1 && k <= kMaxDenseQubits, "template qubit count out of range");
  require(m >= 0, "module count must be nonnegative");
  for (auto [a, b] : cz_pattern)
    require(a >= 0 && b >= 0 && a < k && b < k && a != b, "CZ edge outside the template");
  require(m == 0 || !cz_pattern.empty(), "modules need at least one CZ edge");
  TemplateCircuit tpl;
  tpl.k = k;
  tpl.m = m;
  tpl.cz_pattern = std::move(cz_pattern);
  const auto& pat = tpl.cz_pattern;
  for (int mod = 0; mod < m; ++mod) {
    for (std::size_t e = 0; e < pat.size(); ++e) {
      const auto [a, b] = mod % 2 == 0 ? pat[e] : pat[pat.size() - 1 - e];
      add_gate_pair(tpl.gates, tpl.n_params, a);
      add_gate_pair(tpl.gates, tpl.n_params, b);
      tpl.gates.push_back({Gate::Type::cz, a, b, -1});
    }
  }
  for (int q = 0; q < k; ++q) add_gate_pair(tpl.gates, tpl.n_params, q);
  return tpl;
}

TemplateCircuit ladder_template(int r, int m) {
  require(r >= 0, "radius must be nonnegative");
  const int k = 2 * r + 2;
  const int center = r + 1;
  std::vector<std::pair<int, int>> edges;
  for (int q = 1; q < center; ++q) edges.emplace_back(q, q + 1);
  edges.emplace_back(0, center);
  for (int q = center; q < k - 1; ++q) edges.emplace_back(q, q + 1);
  return make_template(k, m, std::move(edges));
}

TemplateCircuit pair_template(int m) { return make_template(2, m, {{0, 1}, {0, 1}, {0, 1}}); }

Matrix gate_matrix(const Gate& g, const Eigen::VectorXd& theta) {
  if (g.type == Gate::Type::u) return u_gate(theta(g.param), theta(g.param + 1), theta(g.param + 2));
  Matrix cz = Matrix::Identity(4, 4);
  cz(3, 3) = -1;
  return cz;
}

Matrix template_unitary(const TemplateCircuit& tpl, const Eigen::VectorXd& theta) {
  if (theta.size() != tpl.n_params)
    throw InvalidArgument("template expects " + std::to_string(tpl.n_params) + " parameters, got " +
                          std::to_string(theta.size()));
  Block x = Block::Identity(Eigen::Index{1} << tpl.k, Eigen::Index{1} << tpl.k);
  for (const auto& g : tpl.gates) apply_gate(x, tpl.k, g, theta, false);
  return x;
}

double compilation_loss(const Matrix& u_target, const Matrix& v) {
  require(u_target.rows() == v.rows() && u_target.cols() == v.cols() && v.rows() == v.cols(),
          "loss needs square matrices of equal size");
  const auto h = std::max<Eigen::Index>(1, v.cols() / 2);
  return (u_target.leftCols(h) - v.leftCols(h)).squaredNorm();
}

double phase_aligned_loss(const Matrix& u_target, const Matrix& v) {
  const auto h = std::max<Eigen::Index>(1, v.cols() / 2);
  const double a = u_target.leftCols(h).squaredNorm() + v.leftCols(h).squaredNorm();
  const cplx overlap = (u_target.leftCols(h).adjoint() * v.leftCols(h)).trace();
  return std::max(0.0, a - 2.0 * std::abs(overlap));
}

double loss_and_gradient(const TemplateCircuit& tpl, const Matrix& u_target, const Eigen::VectorXd& theta,
                         Eigen::VectorXd* grad) {
  if (theta.size() != tpl.n_params)
    throw InvalidArgument("template expects " + std::to_string(tpl.n_params) + " parameters");
  const Eigen::Index d = Eigen::Index{1} << tpl.k;
  require(u_target.rows() == d && u_target.cols() == d, "target dimension does not match the template");
  const Eigen::Index h = std::max<Eigen::Index>(1, d / 2);
  const auto n_gates = tpl.gates.size();
  std::vector<Block> fwd;
  fwd.reserve(n_gates + 1);
  fwd.push_back(Block::Identity(d, h));
  for (const auto& g : tpl.gates) {
    Block next = fwd.back();
    apply_gate(next, tpl.k, g, theta, false);
    fwd.push_back(std::move(next));
  }
  const Block target = u_target.leftCols(h);
  const double loss = (target - fwd.back()).squaredNorm();
  if (!grad) return loss;
  grad->setZero(tpl.n_params);
  Block lam = target;
  for (std::size_t gi = n_gates; gi-- > 0;) {
    const auto& g = tpl.gates[gi];
    if (g.type == Gate::Type::u) {
      const Block& s = fwd[gi];
      const Eigen::Index bit = Eigen::Index{1} << (tpl.k - 1 - g.q0);
      cplx t[2][2] = {{0, 0}, {0, 0}};
      for (Eigen::Index c = 0; c < h; ++c)
        for (Eigen::Index i = 0; i < d; ++i) {
          if (i & bit) continue;
          const cplx l0 = std::conj(lam(i, c)), l1 = std::conj(lam(i | bit, c));
          const cplx s0 = s(i, c), s1 = s(i | bit, c);
          t[0][0] += l0 * s0;
          t[0][1] += l0 * s1;
          t[1][0] += l1 * s0;
          t[1][1] += l1 * s1;
        }
      const auto du = u_derivatives(theta(g.param), theta(g.param + 1), theta(g.param + 2));
      for (int p = 0; p < 3; ++p) {
        cplx acc = 0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) acc += du[static_cast<std::size_t>(p)](a, b) * t[a][b];
        (*grad)(g.param + p) = -2.0 * acc.real();
      }
    }
    apply_gate(lam, tpl.k, g, theta, true);
  }
  return loss;
}

void adam_step(AdamState& state, Eigen::VectorXd& x, const Eigen::VectorXd& grad, const AdamConfig& cfg) {
  if (state.m.size() != x.size()) state = AdamState(x.size());
  require(grad.size() == x.size(), "gradient size does not match the parameters");
  state.t += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, state.t);
  const double c2 = 1.0 - std::pow(cfg.beta2, state.t);
  const Eigen::VectorXd mhat = state.m / c1;
  const Eigen::VectorXd vhat = state.v / c2;
  x.array() -= cfg.learning_rate * mhat.array() / (vhat.array().sqrt() + cfg.epsilon);
}

CompileResult compile_gadget(const Matrix& u_target, const TemplateCircuit& tpl, const AdamConfig& cfg,
                             std::uint64_t seed) {
  require(cfg.restarts >= 1 && cfg.iterations >= 0, "invalid optimizer budget");
  const Eigen::Index d = Eigen::Index{1} << tpl.k;
  require(u_target.rows() == d && u_target.cols() == d, "target dimension does not match the template");
  CompileResult out;
  out.best_loss = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(seed, static_cast<std::uint64_t>(restart));
    Eigen::VectorXd theta(tpl.n_params);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = 2.0 * std::numbers::pi * rng.uniform();
    AdamState state(theta.size());
    Eigen::VectorXd grad(theta.size());
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(cfg.iterations + 1));
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta = theta;
    bool failed = false;
    for (int it = 0; it <= cfg.iterations; ++it) {
      const double loss = loss_and_gradient(tpl, u_target, theta, it < cfg.iterations ? &grad : nullptr);
      if (!std::isfinite(loss) || (it < cfg.iterations && !grad.allFinite())) {
        out.failures.push_back("restart " + std::to_string(restart) + ": non-finite loss at iteration " +
                               std::to_string(it));
        failed = true;
        break;
      }
      trace.push_back(loss);
      if (loss < best) {
        best = loss;
        best_theta = theta;
      }
      if (it < cfg.iterations) adam_step(state, theta, grad, cfg);
    }
    out.traces.push_back(std::move(trace));
    if (!failed || std::isfinite(best)) {
      if (best < out.best_loss) {
        out.best_loss = best;
        out.best_theta = best_theta;
        out.best_restart = restart;
      }
    }
  }
  if (out.best_restart < 0) throw ConvergenceFailure("every compilation restart failed");
  return out;
}

std::vector<double> best_so_far(const std::vector<double>& trace) {
  std::vector<double> out(trace.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.size(); ++i) out[i] = best = std::min(best, trace[i]);
  return out;
}

}  // namespace qgibbs
