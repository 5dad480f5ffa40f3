#include "qgibbs/evolution.hpp"

#include "qgibbs/qubit_ops.hpp"
#include "qgibbs/superop.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qgibbs {

namespace {

enum Kind { kDeterministic = 0, kSampled = 1, kMean = 2 };

RMatrix real_jump(const Matrix& l) {
  Eigen::Index r = 0, c = 0;
  const double lmax = l.cwiseAbs().maxCoeff(&r, &c);
  if (lmax == 0) return RMatrix::Zero(l.rows(), l.cols());
  return (l / (l(r, c) / lmax)).real();
}

// I (x) K + K (x) I + sum R (x) R acting on vec of real matrices.
RMatrix real_generator_superop(const RMatrix& k, const std::vector<RMatrix>& jumps) {
  const auto d = k.rows();
  const RMatrix id = RMatrix::Identity(d, d);
  RMatrix s = Eigen::kroneckerProduct(id, k).eval();
  s += Eigen::kroneckerProduct(k, id).eval();
  for (const auto& r : jumps) s += Eigen::kroneckerProduct(r, r).eval();
  return s;
}

std::vector<int> resolve_order(const TrotterPlan& plan, int n) {
  if (plan.site_order.empty()) {
    std::vector<int> o(static_cast<std::size_t>(n));
    std::iota(o.begin(), o.end(), 0);
    return o;
  }
  require(static_cast<int>(plan.site_order.size()) == n, "site order must list every site once");
  std::vector<int> check = plan.site_order;
  std::sort(check.begin(), check.end());
  for (int i = 0; i < n; ++i) require(check[static_cast<std::size_t>(i)] == i, "site order must be a permutation");
  return plan.site_order;
}

void check_plan(const TrotterPlan& plan) {
  require(plan.tau > 0, "time step must be positive");
  require(plan.steps >= 0, "step count must be nonnegative");
  require(plan.rescale_factor > 0, "rescale factor must be positive");
}

bool is_real(const Matrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

// Density-matrix engine over the bank's superoperators.
template <class Scalar>
class DensityEngine {
 public:
  DensityEngine(ChannelBank& bank, int n) : bank_(bank) {
    for (int a = 0; a < n; ++a) idx_.push_back(make_support_index(n, bank.positions(a)));
  }

  void apply(DynMatrix<Scalar>& rho, int site, int kind, int alpha) {
    apply_superop<Scalar>(rho, fetch(site, kind, alpha), idx_[static_cast<std::size_t>(site)]);
  }

 private:
  const DynMatrix<Scalar>& fetch(int site, int kind, int alpha) {
    if constexpr (std::is_same_v<Scalar, double>) {
      if (kind == kDeterministic) return bank_.deterministic_real(site);
      if (kind == kSampled) return bank_.sampled_real(site, alpha);
      return bank_.mean_real(site);
    } else {
      if (kind == kDeterministic) return bank_.deterministic(site);
      if (kind == kSampled) return bank_.sampled(site, alpha);
      return bank_.mean(site);
    }
  }

  ChannelBank& bank_;
  std::vector<SupportIndex> idx_;
};

// Runs the product formula; `alpha_for(step, site)` returns -1 for the
// non-sampled kinds.
template <class Scalar, class AlphaFn>
Matrix run_density(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan, int kind,
                   AlphaFn alpha_for, const StepObserver& observe, int every) {
  const int n = bank.lindbladian().num_sites();
  require(rho0.rows() == (Eigen::Index{1} << n) && rho0.cols() == rho0.rows(),
          "state dimension does not match the lattice");
  const auto order = resolve_order(plan, n);
  DensityEngine<Scalar> engine(bank, n);
  DynMatrix<Scalar> rho;
  if constexpr (std::is_same_v<Scalar, double>)
    rho = rho0.real();
  else
    rho = rho0;
  auto emit = [&](int step) {
    if (!observe) return;
    if (step % std::max(every, 1) != 0 && step != plan.steps) return;
    observe(step, rho.template cast<cplx>());
  };
  emit(0);
  for (int m = 0; m < plan.steps; ++m) {
    for (int a : order) engine.apply(rho, a, kind, alpha_for(m, a));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    emit(m + 1);
  }
  return rho.template cast<cplx>();
}

template <class AlphaFn>
Matrix dispatch_density(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan, int kind,
                        AlphaFn alpha_for, const StepObserver& observe, int every) {
  check_plan(plan);
  if (bank.real() && is_real(rho0))
    return run_density<double>(bank, rho0, plan, kind, alpha_for, observe, every);
  return run_density<cplx>(bank, rho0, plan, kind, alpha_for, observe, every);
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

Matrix product_state(int n, const Vector& single) {
  Vector psi = single;
  for (int i = 1; i < n; ++i) psi = Eigen::kroneckerProduct(psi, single).eval();
  return psi * psi.adjoint();
}

}  // namespace

std::string to_string(DrawMode m) { return m == DrawMode::per_step ? "per_step" : "per_trajectory"; }

DrawMode parse_draw_mode(const std::string& name) {
  if (name == "per_step") return DrawMode::per_step;
  if (name == "per_trajectory") return DrawMode::per_trajectory;
  throw InvalidArgument("unknown draw mode '" + name + "'");
}

std::vector<std::vector<int>> draw_alphas(const TrajectoryKey& key, int n_sites, const TrotterPlan& plan) {
  Rng rng(key.seed, key.index);
  const int rows = plan.draw_mode == DrawMode::per_step ? plan.steps : 1;
  std::vector<std::vector<int>> out(static_cast<std::size_t>(rows), std::vector<int>(static_cast<std::size_t>(n_sites)));
  for (auto& row : out)
    for (auto& a : row) a = rng.below(3);
  return out;
}

ChannelBank::ChannelBank(const TruncatedLindbladian& lind, double tau, double rescale_factor)
    : lind_(lind), tau_(tau), rescale_(rescale_factor) {
  require(tau > 0, "time step must be positive");
  require(rescale_factor > 0, "rescale factor must be positive");
  translate_ = lind.translation_invariant && lind.lattice.fully_periodic();
  real_ = lind.real_representable();
  const int n = lind.num_sites();
  for (int a = 0; a < n; ++a) {
    const auto& sup = lind.at(reference(a), Pauli::X).support;
    if (sup.size() > kMaxSuperopQubits)
      throw ResourceCapExceeded("local channel support of " + std::to_string(sup.size()) +
                                " sites exceeds the superoperator cap");
    std::vector<int> pos;
    for (int s : sup) pos.push_back(translate_ ? lind.lattice.translate(s, 0, a) : s);
    positions_.push_back(std::move(pos));
  }
}

const std::vector<int>& ChannelBank::positions(int site) const {
  return positions_.at(static_cast<std::size_t>(site));
}

const LocalGenerator& ChannelBank::gen(int site, int alpha) const {
  static constexpr Pauli kAlphas[3] = {Pauli::X, Pauli::Y, Pauli::Z};
  require(alpha >= 0 && alpha < 3, "jump index out of range");
  return lind_.at(site, kAlphas[alpha]);
}

const Matrix& ChannelBank::deterministic(int site) {
  const int ref = reference(site);
  auto key = std::make_tuple(static_cast<int>(kDeterministic), ref, -1);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_[key] = expm(Matrix(tau_ * site_superop(lind_, ref)));
}

const Matrix& ChannelBank::sampled(int site, int alpha) {
  const int ref = reference(site);
  auto key = std::make_tuple(static_cast<int>(kSampled), ref, alpha);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_[key] = expm(Matrix(rescale_ * tau_ * local_superop(gen(ref, alpha))));
}

const Matrix& ChannelBank::mean(int site) {
  const int ref = reference(site);
  auto key = std::make_tuple(static_cast<int>(kMean), ref, -1);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Matrix m = (sampled(ref, 0) + sampled(ref, 1) + sampled(ref, 2)) / 3.0;
  return cache_[key] = std::move(m);
}

const RMatrix& ChannelBank::deterministic_real(int site) {
  require(real_, "real channels requested for a complex generator");
  const int ref = reference(site);
  auto key = std::make_tuple(static_cast<int>(kDeterministic), ref, -1);
  auto it = cache_real_.find(key);
  if (it != cache_real_.end()) return it->second;
  RMatrix k = RMatrix::Zero(gen(ref, 0).L.rows(), gen(ref, 0).L.cols());
  std::vector<RMatrix> jumps;
  for (int a = 0; a < 3; ++a) {
    k += gen(ref, a).K().real();
    jumps.push_back(real_jump(gen(ref, a).L));
  }
  return cache_real_[key] = expm(RMatrix(tau_ * real_generator_superop(k, jumps)));
}

const RMatrix& ChannelBank::sampled_real(int site, int alpha) {
  require(real_, "real channels requested for a complex generator");
  const int ref = reference(site);
  auto key = std::make_tuple(static_cast<int>(kSampled), ref, alpha);
  auto it = cache_real_.find(key);
  if (it != cache_real_.end()) return it->second;
  const auto& g = gen(ref, alpha);
  const RMatrix s = real_generator_superop(g.K().real(), {real_jump(g.L)});
  return cache_real_[key] = expm(RMatrix(rescale_ * tau_ * s));
}

const RMatrix& ChannelBank::mean_real(int site) {
  const int ref = reference(site);
  auto key = std::make_tuple(static_cast<int>(kMean), ref, -1);
  auto it = cache_real_.find(key);
  if (it != cache_real_.end()) return it->second;
  RMatrix m = (sampled_real(ref, 0) + sampled_real(ref, 1) + sampled_real(ref, 2)) / 3.0;
  return cache_real_[key] = std::move(m);
}

const LocalChannel& ChannelBank::gadget(int site, int alpha) {
  const int ref = reference(site);
  auto key = std::make_pair(ref, alpha);
  auto it = gadgets_.find(key);
  if (it != gadgets_.end()) return it->second;
  const auto& g = gen(ref, alpha);
  return gadgets_[key] = gadget_channel(g.L, g.G, rescale_ * tau_);
}

Matrix deterministic_trotter_evolve(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan,
                                    const StepObserver& observe, int every) {
  return dispatch_density(bank, rho0, plan, kDeterministic, [](int, int) { return -1; }, observe, every);
}

Matrix deterministic_trotter_evolve(const TruncatedLindbladian& lind, const Matrix& rho0,
                                    const TrotterPlan& plan) {
  ChannelBank bank(lind, plan.tau, plan.rescale_factor);
  return deterministic_trotter_evolve(bank, rho0, plan);
}

Matrix randomized_mean_evolve(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan,
                              const StepObserver& observe, int every) {
  return dispatch_density(bank, rho0, plan, kMean, [](int, int) { return -1; }, observe, every);
}

Matrix sample_trajectory(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan,
                         const TrajectoryKey& key) {
  const int n = bank.lindbladian().num_sites();
  const auto draws = draw_alphas(key, n, plan);
  const bool per_step = plan.draw_mode == DrawMode::per_step;
  return dispatch_density(
      bank, rho0, plan, kSampled,
      [&](int m, int a) { return draws[per_step ? static_cast<std::size_t>(m) : 0][static_cast<std::size_t>(a)]; },
      {}, 1);
}

Vector sample_trajectory_statevector(ChannelBank& bank, const Vector& psi0, const TrotterPlan& plan,
                                     const TrajectoryKey& key) {
  check_plan(plan);
  const int n = bank.lindbladian().num_sites();
  require(psi0.size() == (Eigen::Index{1} << n), "state dimension does not match the lattice");
  const auto order = resolve_order(plan, n);
  const auto draws = draw_alphas(key, n, plan);
  Rng outcomes(key.seed ^ 0x5bd1e9955bd1e995ULL, key.index);
  std::vector<SupportIndex> idx;
  for (int a = 0; a < n; ++a) idx.push_back(make_support_index(n, bank.positions(a)));
  Vector psi = psi0 / psi0.norm();
  const bool per_step = plan.draw_mode == DrawMode::per_step;
  for (int m = 0; m < plan.steps; ++m)
    for (int a : order) {
      const int alpha = draws[per_step ? static_cast<std::size_t>(m) : 0][static_cast<std::size_t>(a)];
      const auto& ch = bank.gadget(a, alpha);
      Vector branch0 = psi;
      apply_to_vector<cplx>(branch0, ch.k0, idx[static_cast<std::size_t>(a)]);
      const double p0 = branch0.squaredNorm();
      if (outcomes.uniform() < p0) {
        psi = branch0 / std::sqrt(p0);
      } else {
        apply_to_vector<cplx>(psi, ch.k1, idx[static_cast<std::size_t>(a)]);
        psi /= psi.norm();
      }
    }
  return psi;
}

EnsembleResult mean_channel_estimate(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan,
                                     int n_traj, std::uint64_t seed,
                                     const std::vector<DensityObservable>& observables) {
  require(n_traj >= 1, "need at least one trajectory");
  EnsembleResult out;
  out.n_traj = n_traj;
  out.mean_state = Matrix::Zero(rho0.rows(), rho0.cols());
  std::vector<std::vector<double>> values(observables.size());
  for (int t = 0; t < n_traj; ++t) {
    const Matrix rho = sample_trajectory(bank, rho0, plan, {seed, static_cast<std::uint64_t>(t)});
    out.mean_state += rho;
    for (std::size_t k = 0; k < observables.size(); ++k) values[k].push_back(observables[k](rho));
  }
  out.mean_state /= static_cast<double>(n_traj);
  for (const auto& v : values) {
    out.mean.push_back(mean_of(v));
    out.stderr_.push_back(stderr_of(v));
  }
  out.samples = std::move(values);
  return out;
}

EnsembleResult statevector_ensemble(ChannelBank& bank, const TrotterPlan& plan, int n_traj,
                                    std::uint64_t seed, const std::vector<VectorObservable>& observables,
                                    const Vector* psi0) {
  require(n_traj >= 1, "need at least one trajectory");
  const int n = bank.lindbladian().num_sites();
  const Eigen::Index dim = Eigen::Index{1} << n;
  EnsembleResult out;
  out.n_traj = n_traj;
  std::vector<std::vector<double>> values(observables.size());
  for (int t = 0; t < n_traj; ++t) {
    Vector start;
    if (psi0) {
      start = *psi0;
    } else {
      Rng pick(seed ^ 0x2545f4914f6cdd1dULL, static_cast<std::uint64_t>(t));
      start = Vector::Zero(dim);
      start(pick.below(static_cast<int>(dim))) = 1;
    }
    const Vector psi = sample_trajectory_statevector(bank, start, plan, {seed, static_cast<std::uint64_t>(t)});
    for (std::size_t k = 0; k < observables.size(); ++k) values[k].push_back(observables[k](psi));
  }
  for (const auto& v : values) {
    out.mean.push_back(mean_of(v));
    out.stderr_.push_back(stderr_of(v));
  }
  out.samples = std::move(values);
  return out;
}

Matrix exhaustive_per_trajectory_mean(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan) {
  const int n = bank.lindbladian().num_sites();
  require(n <= 6, "exhaustive enumeration limited to 6 sites");
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  Matrix acc = Matrix::Zero(rho0.rows(), rho0.cols());
  std::vector<int> alpha(static_cast<std::size_t>(n));
  for (int code = 0; code < total; ++code) {
    int c = code;
    for (int a = 0; a < n; ++a) {
      alpha[static_cast<std::size_t>(a)] = c % 3;
      c /= 3;
    }
    acc += dispatch_density(bank, rho0, plan, kSampled,
                            [&](int, int a) { return alpha[static_cast<std::size_t>(a)]; }, {}, 1);
  }
  return acc / static_cast<double>(total);
}

Matrix trotter_step_superop(ChannelBank& bank, bool randomized_mean, const std::vector<int>& order) {
  const int n = bank.lindbladian().num_sites();
  require(n <= 4, "step superoperator limited to 4 sites");
  TrotterPlan plan;
  plan.tau = bank.tau();
  plan.steps = 1;
  plan.site_order = order;
  plan.rescale_factor = bank.rescale_factor();
  const Eigen::Index dim = Eigen::Index{1} << n;
  auto step = [&](const Matrix& x) {
    return randomized_mean ? randomized_mean_evolve(bank, x, plan) : deterministic_trotter_evolve(bank, x, plan);
  };
  // The evolution symmetrizes its state, so feed it Hermitian parts only.
  return superop_from_map(dim, [&](const Matrix& x) {
    const Matrix a = 0.5 * (x + x.adjoint());
    const Matrix b = (x - x.adjoint()) / (2.0 * kI);
    return Matrix(step(a) + kI * step(b));
  });
}

SemigroupPropagator::SemigroupPropagator(const TruncatedLindbladian& lind)
    : n_(lind.num_sites()), s_(full_superop(lind)), real_(lind.real_representable()) {
  if (real_) s_real_ = s_.real();
  norm1_ = s_.cwiseAbs().colwise().sum().maxCoeff();
}

Matrix SemigroupPropagator::evolve(const Matrix& x, double t) const {
  require(t >= 0, "evolution time must be nonnegative");
  const Eigen::Index dim = Eigen::Index{1} << n_;
  require(x.rows() == dim && x.cols() == dim, "operator dimension does not match the lattice");
  if (t == 0) return x;
  const int sub = std::max(1, static_cast<int>(std::ceil(t * norm1_)));
  const double h = t / sub;
  auto taylor = [&](auto& v, const auto& s) {
    using V = std::decay_t<decltype(v)>;
    for (int k = 0; k < sub; ++k) {
      V term = v;
      V acc = v;
      for (int j = 1; j < 80; ++j) {
        term = (s * term).eval() * (h / j);
        acc += term;
        if (term.norm() <= 1e-17 * acc.norm()) break;
      }
      v = acc;
    }
  };
  if (real_) {
    const RMatrix xr = x.real();
    const RMatrix xi = x.imag();
    Eigen::VectorXd re = xr.reshaped();
    Eigen::VectorXd im = xi.reshaped();
    taylor(re, s_real_);
    if (im.norm() > 0) taylor(im, s_real_);
    Matrix out(dim, dim);
    out.real() = re.reshaped(dim, dim);
    out.imag() = im.reshaped(dim, dim);
    return out;
  }
  Vector v = x.reshaped();
  taylor(v, s_);
  return v.reshaped(dim, dim);
}

Matrix SemigroupPropagator::channel(double t) const {
  require(n_ <= 5, "dense semigroup channel limited to 5 sites");
  return expm(Matrix(t * s_));
}

std::vector<std::pair<Matrix, Matrix>> default_mixing_pairs(int n) {
  const double h = 1.0 / std::sqrt(2.0);
  Vector z0(2), z1(2), xp(2), xm(2), yp(2), ym(2);
  z0 << 1, 0;
  z1 << 0, 1;
  xp << h, h;
  xm << h, -h;
  yp << h, cplx(0, h);
  ym << h, cplx(0, -h);
  return {{product_state(n, z0), product_state(n, z1)},
          {product_state(n, xp), product_state(n, xm)},
          {product_state(n, yp), product_state(n, ym)}};
}

double spectral_gap(const TruncatedLindbladian& lind) {
  require(lind.num_sites() <= 5, "dense spectral gap limited to 5 sites");
  const Matrix s = full_superop(lind);
  Eigen::ComplexEigenSolver<Matrix> es(s, false);
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx l = es.eigenvalues()(i);
    if (std::abs(l) < 1e-9 * scale) continue;
    gap = std::min(gap, -l.real());
  }
  return gap;
}

MixingEstimate mixing_rate_estimate(const TruncatedLindbladian& lind,
                                    const std::vector<std::pair<Matrix, Matrix>>& pairs,
                                    const std::vector<double>& t_grid, bool with_gap) {
  require(lind.num_sites() <= 6, "mixing estimate limited to 6 sites");
  require(t_grid.size() >= 3, "mixing estimate needs at least three times");
  require(std::is_sorted(t_grid.begin(), t_grid.end()) && t_grid.front() >= 0, "time grid must be sorted");
  SemigroupPropagator prop(lind);
  MixingEstimate out;
  out.times = t_grid;
  out.t_mix = 0;
  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : pairs) {
    Matrix delta = a - b;
    const double d0 = trace_norm_hermitian(Matrix(0.5 * (delta + delta.adjoint())));
    std::vector<double> dist;
    double prev_t = 0;
    for (double t : t_grid) {
      delta = prop.evolve(delta, t - prev_t);
      prev_t = t;
      dist.push_back(trace_norm_hermitian(Matrix(0.5 * (delta + delta.adjoint()))));
    }
    // First halving, log-linear interpolation between grid points.
    double t_half = std::numeric_limits<double>::infinity();
    double last_t = 0, last_d = d0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
      if (dist[k] <= 0.5 * d0) {
        const double target = std::log(0.5 * d0);
        const double l0 = std::log(last_d), l1 = std::log(std::max(dist[k], 1e-300));
        t_half = l0 == l1 ? t_grid[k] : last_t + (target - l0) / (l1 - l0) * (t_grid[k] - last_t);
        break;
      }
      last_t = t_grid[k];
      last_d = dist[k];
    }
    out.t_mix = std::max(out.t_mix, t_half);
    // Least-squares slope of log distance over the grid.
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < dist.size(); ++k)
      if (dist[k] > 1e-12) {
        xs.push_back(t_grid[k]);
        ys.push_back(std::log(dist[k]));
      }
    if (xs.size() >= 2) {
      const double mx = mean_of(xs), my = mean_of(ys);
      double sxy = 0, sxx = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
      }
      const double slope = sxy / sxx;
      double rss = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (my + slope * (xs[k] - mx));
        rss += e * e;
      }
      const double rms = std::sqrt(rss / static_cast<double>(xs.size()));
      if (-slope < slowest) {
        slowest = -slope;
        out.fit_residual = rms;
      }
    }
    out.distances.push_back(std::move(dist));
  }
  out.rate = std::isfinite(slowest) ? slowest : 0.0;
  out.non_exponential = out.fit_residual > 0.05 || out.rate <= 0;
  if (with_gap && lind.num_sites() <= 4) out.gap = spectral_gap(lind);
  return out;
}

}  // namespace qgibbs
