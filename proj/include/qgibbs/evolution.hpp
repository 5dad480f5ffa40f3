#pragma once

#include "qgibbs/dissipator.hpp"
#include "qgibbs/gadget.hpp"
#include "qgibbs/rng.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace qgibbs {

enum class DrawMode { per_step, per_trajectory };

std::string to_string(DrawMode m);
DrawMode parse_draw_mode(const std::string& name);

struct TrotterPlan {
  double tau = 0.1;
  int steps = 0;
  /// Site application order; empty means ascending.
  std::vector<int> site_order;
  DrawMode draw_mode = DrawMode::per_step;
  double rescale_factor = 3.0;

  double time() const { return tau * steps; }
};

/// Seed plus trajectory index; the pair names one reproducible draw sequence.
struct TrajectoryKey {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

/// Jump index alpha[a] in {0, 1, 2} (X, Y, Z) for every step (per_step) or a
/// single row reused for all steps (per_trajectory).
std::vector<std::vector<int>> draw_alphas(const TrajectoryKey& key, int n_sites, const TrotterPlan& plan);

/// Local channels of one Lindbladian at one time step, built on demand.
/// On translation-invariant lattices one exponentiation serves every site.
class ChannelBank {
 public:
  ChannelBank(const TruncatedLindbladian& lind, double tau, double rescale_factor = 3.0);

  const TruncatedLindbladian& lindbladian() const { return lind_; }
  double tau() const { return tau_; }
  double rescale_factor() const { return rescale_; }
  bool real() const { return real_; }

  /// Qubit positions, in superoperator order, of the channels at `site`.
  const std::vector<int>& positions(int site) const;

  /// exp(tau sum_alpha L_{a,alpha}).
  const Matrix& deterministic(int site);
  /// exp(rescale * tau * L_{a,alpha}).
  const Matrix& sampled(int site, int alpha);
  /// (1/3) sum_alpha exp(rescale * tau * L_{a,alpha}).
  const Matrix& mean(int site);
  /// Gadget channel approximating exp(rescale * tau * L_{a,alpha}).
  const LocalChannel& gadget(int site, int alpha);

  /// Real forms of the superoperators above (valid when real() is true).
  const RMatrix& deterministic_real(int site);
  const RMatrix& sampled_real(int site, int alpha);
  const RMatrix& mean_real(int site);

 private:
  int reference(int site) const { return translate_ ? 0 : site; }
  const LocalGenerator& gen(int site, int alpha) const;

  TruncatedLindbladian lind_;
  double tau_;
  double rescale_;
  bool translate_;
  bool real_;
  std::vector<std::vector<int>> positions_;
  std::map<std::tuple<int, int, int>, Matrix> cache_;
  std::map<std::tuple<int, int, int>, RMatrix> cache_real_;
  std::map<std::pair<int, int>, LocalChannel> gadgets_;
};

using StepObserver = std::function<void(int step, const Matrix& rho)>;

/// [prod_a exp(tau sum_alpha L_{a,alpha})]^M in plan.site_order.
Matrix deterministic_trotter_evolve(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan,
                                    const StepObserver& observe = {}, int every = 1);
Matrix deterministic_trotter_evolve(const TruncatedLindbladian& lind, const Matrix& rho0,
                                    const TrotterPlan& plan);

/// Exact trajectory average in per_step mode: each site applies
/// (1/3) sum_alpha exp(rescale tau L_{a,alpha}) every step.
Matrix randomized_mean_evolve(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan,
                              const StepObserver& observe = {}, int every = 1);

/// One density-matrix trajectory with sampled jump indices.
Matrix sample_trajectory(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan,
                         const TrajectoryKey& key);

/// One statevector trajectory: every local channel is the gadget with the
/// ancilla measured in the computational basis and reset.
Vector sample_trajectory_statevector(ChannelBank& bank, const Vector& psi0, const TrotterPlan& plan,
                                     const TrajectoryKey& key);

struct EnsembleResult {
  Matrix mean_state;  // empty for statevector ensembles
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::vector<std::vector<double>> samples;  // per observable, per trajectory
  int n_traj = 0;
};

using DensityObservable = std::function<double(const Matrix&)>;
using VectorObservable = std::function<double(const Vector&)>;

/// Monte-Carlo average over density-matrix trajectories keyed (seed, 0..n_traj-1).
EnsembleResult mean_channel_estimate(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan,
                                     int n_traj, std::uint64_t seed,
                                     const std::vector<DensityObservable>& observables = {});

/// Statevector ensemble starting from uniformly sampled computational basis
/// states (the maximally mixed start) or from a fixed state when given.
EnsembleResult statevector_ensemble(ChannelBank& bank, const TrotterPlan& plan, int n_traj,
                                    std::uint64_t seed, const std::vector<VectorObservable>& observables,
                                    const Vector* psi0 = nullptr);

/// Exact average over all 3^n per_trajectory assignments (small n only).
Matrix exhaustive_per_trajectory_mean(ChannelBank& bank, const Matrix& rho0, const TrotterPlan& plan);

/// Dense superoperator of the full product-formula step (small lattices).
Matrix trotter_step_superop(ChannelBank& bank, bool randomized_mean, const std::vector<int>& order = {});

/// exp(t L) on a lattice small enough for the dense superoperator.
class SemigroupPropagator {
 public:
  explicit SemigroupPropagator(const TruncatedLindbladian& lind);

  /// e^{t L}(x) by Taylor stepping.
  Matrix evolve(const Matrix& x, double t) const;
  /// Dense superoperator of e^{t L} (up to 5 sites).
  Matrix channel(double t) const;
  const Matrix& generator() const { return s_; }

 private:
  int n_;
  Matrix s_;
  RMatrix s_real_;
  bool real_;
  double norm1_;
};

struct MixingEstimate {
  double rate = 0.0;          // fitted decay rate of log ||e^{tL}(rho - rho')||_1
  double fit_residual = 0.0;  // rms residual of the log-linear fit
  bool non_exponential = false;
  double t_mix = 0.0;         // first time the trace distance halves (worst pair)
  double gap = -1.0;          // dense spectral gap, -1 when not computed
  std::vector<double> times;
  std::vector<std::vector<double>> distances;  // per pair, trace norms on the grid
};

/// Orthogonal product-state pairs along Z, X and Y.
std::vector<std::pair<Matrix, Matrix>> default_mixing_pairs(int n);

MixingEstimate mixing_rate_estimate(const TruncatedLindbladian& lind,
                                    const std::vector<std::pair<Matrix, Matrix>>& pairs,
                                    const std::vector<double>& t_grid, bool with_gap = true);

/// Smallest nonzero |Re lambda| of the dense superoperator (up to 5 sites).
double spectral_gap(const TruncatedLindbladian& lind);

}  // namespace qgibbs
