#include "qgibbs/verify.hpp"

#include "qgibbs/compiler.hpp"
#include "qgibbs/evolution.hpp"
#include "qgibbs/gadget.hpp"
#include "qgibbs/rng.hpp"
#include "qgibbs/steady_state.hpp"
#include "qgibbs/superop.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace qgibbs {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

LocalHamiltonian mfi_chain(int n) { return build_model("mfi", Lattice::chain(n)); }

TruncatedLindbladian lindbladian(const LocalHamiltonian& h, double beta, int r, bool corrupt = false) {
  LindbladOptions o;
  o.boltzmann_weight = !corrupt;
  return build_lindbladian(h, beta, r, Envelope{EnvelopeKind::gaussian, beta}, o);
}

// Runs `body` and records its value against an upper or two-sided bound.
class Runner {
 public:
  void at_most(const std::string& name, double bound, const std::function<double()>& body) {
    run(name, "<= " + fmt(bound), [&](double v) { return v <= bound; }, body);
  }
  void within(const std::string& name, double lo, double hi, const std::function<double()>& body) {
    run(name, "in [" + fmt(lo) + ", " + fmt(hi) + "]", [&](double v) { return v >= lo && v <= hi; }, body);
  }
  VerifyReport report;

 private:
  void run(const std::string& name, const std::string& criterion, const std::function<bool(double)>& ok,
           const std::function<double()>& body) {
    CheckResult c;
    c.name = name;
    c.criterion = criterion;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.value = body();
      c.pass = std::isfinite(c.value) && ok(c.value);
    } catch (const std::exception& e) {
      c.value = std::nan("");
      c.criterion += " (error: " + std::string(e.what()) + ")";
      c.pass = false;
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.checks.push_back(std::move(c));
  }
};

}  // namespace

VerifyLevel parse_verify_level(const std::string& name) {
  if (name == "fast") return VerifyLevel::fast;
  if (name == "full") return VerifyLevel::full;
  throw InvalidArgument("unknown verify level '" + name + "'");
}

bool VerifyReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string VerifyReport::text() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", c.value);
    os << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << buf << " " << c.criterion << " ("
       << fmt(c.seconds) << " s)\n";
  }
  os << (ok() ? "all checks passed" : "verification FAILED") << "\n";
  return os.str();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need matching inputs of length >= 2");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0, "loglog_slope: inputs must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<double> trotter_error_curve(const TruncatedLindbladian& lind, double t, const std::vector<int>& ms,
                                        bool randomized, double rescale_factor) {
  const Matrix exact = SemigroupPropagator(lind).channel(t);
  std::vector<double> out;
  for (int m : ms) {
    require(m >= 1, "trotter_error_curve: step counts must be positive");
    ChannelBank bank(lind, t / m, rescale_factor);
    const Matrix step = trotter_step_superop(bank, randomized);
    Matrix total = Matrix::Identity(step.rows(), step.cols());
    for (int k = 0; k < m; ++k) total = step * total;
    out.push_back(diamond_bounds(total, exact).second);
  }
  return out;
}

std::vector<double> gadget_error_curve(const LocalGenerator& g, const std::vector<double>& taus) {
  std::vector<double> out;
  for (double tau : taus) out.push_back(gadget_error_bounds(g.L, g.G, tau).second);
  return out;
}

VerifyReport run_verify(const VerifyOptions& opts) {
  Runner run;
  const bool corrupt = opts.corrupt_jump_weight;

  run.at_most("kms_detailed_balance_mfi_n3", 1e-8, [&] {
    const auto h = mfi_chain(3);
    return kms_residual(lindbladian(h, 0.5, 1, corrupt), h);
  });
  run.at_most("kms_local_terms_mfi_n4_r1", 1e-8, [&] {
    const auto h = mfi_chain(4);
    return local_kms_residual(lindbladian(h, 1.0, 1, corrupt), h);
  });
  run.at_most("beta0_matches_depolarizing_n2", 1e-10, [&] {
    const auto h = mfi_chain(2);
    const Matrix diff = full_superop(lindbladian(h, 0.0, 1)) - depolarizing_generator_superop(2);
    return induced_trace_norm_bounds(diff).second;
  });
  run.at_most("fixed_point_is_gibbs_n4", 1e-6, [&] {
    const auto h = mfi_chain(4);
    const auto lind = lindbladian(h, 1.0, h.lattice.diameter());
    const auto ss = steady_state(lind);
    return trace_norm_hermitian(Matrix(ss.rho - gibbs_state(h, 1.0)));
  });
  run.within("trotter_error_slope_n2", -1.3, -0.7, [&] {
    const auto h = mfi_chain(2);
    const std::vector<int> ms{8, 16, 32, 64};
    const auto err = trotter_error_curve(lindbladian(h, 1.0, 1), 2.0, ms, true);
    return loglog_slope(std::vector<double>(ms.begin(), ms.end()), err);
  });
  run.within("gadget_error_slope_r1", 1.7, 2.3, [&] {
    const auto h = mfi_chain(4);
    const auto lind = lindbladian(h, 1.0, 1);
    const std::vector<double> taus{0.02, 0.05, 0.1, 0.2, 0.5};
    return loglog_slope(taus, gadget_error_curve(lind.at(1, Pauli::X), taus));
  });
  run.at_most("compiler_gradient_vs_finite_difference", 1e-6, [&] {
    const auto tpl = pair_template(2);
    Rng rng(2024, 7);
    Matrix a(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) a(i, j) = cplx(rng.normal(), rng.normal());
    const Matrix target = expm(Matrix(kI * (a + a.adjoint()) * 0.5));
    Eigen::VectorXd theta(tpl.n_params);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = 2 * std::numbers::pi * rng.uniform();
    Eigen::VectorXd grad;
    loss_and_gradient(tpl, target, theta, &grad);
    double worst = 0;
    const double step = 1e-6;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Eigen::VectorXd p = theta, m = theta;
      p(i) += step;
      m(i) -= step;
      const double fd = (loss_and_gradient(tpl, target, p, nullptr) - loss_and_gradient(tpl, target, m, nullptr)) /
                        (2 * step);
      worst = std::max(worst, std::abs(fd - grad(i)) / std::max(1.0, std::abs(grad(i))));
    }
    return worst;
  });

  if (opts.level == VerifyLevel::full) {
    run.at_most("kms_detailed_balance_mfi_n4_beta1", 1e-8, [&] {
      const auto h = mfi_chain(4);
      return kms_residual(lindbladian(h, 1.0, h.lattice.diameter(), corrupt), h);
    });
    run.at_most("steady_state_n8_distance_growth_over_r", 0.0, [&] {
      const auto h = mfi_chain(8);
      const Matrix gibbs = gibbs_state(h, 1.0);
      SteadyStateOptions so;
      so.initial_hamiltonian = &h;
      double prev = std::numeric_limits<double>::infinity(), worst_increase = 0;
      for (int r = 1; r <= 3; ++r) {
        const auto ss = steady_state(lindbladian(h, 1.0, r), so);
        const double d = trace_norm_hermitian(Matrix(ss.rho - gibbs));
        if (std::isfinite(prev)) worst_increase = std::max(worst_increase, d - prev);
        prev = d;
      }
      return worst_increase;
    });
  }
  return run.report;
}

}  // namespace qgibbs
