#include "qgibbs/observables.hpp"

#include "qgibbs/spectral.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>

namespace qgibbs {
namespace {

int register_size(const Matrix& rho) {
  int n = 0;
  while ((Eigen::Index{1} << n) < rho.rows()) ++n;
  require((Eigen::Index{1} << n) == rho.rows() && rho.cols() == rho.rows(),
          "density matrix dimension is not a power of two");
  return n;
}

// sum_z rho(z, z) f(z) for a diagonal observable.
template <class F>
double diagonal_expectation(const Matrix& rho, F f) {
  double acc = 0.0;
  for (Eigen::Index z = 0; z < rho.rows(); ++z) acc += rho(z, z).real() * f(static_cast<std::uint64_t>(z));
  return acc;
}

}  // namespace

EnergyMetrics energy_metrics(const Matrix& rho, const LocalHamiltonian& h, const Matrix& rho_ref) {
  const int n = h.lattice.size();
  EnergyMetrics m;
  const double e = energy_expectation(rho, h);
  const double e_ref = energy_expectation(rho_ref, h);
  m.energy = e / n;
  m.reference = e_ref / n;
  m.delta = std::abs(e - e_ref) / n;
  return m;
}

double two_point_correlator(const Matrix& rho, int a1, int a2) {
  const int n = register_size(rho);
  require(a1 != a2, "two_point_correlator: sites must be distinct");
  require(a1 >= 0 && a1 < n && a2 >= 0 && a2 < n, "two_point_correlator: site outside register");
  const std::uint64_t b1 = std::uint64_t{1} << (n - 1 - a1);
  const std::uint64_t b2 = std::uint64_t{1} << (n - 1 - a2);
  auto s = [](std::uint64_t z, std::uint64_t bit) { return (z & bit) ? -0.5 : 0.5; };
  const double s1 = diagonal_expectation(rho, [&](std::uint64_t z) { return s(z, b1); });
  const double s2 = diagonal_expectation(rho, [&](std::uint64_t z) { return s(z, b2); });
  const double s12 = diagonal_expectation(rho, [&](std::uint64_t z) { return s(z, b1) * s(z, b2); });
  return s12 - s1 * s2;
}

std::vector<double> correlator_profile(const Matrix& rho, int max_separation) {
  const int n = register_size(rho);
  require(max_separation >= 1 && max_separation < n, "correlator_profile: separation out of range");
  const int a = n / 2;
  std::vector<double> out;
  for (int l = 1; l <= max_separation; ++l) out.push_back(two_point_correlator(rho, a, (a + l) % n));
  return out;
}

double heat_capacity(const Matrix& rho, const Matrix& h_dense, double beta) {
  require(rho.rows() == h_dense.rows(), "heat_capacity: dimension mismatch");
  // Local Hamiltonians are sparse in the computational basis.
  const Eigen::SparseMatrix<cplx> hs = h_dense.sparseView();
  const Matrix x = hs * rho;
  const double e1 = x.trace().real();
  cplx e2 = 0.0;
  for (Eigen::Index k = 0; k < hs.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(hs, k); it; ++it) e2 += it.value() * x(it.col(), it.row());
  return beta * beta * (e2.real() - e1 * e1);
}

double heat_capacity(const Matrix& rho, const LocalHamiltonian& h, double beta) {
  return heat_capacity(rho, to_dense(h), beta);
}

double gibbs_heat_capacity(const Eigen::VectorXd& energies, double beta) {
  const double e0 = energies.minCoeff();
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < energies.size(); ++i) {
    const double w = std::exp(-beta * (energies(i) - e0));
    z += w;
    m1 += w * energies(i);
    m2 += w * energies(i) * energies(i);
  }
  m1 /= z;
  m2 /= z;
  return beta * beta * (m2 - m1 * m1);
}

CorrelationFit correlation_length_fit(const std::vector<double>& separations,
                                      const std::vector<double>& delta) {
  require(separations.size() == delta.size(), "correlation_length_fit: length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < delta.size(); ++i)
    if (std::abs(delta[i]) > 1e-12) {
      x.push_back(separations[i]);
      y.push_back(std::log(std::abs(delta[i])));
    }
  require(x.size() >= 3, "correlation_length_fit: need at least three nonzero values");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = m * sxx - sx * sx;
  require(den > 0.0, "correlation_length_fit: separations must differ");
  CorrelationFit fit;
  fit.points = static_cast<int>(x.size());
  fit.slope = (m * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  // A flat or growing profile has no decay length.
  const double scale = std::max(1.0, std::abs(fit.intercept));
  fit.nonpositive_decay = !(fit.slope < -1e-12 * scale);
  fit.length = fit.nonpositive_decay ? std::numeric_limits<double>::infinity() : -1.0 / fit.slope;
  return fit;
}

JackknifeEstimate jackknife(const std::vector<std::vector<double>>& samples,
                            const std::function<double(const std::vector<double>&)>& f) {
  const std::size_t m = samples.size();
  require(m >= 2, "jackknife: need at least two samples");
  const std::size_t k = samples.front().size();
  std::vector<double> total(k, 0.0);
  for (const auto& s : samples) {
    require(s.size() == k, "jackknife: ragged samples");
    for (std::size_t j = 0; j < k; ++j) total[j] += s[j];
  }
  std::vector<double> mean(k);
  for (std::size_t j = 0; j < k; ++j) mean[j] = total[j] / static_cast<double>(m);
  const double full = f(mean);
  std::vector<double> loo(m);
  double loo_mean = 0.0;
  std::vector<double> partial(k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) partial[j] = (total[j] - samples[i][j]) / static_cast<double>(m - 1);
    loo[i] = f(partial);
    loo_mean += loo[i];
  }
  loo_mean /= static_cast<double>(m);
  double var = 0.0;
  for (double v : loo) var += (v - loo_mean) * (v - loo_mean);
  JackknifeEstimate out;
  out.value = static_cast<double>(m) * full - static_cast<double>(m - 1) * loo_mean;
  out.stderr_ = std::sqrt(var * static_cast<double>(m - 1) / static_cast<double>(m));
  return out;
}

}  // namespace qgibbs
