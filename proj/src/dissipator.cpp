#include "qgibbs/dissipator.hpp"

#include "qgibbs/qubit_ops.hpp"
#include "qgibbs/superop.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>

namespace qgibbs {

namespace {

constexpr Pauli kAlphas[3] = {Pauli::X, Pauli::Y, Pauli::Z};

double bohr_tol_for(const SpectralDecomposition& dec, const LindbladOptions& opts) {
  return opts.bohr_tol > 0 ? opts.bohr_tol : default_bohr_tolerance(dec);
}

Matrix sqrt_psd(const Matrix& rho, bool inverse) {
  const auto dec = eig_hermitian(rho);
  return hermitian_function(dec, [inverse](double x) {
    const double s = std::sqrt(std::max(x, 0.0));
    return cplx{inverse ? 1.0 / s : s};
  });
}

}  // namespace

std::string to_string(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::gaussian: return "gaussian";
    case EnvelopeKind::flat: return "flat";
    case EnvelopeKind::smoothed_mh: return "smoothed_mh";
    case EnvelopeKind::fixed_gaussian: return "fixed_gaussian";
  }
  return "gaussian";
}

EnvelopeKind parse_envelope(const std::string& name) {
  if (name == "gaussian") return EnvelopeKind::gaussian;
  if (name == "flat") return EnvelopeKind::flat;
  if (name == "smoothed_mh") return EnvelopeKind::smoothed_mh;
  if (name == "fixed_gaussian") return EnvelopeKind::fixed_gaussian;
  throw InvalidArgument("unknown envelope '" + name + "'");
}

double Envelope::operator()(double nu) const {
  const double bn = beta * nu;
  switch (kind) {
    case EnvelopeKind::gaussian: return std::exp(-bn * bn / 8.0);
    case EnvelopeKind::flat: return 1.0;
    case EnvelopeKind::smoothed_mh: return std::exp(-std::sqrt(1.0 + bn * bn) / 4.0);
    case EnvelopeKind::fixed_gaussian: return std::exp(-nu * nu / 2.0);
  }
  return 1.0;
}

Matrix LocalGenerator::K() const { return -kI * G - 0.5 * L.adjoint() * L; }

const LocalGenerator& TruncatedLindbladian::at(int site, Pauli alpha) const {
  const int k = alpha == Pauli::X ? 0 : alpha == Pauli::Y ? 1 : 2;
  require(site >= 0 && site < num_sites(), "site out of range");
  return generators[static_cast<std::size_t>(3 * site + k)];
}

bool TruncatedLindbladian::real_representable(double tol) const {
  for (const auto& g : generators) {
    const Matrix k = g.K();
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    if (k.imag().cwiseAbs().maxCoeff() > tol * scale) return false;
    Eigen::Index r = 0, c = 0;
    const double lmax = g.L.cwiseAbs().maxCoeff(&r, &c);
    if (lmax == 0) continue;
    const cplx phase = g.L(r, c) / lmax;
    const Matrix rotated = g.L / phase;
    if (rotated.imag().cwiseAbs().maxCoeff() > tol * std::max(1.0, lmax)) return false;
  }
  return true;
}

Matrix jump_source(Pauli alpha, int site, const Region& support, double jump_scale) {
  return jump_scale * embed_single_site(pauli_matrix(alpha), site, support);
}

Matrix build_jump_operator(const Matrix& a, const SpectralDecomposition& dec,
                           const BohrSpectrum& bohr, double beta, const Envelope& q,
                           bool boltzmann_weight) {
  return weighted_components(a, dec, bohr, [&](double nu) {
    const double boltz = boltzmann_weight ? std::exp(-beta * nu / 4.0) : 1.0;
    return cplx{q(nu) * boltz};
  });
}

Matrix build_jump_operator(const Matrix& h_loc, const Matrix& a, double beta, const Envelope& q,
                           bool boltzmann_weight) {
  const auto dec = eig_hermitian(h_loc);
  const auto bohr = bohr_spectrum(dec, default_bohr_tolerance(dec));
  return build_jump_operator(a, dec, bohr, beta, q, boltzmann_weight);
}

Matrix build_coherent_term(const Matrix& l, const SpectralDecomposition& dec,
                           const BohrSpectrum& bohr, double beta) {
  const Matrix ldl = l.adjoint() * l;
  Matrix g = weighted_components(ldl, dec, bohr, [beta](double nu) {
    return -0.5 * kI * std::tanh(-beta * nu / 4.0);
  });
  return 0.5 * (g + g.adjoint());
}

TruncatedLindbladian build_lindbladian(const LocalHamiltonian& h, double beta, int r,
                                       const Envelope& q, const LindbladOptions& opts) {
  require(r >= 0, "truncation radius must be nonnegative");
  require(beta >= 0, "inverse temperature must be nonnegative");
  const Lattice& lat = h.lattice;
  TruncatedLindbladian out{lat, beta, r, q, opts, {}, h.translation_invariant};
  out.generators.reserve(static_cast<std::size_t>(3 * lat.size()));
  for (int a = 0; a < lat.size(); ++a) {
    const auto patch = truncate_hamiltonian(h, a, r);
    if (patch.support.size() > kMaxDenseQubits)
      throw ResourceCapExceeded("truncation ball of " + std::to_string(patch.support.size()) +
                                " sites exceeds the eigensolver cap");
    const auto dec = eig_hermitian(to_dense(patch));
    const auto bohr = bohr_spectrum(dec, bohr_tol_for(dec, opts));
    for (Pauli alpha : kAlphas) {
      LocalGenerator g;
      g.site = a;
      g.alpha = alpha;
      g.support = patch.support;
      const Matrix src = jump_source(alpha, a, patch.support, opts.jump_scale);
      g.L = build_jump_operator(src, dec, bohr, beta, q, opts.boltzmann_weight);
      g.G = build_coherent_term(g.L, dec, bohr, beta);
      out.generators.push_back(std::move(g));
    }
  }
  return out;
}

TruncatedLindbladian renormalize_envelope(const TruncatedLindbladian& lind,
                                          const LocalHamiltonian& h) {
  const auto ref = build_lindbladian(h, lind.beta, lind.r, Envelope{EnvelopeKind::gaussian, lind.beta},
                                     lind.options);
  TruncatedLindbladian out = lind;
  for (int a = 0; a < lind.num_sites(); ++a) {
    double phi_ref = 0, phi = 0;
    for (int k = 0; k < 3; ++k) {
      phi_ref += ref.generators[static_cast<std::size_t>(3 * a + k)].L.norm() / 3.0;
      phi += lind.generators[static_cast<std::size_t>(3 * a + k)].L.norm() / 3.0;
    }
    if (phi == 0 || phi_ref == 0)
      throw InvalidArgument("cannot renormalize a vanishing jump operator at site " + std::to_string(a));
    const double ratio = phi_ref / phi;
    for (int k = 0; k < 3; ++k) {
      auto& g = out.generators[static_cast<std::size_t>(3 * a + k)];
      g.L *= ratio;
      g.G *= ratio * ratio;
    }
  }
  return out;
}

Matrix apply_local_term(const LocalGenerator& g, const Matrix& x) {
  const Matrix k = g.K();
  return k * x + x * k.adjoint() + g.L * x * g.L.adjoint();
}

Matrix apply_generator(const TruncatedLindbladian& lind, const Matrix& rho) {
  const int n = lind.num_sites();
  require(n <= kMaxDenseQubits, "density matrix exceeds the dense cap");
  require(rho.rows() == (Eigen::Index{1} << n) && rho.cols() == rho.rows(),
          "state dimension does not match the lattice");
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (std::size_t i = 0; i < lind.generators.size(); i += 3) {
    const auto& sup = lind.generators[i].support;
    const auto idx = make_support_index(n, sup.sites());
    Matrix k = Matrix::Zero(1 << sup.size(), 1 << sup.size());
    for (std::size_t j = i; j < i + 3; ++j) k += lind.generators[j].K();
    Matrix y = rho;
    left_apply<cplx>(y, k, idx);
    out += y;
    y = rho;
    Matrix kd = k.adjoint();
    right_apply<cplx>(y, kd, idx);
    out += y;
    for (std::size_t j = i; j < i + 3; ++j) {
      const auto& l = lind.generators[j].L;
      y = rho;
      left_apply<cplx>(y, l, idx);
      Matrix ld = l.adjoint();
      right_apply<cplx>(y, ld, idx);
      out += y;
    }
  }
  return out;
}

Matrix local_superop(const LocalGenerator& g) {
  require(g.support.size() <= kMaxSuperopQubits, "superoperator exceeds the cap");
  return generator_superop(g.K(), {g.L});
}

Matrix site_superop(const TruncatedLindbladian& lind, int site) {
  const auto& first = lind.at(site, Pauli::X);
  require(first.support.size() <= kMaxSuperopQubits, "superoperator exceeds the cap");
  Matrix k = Matrix::Zero(first.L.rows(), first.L.cols());
  std::vector<Matrix> jumps;
  for (Pauli alpha : kAlphas) {
    const auto& g = lind.at(site, alpha);
    k += g.K();
    jumps.push_back(g.L);
  }
  return generator_superop(k, jumps);
}

Matrix full_superop(const TruncatedLindbladian& lind) {
  const int n = lind.num_sites();
  if (n > 6) throw ResourceCapExceeded("full superoperator limited to 6 sites");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix k = Matrix::Zero(dim, dim);
  std::vector<Matrix> jumps;
  for (const auto& g : lind.generators) {
    const auto idx = make_support_index(n, g.support.sites());
    k += embed_operator(g.K(), idx);
    jumps.push_back(embed_operator(g.L, idx));
  }
  return generator_superop(k, jumps);
}

Matrix depolarizing_generator_superop(int n) {
  require(n >= 1 && n <= 6, "depolarizing generator limited to 6 sites");
  const Eigen::Index dim = Eigen::Index{1} << n;
  return superop_from_map(dim, [n, dim](const Matrix& x) {
    Matrix out = -static_cast<double>(n) * x;
    for (int a = 0; a < n; ++a) {
      const std::uint32_t bit = std::uint32_t{1} << (n - 1 - a);
      // tr_a(X) (x) I_a / 2: average the two diagonal blocks on qubit a.
      for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) {
          if (((i ^ j) & bit) != 0) continue;
          const Eigen::Index i0 = i & ~static_cast<Eigen::Index>(bit), j0 = j & ~static_cast<Eigen::Index>(bit);
          out(i, j) += 0.5 * (x(i0, j0) + x(i0 | bit, j0 | bit));
        }
    }
    return out;
  });
}

Matrix gibbs_state(const Matrix& h_dense, double beta) {
  require(beta >= 0, "inverse temperature must be nonnegative");
  const auto dec = eig_hermitian(h_dense);
  const double lmin = dec.eigenvalues.size() ? dec.eigenvalues.minCoeff() : 0.0;
  RVector w = (-beta * (dec.eigenvalues.array() - lmin)).exp();
  w /= w.sum();
  if (dec.eigenvectors.imag().cwiseAbs().maxCoeff() == 0.0) {
    const RMatrix v = dec.eigenvectors.real();
    RMatrix rho = v * w.asDiagonal() * v.transpose();
    return (0.5 * (rho + rho.transpose())).cast<cplx>();
  }
  Matrix rho = dec.eigenvectors * w.cast<cplx>().asDiagonal() * dec.eigenvectors.adjoint();
  return 0.5 * (rho + rho.adjoint());
}

Matrix gibbs_state(const LocalHamiltonian& h, double beta) {
  return gibbs_state(to_dense(h), beta);
}

double kms_residual(const Matrix& superop, const Matrix& h_dense, double beta) {
  const auto d = h_dense.rows();
  require(superop.rows() == d * d, "superoperator does not match the Hamiltonian");
  const auto dec = eig_hermitian(h_dense);
  const double hnorm = dec.eigenvalues.size() ? dec.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  if (beta * hnorm > 50.0)
    throw InvalidArgument("Gibbs state too ill-conditioned for the KMS check (beta ||H|| > 50)");
  const Matrix rho = gibbs_state(h_dense, beta);
  const Matrix sq = sqrt_psd(rho, false);
  const Matrix isq = sqrt_psd(rho, true);
  const Matrix gamma = Eigen::kroneckerProduct(sq.transpose(), sq).eval();
  const Matrix gamma_inv = Eigen::kroneckerProduct(isq.transpose(), isq).eval();
  const Matrix diff = superop.adjoint() - gamma_inv * superop * gamma;
  double num = 0, den = 0;
  for (Eigen::Index j = 0; j < diff.cols(); ++j) {
    num = std::max(num, diff.col(j).norm());
    den = std::max(den, superop.col(j).norm());
  }
  return den > 0 ? num / den : num;
}

double kms_residual(const TruncatedLindbladian& lind, const LocalHamiltonian& h) {
  return kms_residual(full_superop(lind), to_dense(h), lind.beta);
}

double local_kms_residual(const TruncatedLindbladian& lind, const LocalHamiltonian& h) {
  double worst = 0;
  for (const auto& g : lind.generators) {
    const auto patch = truncate_hamiltonian(h, g.site, lind.r);
    worst = std::max(worst, kms_residual(local_superop(g), to_dense(patch), lind.beta));
  }
  return worst;
}

cplx filter_time_domain(double beta, double t) {
  require(beta > 0, "time-domain kernels need beta > 0");
  const cplx z = cplx{beta, -4.0 * t};
  return std::sqrt(2.0 / (std::numbers::pi * beta * beta)) * std::exp(z * z / (8.0 * beta * beta));
}

cplx kernel_g2(double beta, double t) {
  require(beta > 0, "time-domain kernels need beta > 0");
  const cplx z = cplx{beta, -4.0 * t};
  return (2.0 * std::numbers::sqrt2 / beta) * std::exp(z * z / (4.0 * beta * beta));
}

double kernel_g1(double beta, double t) {
  require(beta > 0, "time-domain kernels need beta > 0");
  // Trapezoid on a grid covering the cosh tail to e^{-60}.
  const double span = 10.0 * beta;
  const double h = beta / 200.0;
  const int m = static_cast<int>(std::ceil(span / h));
  double acc = 0;
  for (int k = -m; k <= m; ++k) {
    const double s = k * h;
    const double a = -1.0 / (std::numbers::pi * beta * std::cosh(2.0 * std::numbers::pi * s / beta));
    const double u = t - s;
    const double b = (std::numbers::sqrt2 / beta) * std::exp(0.25 - 4.0 * u * u / (beta * beta)) *
                     std::sin(2.0 * u / beta);
    acc += a * b;
  }
  return acc * h;
}

double consistency_check(double beta, double nu_max, int nu_points) {
  require(beta > 0 && nu_points >= 2, "invalid consistency-check grid");
  const Envelope q{EnvelopeKind::gaussian, beta};
  // f decays like exp(-2 t^2 / beta^2); |t| <= 8 beta leaves e^{-128}.
  const double span = 8.0 * beta;
  const double h = beta / 64.0;
  const int m = static_cast<int>(std::ceil(span / h));
  std::vector<cplx> f(static_cast<std::size_t>(2 * m + 1));
  for (int k = -m; k <= m; ++k) f[static_cast<std::size_t>(k + m)] = filter_time_domain(beta, k * h);
  double worst = 0;
  for (int p = 0; p < nu_points; ++p) {
    const double nu = -nu_max + 2.0 * nu_max * p / (nu_points - 1);
    cplx acc = 0;
    for (int k = -m; k <= m; ++k)
      acc += f[static_cast<std::size_t>(k + m)] * std::exp(cplx{0.0, -nu * k * h});
    acc *= h;
    const double target = q(nu) * std::exp(-beta * nu / 4.0);
    worst = std::max(worst, std::abs(acc - target));
  }
  return worst;
}

}  // namespace qgibbs
