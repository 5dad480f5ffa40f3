#include "qgibbs/experiment.hpp"

#include "qgibbs/gadget.hpp"
#include "qgibbs/observables.hpp"
#include "qgibbs/spectral.hpp"

#include <Eigen/Sparse>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qgibbs {
namespace {

using nlohmann::json;

constexpr Pauli kAlphaOrder[3] = {Pauli::X, Pauli::Y, Pauli::Z};

TruncatedLindbladian make_lindbladian(const ExperimentConfig& cfg, const LocalHamiltonian& h) {
  const Envelope env{parse_envelope(cfg.envelope), cfg.beta};
  auto lind = build_lindbladian(h, cfg.beta, cfg.r, env, LindbladOptions{});
  if (cfg.renormalize_envelope) lind = renormalize_envelope(lind, h);
  return lind;
}

TrotterPlan make_plan(const ExperimentConfig& cfg) {
  TrotterPlan plan;
  plan.tau = cfg.tau;
  plan.steps = cfg.steps();
  plan.draw_mode = cfg.draw_mode;
  plan.rescale_factor = cfg.rescale_factor;
  return plan;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// <S_a S_b>, <S_a>, <S_b> for S = Z/2 on a state vector.
std::array<double, 3> spin_moments(const Vector& psi, int n, int a, int b) {
  const std::uint64_t ba = std::uint64_t{1} << (n - 1 - a);
  const std::uint64_t bb = std::uint64_t{1} << (n - 1 - b);
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (Eigen::Index z = 0; z < psi.size(); ++z) {
    const double p = std::norm(psi(z));
    const double sa = (static_cast<std::uint64_t>(z) & ba) ? -0.5 : 0.5;
    const double sb = (static_cast<std::uint64_t>(z) & bb) ? -0.5 : 0.5;
    m[0] += p * sa * sb;
    m[1] += p * sa;
    m[2] += p * sb;
  }
  return m;
}

Table dense_run(const ExperimentConfig& cfg, const LocalHamiltonian& h, const Matrix& hd,
                const Matrix& rho_ref) {
  const int n = h.lattice.size();
  const auto lind = make_lindbladian(cfg, h);
  ChannelBank bank(lind, cfg.tau, cfg.rescale_factor);
  const auto plan = make_plan(cfg);
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Matrix rho0 = Matrix::Identity(dim, dim) / static_cast<double>(dim);

  Table out;
  out.columns = experiment_columns(cfg);
  auto record = [&](int step, const Matrix& rho) {
    if (cfg.record_every == 0 && step != plan.steps) return;
    const auto em = energy_metrics(rho, h, rho_ref);
    std::vector<double> row{step * cfg.tau, em.energy, em.delta, 0.0};
    if (cfg.observables.correlators > 0)
      for (double c : correlator_profile(rho, cfg.observables.correlators)) row.push_back(c);
    if (cfg.observables.heat_capacity) {
      row.push_back(heat_capacity(rho, hd, cfg.beta));
      row.push_back(0.0);
    }
    out.rows.push_back(std::move(row));
  };
  const int every = cfg.record_every > 0 ? cfg.record_every : std::max(plan.steps, 1);
  if (cfg.product_formula == ProductFormula::deterministic) {
    deterministic_trotter_evolve(bank, rho0, plan, record, every);
  } else if (cfg.draw_mode == DrawMode::per_step) {
    randomized_mean_evolve(bank, rho0, plan, record, every);
  } else {
    // Averaging over fixed per-trajectory draws has no step-by-step recursion.
    record(plan.steps, exhaustive_per_trajectory_mean(bank, rho0, plan));
  }
  return out;
}

Table statevector_run(const ExperimentConfig& cfg, const LocalHamiltonian& h, const Matrix& hd,
                      const Matrix& rho_ref) {
  const int n = h.lattice.size();
  const auto lind = make_lindbladian(cfg, h);
  ChannelBank bank(lind, cfg.tau, cfg.rescale_factor);
  const auto plan = make_plan(cfg);
  const Eigen::SparseMatrix<cplx> hs = hd.sparseView();
  const int lmax = cfg.observables.correlators;
  require(lmax < n, "observables.correlators must be below the number of sites");

  std::vector<VectorObservable> obs;
  obs.emplace_back([&](const Vector& psi) { return (psi.adjoint() * (hs * psi))(0).real(); });
  obs.emplace_back([&](const Vector& psi) { return (hs * psi).squaredNorm(); });
  for (int l = 1; l <= lmax; ++l)
    for (int k = 0; k < 3; ++k)
      obs.emplace_back([=](const Vector& psi) {
        return spin_moments(psi, n, n / 2, (n / 2 + l) % n)[static_cast<std::size_t>(k)];
      });
  const auto ens = statevector_ensemble(bank, plan, cfg.n_traj, cfg.seed, obs);

  const double e_ref = energy_expectation(rho_ref, h);
  std::vector<double> row{plan.time(), ens.mean[0] / n, std::abs(ens.mean[0] - e_ref) / n, ens.stderr_[0] / n};
  std::vector<std::vector<double>> per_traj(static_cast<std::size_t>(cfg.n_traj));
  for (int t = 0; t < cfg.n_traj; ++t)
    for (const auto& s : ens.samples) per_traj[static_cast<std::size_t>(t)].push_back(s[static_cast<std::size_t>(t)]);
  for (int l = 1; l <= lmax; ++l) {
    const std::size_t base = 2 + 3 * static_cast<std::size_t>(l - 1);
    const auto jk = jackknife(per_traj, [&](const std::vector<double>& m) {
      return m[base] - m[base + 1] * m[base + 2];
    });
    row.push_back(jk.value);
  }
  if (cfg.observables.heat_capacity) {
    const auto jk = jackknife(per_traj, [&](const std::vector<double>& m) {
      return cfg.beta * cfg.beta * (m[1] - m[0] * m[0]);
    });
    row.push_back(jk.value);
    row.push_back(jk.stderr_);
  }
  Table out;
  out.columns = experiment_columns(cfg);
  out.rows.push_back(std::move(row));
  return out;
}

Table compiled_run(const ExperimentConfig& cfg, const LocalHamiltonian& h, const Matrix& rho_ref) {
  const int n = h.lattice.size();
  const auto lind = make_lindbladian(cfg, h);
  const auto cc = compile_chain_channels(lind, cfg.tau, cfg.rescale_factor, cfg.gadget, cfg.seed);
  const auto ptms = noisy_channel_ptms(cc, DepolarizingModel{cfg.noise_p});
  const auto plan = make_plan(cfg);
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Matrix rho0 = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  NoisyRunOptions opts;
  opts.n_circuits = cfg.n_traj;
  opts.shots = cfg.shots;
  opts.seed = cfg.seed;
  const auto res = noisy_trajectory_run(
      h, [&](int, int alpha) -> const RMatrix& { return ptms[static_cast<std::size_t>(alpha)]; }, cc.positions,
      rho0, plan, opts);
  const double e_ref = energy_expectation(rho_ref, h);
  Table out;
  out.columns = experiment_columns(cfg);
  out.rows.push_back({plan.time(), res.energy_density, std::abs(res.energy - e_ref) / n, res.stderr_density});
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::vector<std::string> experiment_columns(const ExperimentConfig& cfg) {
  std::vector<std::string> cols{"t", "E", "dE", "E_se"};
  for (int l = 1; l <= cfg.observables.correlators; ++l) cols.push_back("delta_" + std::to_string(l));
  if (cfg.observables.heat_capacity) {
    cols.emplace_back("C");
    cols.emplace_back("C_se");
  }
  return cols;
}

Table run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto h = cfg.hamiltonian();
  const Matrix hd = to_dense(h);
  const Matrix rho_ref = gibbs_state(hd, cfg.beta);
  if (cfg.backend == Backend::dense) return dense_run(cfg, h, hd, rho_ref);
  if (cfg.gadget.mode == GadgetMode::compiled) return compiled_run(cfg, h, rho_ref);
  return statevector_run(cfg, h, hd, rho_ref);
}

Table run_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  Table out;
  std::vector<std::string> axes;
  for (const auto& [axis, values] : cfg.sweep) axes.push_back(axis);
  ExperimentConfig base = cfg;
  base.sweep.clear();
  out.columns = axes;
  for (const auto& c : experiment_columns(base)) out.columns.push_back(c);

  std::vector<std::vector<double>> points{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& p : points)
      for (double v : cfg.sweep.at(axis)) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  if (axes.empty()) points.clear();
  for (const auto& p : points) {
    ExperimentConfig point = base;
    for (std::size_t i = 0; i < axes.size(); ++i) point = with_axis(point, axes[i], p[i]);
    for (const auto& row : run_experiment(point).rows) {
      std::vector<double> full = p;
      full.insert(full.end(), row.begin(), row.end());
      out.rows.push_back(std::move(full));
    }
  }
  return out;
}

CompiledChannels compile_chain_channels(const TruncatedLindbladian& lind, double tau, double rescale_factor,
                                        const GadgetConfig& gadget, std::uint64_t seed) {
  const Lattice& lat = lind.lattice;
  const int n = lat.size();
  const int r = lind.r;
  if (lat.dimension() != 1 || !lat.fully_periodic() || !lind.translation_invariant)
    throw InvalidArgument("compiled gadgets need a translation-invariant periodic chain");
  if (n < 2 * r + 2) throw InvalidArgument("chain too short for the truncation radius");
  CompiledChannels cc;
  cc.tpl = ladder_template(r, gadget.m);
  AdamConfig adam;
  adam.iterations = gadget.iterations;
  adam.restarts = gadget.restarts;
  for (int k = 0; k < 3; ++k) {
    const auto& g = lind.at(r, kAlphaOrder[k]);
    const auto ks = static_cast<std::size_t>(k);
    cc.target[ks] = gadget_unitary(g.L, g.G, rescale_factor * tau);
    const auto res = compile_gadget(cc.target[ks], cc.tpl, adam, splitmix64_mix(seed + 0x1000ULL * (ks + 1)));
    cc.theta[ks] = res.best_theta;
    cc.loss[ks] = res.best_loss;
  }
  for (int a = 0; a < n; ++a) {
    std::vector<int> pos;
    for (int s = 0; s <= 2 * r; ++s) pos.push_back(((a - r + s) % n + n) % n);
    cc.positions.push_back(std::move(pos));
  }
  return cc;
}

std::array<RMatrix, 3> noisy_channel_ptms(const CompiledChannels& cc, const DepolarizingModel& model) {
  std::array<RMatrix, 3> out;
  for (std::size_t k = 0; k < 3; ++k)
    out[k] = pauli_transfer_matrix(noisy_gadget_superop(cc.tpl, cc.theta[k], model));
  return out;
}

Table compile_traces(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto h = cfg.hamiltonian();
  const auto lind = make_lindbladian(cfg, h);
  const int r = cfg.r;
  require(h.lattice.dimension() == 1 && h.lattice.size() >= 2 * r + 2,
          "compile needs a chain longer than the gadget support");
  const auto tpl = ladder_template(r, cfg.gadget.m);
  AdamConfig adam;
  adam.iterations = cfg.gadget.iterations;
  adam.restarts = cfg.gadget.restarts;
  Table out;
  out.columns = {"alpha", "restart", "iteration", "loss", "best"};
  for (int k = 0; k < 3; ++k) {
    const auto& g = lind.at(r, kAlphaOrder[k]);
    const Matrix target = gadget_unitary(g.L, g.G, cfg.rescale_factor * cfg.tau);
    const auto res =
        compile_gadget(target, tpl, adam, splitmix64_mix(cfg.seed + 0x1000ULL * (static_cast<std::uint64_t>(k) + 1)));
    for (std::size_t i = 0; i < res.traces.size(); ++i) {
      const auto best = best_so_far(res.traces[i]);
      for (std::size_t it = 0; it < res.traces[i].size(); ++it)
        out.rows.push_back({static_cast<double>(k), static_cast<double>(i), static_cast<double>(it),
                            res.traces[i][it], best[it]});
    }
  }
  return out;
}

Table gadget_scan(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto h = cfg.hamiltonian();
  const auto lind = make_lindbladian(cfg, h);
  const int site = std::min(cfg.r, h.lattice.size() - 1);
  Table out;
  out.columns = {"tau", "alpha", "lower", "upper"};
  for (int i = 0; i < 8; ++i) {
    const double tau = 0.02 * std::pow(25.0, i / 7.0);
    for (int k = 0; k < 3; ++k) {
      const auto& g = lind.at(site, kAlphaOrder[k]);
      const auto [lo, up] = gadget_error_bounds(g.L, g.G, tau);
      out.rows.push_back({tau, static_cast<double>(k), lo, up});
    }
  }
  return out;
}

std::string model_summary(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto h = cfg.hamiltonian();
  const int n = h.lattice.size();
  json j;
  j["model"] = cfg.model;
  j["sites"] = n;
  j["terms"] = h.terms.size();
  j["locality"] = h.locality();
  j["translation_invariant"] = h.translation_invariant;
  json labels = json::array();
  for (const auto& t : h.terms) labels.push_back(t.label());
  j["term_labels"] = labels;
  const Matrix hd = to_dense(h);
  const auto dec = eig_hermitian(hd);
  j["ground_energy_density"] = dec.eigenvalues.minCoeff() / n;
  const Matrix rho = gibbs_state(hd, cfg.beta);
  j["beta"] = cfg.beta;
  j["gibbs_energy_density"] = energy_expectation(rho, h) / n;
  j["gibbs_heat_capacity"] = gibbs_heat_capacity(dec.eigenvalues, cfg.beta);
  return j.dump(2) + "\n";
}

std::string lindblad_summary(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto h = cfg.hamiltonian();
  const auto lind = make_lindbladian(cfg, h);
  json j;
  j["beta"] = cfg.beta;
  j["r"] = cfg.r;
  j["envelope"] = cfg.envelope;
  j["generators"] = lind.generators.size();
  double max_l = 0, max_g = 0;
  int max_support = 0;
  for (const auto& g : lind.generators) {
    max_l = std::max(max_l, g.L.norm());
    max_g = std::max(max_g, g.G.norm());
    max_support = std::max(max_support, g.support.size());
  }
  j["max_jump_frobenius"] = max_l;
  j["max_coherent_frobenius"] = max_g;
  j["max_support"] = max_support;
  j["translation_invariant"] = lind.translation_invariant;
  j["real_representable"] = lind.real_representable();
  if (max_support <= kMaxSuperopQubits) j["local_kms_residual"] = local_kms_residual(lind, h);
  if (lind.num_sites() <= kMaxSuperopQubits && cfg.beta > 0.0) j["kms_residual"] = kms_residual(lind, h);
  return j.dump(2) + "\n";
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_csv(const Table& t, const ExperimentConfig& cfg, const std::string& kind) {
  std::ostringstream os;
  os << "# schema=" << kCsvSchemaVersion << " kind=" << kind << " seed=" << cfg.seed
     << " config_hash=" << config_hash(cfg) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_escape(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << "\n";
  }
  return os.str();
}

std::string format_manifest(const ExperimentConfig& cfg, const std::string& command,
                            const std::vector<std::string>& files) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["tool"] = "qgibbs";
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config_hash"] = config_hash(cfg);
  j["config"] = json::parse(serialize_config(cfg));
  j["files"] = files;
  j["rng"] = "splitmix64, stream state = mix(seed ^ mix(stream + golden gamma))";
  return j.dump(2) + "\n";
}

void write_outputs(const ExperimentConfig& cfg, const std::string& command, const std::string& name,
                   const std::string& csv_text) {
  const std::filesystem::path dir(cfg.output);
  std::filesystem::create_directories(dir);
  write_file(dir / name, csv_text);
  write_file(dir / "manifest.json", format_manifest(cfg, command, {name}));
}

std::string report_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InvalidArgument("no such directory '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::ostringstream os;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line, meta, header, last;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.rfind("#", 0) == 0) {
        meta = line;
      } else if (header.empty()) {
        header = line;
      } else {
        ++rows;
        last = line;
      }
    }
    os << f.filename().string() << ": " << rows << " rows\n";
    if (!meta.empty()) os << "  " << meta << "\n";
    os << "  columns: " << header << "\n";
    if (rows) os << "  last:    " << last << "\n";
  }
  if (files.empty()) os << "no CSV files in " << dir << "\n";
  return os.str();
}

}  // namespace qgibbs
