#pragma once

#include "qgibbs/compiler.hpp"
#include "qgibbs/config.hpp"
#include "qgibbs/noise.hpp"

#include <array>
#include <string>
#include <vector>

namespace qgibbs {

/// Numeric table with named columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Column layout of run_experiment for a config.
std::vector<std::string> experiment_columns(const ExperimentConfig& cfg);

/// One run: rows of t, E, dE, E_se and the optional correlator and heat
/// capacity columns. The dense backend records every `record_every` steps;
/// the trajectories backend records the final time.
Table run_experiment(const ExperimentConfig& cfg);

/// Cartesian product over cfg.sweep (at most two axes); grid values lead
/// each row. An empty axis gives an empty table.
Table run_sweep(const ExperimentConfig& cfg);

/// Compiled gadgets for a translation-invariant chain. The reference site r
/// has the ball {0, ..., 2r} in chain order; site a uses qubits
/// (a - r + s) mod n for s = 0..2r.
struct CompiledChannels {
  TemplateCircuit tpl;
  std::array<Eigen::VectorXd, 3> theta;
  std::array<double, 3> loss{};
  std::array<Matrix, 3> target;
  std::vector<std::vector<int>> positions;
};

CompiledChannels compile_chain_channels(const TruncatedLindbladian& lind, double tau, double rescale_factor,
                                        const GadgetConfig& gadget, std::uint64_t seed);

/// Pauli transfer matrices of the three compiled channels under noise.
std::array<RMatrix, 3> noisy_channel_ptms(const CompiledChannels& cc, const DepolarizingModel& model);

/// Loss traces of compiling the three reference-site gadgets
/// (columns alpha, restart, iteration, loss).
Table compile_traces(const ExperimentConfig& cfg);

/// Gadget error bounds over a log-spaced tau grid (columns tau, alpha, lower, upper).
Table gadget_scan(const ExperimentConfig& cfg);

/// JSON summaries for the model and lindblad subcommands.
std::string model_summary(const ExperimentConfig& cfg);
std::string lindblad_summary(const ExperimentConfig& cfg);

/// CSV text: a "# schema=... seed=... config_hash=..." line, the header, then rows.
std::string format_csv(const Table& t, const ExperimentConfig& cfg, const std::string& kind);

/// JSON manifest echoing the resolved config, tool version, seed and hash.
std::string format_manifest(const ExperimentConfig& cfg, const std::string& command,
                            const std::vector<std::string>& files);

/// Write `name` (CSV) and manifest.json into cfg.output.
void write_outputs(const ExperimentConfig& cfg, const std::string& command, const std::string& name,
                   const std::string& csv_text);

/// Quote a CSV field when needed.
std::string csv_escape(const std::string& field);

/// Short text summary of every CSV file in a directory.
std::string report_directory(const std::string& dir);

}  // namespace qgibbs
