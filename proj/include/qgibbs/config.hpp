#pragma once

#include "qgibbs/dissipator.hpp"
#include "qgibbs/evolution.hpp"
#include "qgibbs/hamiltonian.hpp"
#include "qgibbs/lattice.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qgibbs {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

enum class Backend { dense, trajectories };
enum class ProductFormula { deterministic, randomized };
enum class GadgetMode { exact_unitary, compiled };

struct GadgetConfig {
  GadgetMode mode = GadgetMode::exact_unitary;
  int m = 4;           // template modules (compiled mode)
  int restarts = 10;
  int iterations = 2000;

  friend bool operator==(const GadgetConfig&, const GadgetConfig&) = default;
};

struct ObservablesConfig {
  int correlators = 0;       // largest separation recorded; 0 disables
  bool heat_capacity = false;

  friend bool operator==(const ObservablesConfig&, const ObservablesConfig&) = default;
};

/// Axis name -> values. Allowed axes: beta, r, tau, t, noise_p, m.
using SweepAxes = std::map<std::string, std::vector<double>>;

struct ExperimentConfig {
  std::string model = "mfi";
  ModelParams model_params;
  std::vector<int> extents{8};
  std::string boundary = "periodic";
  double beta = 1.0;
  int r = 1;
  std::string envelope = "gaussian";
  bool renormalize_envelope = false;
  double tau = 0.1;
  double t = 5.0;
  /// Steps between recorded rows (dense backend); 0 records only the end.
  int record_every = 10;
  Backend backend = Backend::dense;
  ProductFormula product_formula = ProductFormula::randomized;
  int n_traj = 100;
  DrawMode draw_mode = DrawMode::per_step;
  double rescale_factor = 3.0;
  GadgetConfig gadget;
  double noise_p = 0.0;
  int shots = 1024;
  ObservablesConfig observables;
  SweepAxes sweep;
  std::uint64_t seed = 0;
  std::string output = "out";

  Lattice lattice() const;
  LocalHamiltonian hamiltonian() const;
  int steps() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Thrown for malformed or invalid configuration input.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Parse a JSON document; unknown keys and invalid values raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON text of the fully resolved config.
std::string serialize_config(const ExperimentConfig& cfg);

/// Check every field against the preconditions of the modules it feeds.
void validate_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical text without the output directory, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Copy of cfg with one sweep axis set to `value`.
ExperimentConfig with_axis(const ExperimentConfig& cfg, const std::string& axis, double value);

std::string to_string(Backend b);
std::string to_string(ProductFormula f);
std::string to_string(GadgetMode m);

}  // namespace qgibbs
