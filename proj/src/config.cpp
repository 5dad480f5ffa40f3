#include "qgibbs/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace qgibbs {
namespace {

using nlohmann::json;

// Reads fields of one JSON object and rejects any key it was not asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        fail(key, "expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(where_ + "." + key + ": " + what);
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

template <class E>
E parse_choice(const std::string& name, const std::string& where,
               std::initializer_list<std::pair<const char*, E>> choices) {
  for (const auto& [label, value] : choices)
    if (name == label) return value;
  throw ConfigError(where + ": unknown value '" + name + "'");
}

const std::set<std::string>& sweep_axes() {
  static const std::set<std::string> axes{"beta", "r", "tau", "t", "noise_p", "m"};
  return axes;
}

bool is_integer_axis(const std::string& axis) { return axis == "r" || axis == "m"; }

}  // namespace

std::string to_string(Backend b) { return b == Backend::dense ? "dense" : "trajectories"; }
std::string to_string(ProductFormula f) {
  return f == ProductFormula::deterministic ? "deterministic" : "randomized";
}
std::string to_string(GadgetMode m) { return m == GadgetMode::exact_unitary ? "exact_unitary" : "compiled"; }

Lattice ExperimentConfig::lattice() const {
  const Boundary b = boundary == "open" ? Boundary::open : Boundary::periodic;
  return Lattice(extents, std::vector<Boundary>(extents.size(), b));
}

LocalHamiltonian ExperimentConfig::hamiltonian() const {
  ModelParams params = default_model_params(model);
  for (const auto& [k, v] : model_params) params[k] = v;
  return build_model(model, lattice(), params);
}

int ExperimentConfig::steps() const { return static_cast<int>(std::llround(t / tau)); }

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    ObjectReader top(doc, "config");
    int schema = kConfigSchemaVersion;
    top.integer("schema_version", schema);
    if (schema != kConfigSchemaVersion)
      throw ConfigError("config: unsupported schema_version " + std::to_string(schema));
    top.string("model", cfg.model);
    if (const json* p = top.find("model_params")) {
      if (!p->is_object()) top.fail("model_params", "expected an object");
      for (const auto& [k, v] : p->items()) {
        if (!v.is_number()) throw ConfigError("config.model_params." + k + ": expected a number");
        cfg.model_params[k] = v.get<double>();
      }
    }
    if (const json* l = top.find("lattice")) {
      ObjectReader lat(*l, "config.lattice");
      if (const json* e = lat.find("extents")) {
        if (!e->is_array() || e->empty()) lat.fail("extents", "expected a nonempty array");
        cfg.extents.clear();
        for (const auto& x : *e) {
          if (!x.is_number_integer()) lat.fail("extents", "expected integers");
          cfg.extents.push_back(x.get<int>());
        }
      }
      lat.string("boundary", cfg.boundary);
      lat.finish();
    }
    top.number("beta", cfg.beta);
    top.integer("r", cfg.r);
    top.string("envelope", cfg.envelope);
    top.boolean("renormalize_envelope", cfg.renormalize_envelope);
    top.number("tau", cfg.tau);
    top.number("t", cfg.t);
    top.integer("record_every", cfg.record_every);
    std::string s;
    if (s.clear(), top.string("backend", s), !s.empty())
      cfg.backend = parse_choice<Backend>(s, "config.backend",
                                          {{"dense", Backend::dense}, {"trajectories", Backend::trajectories}});
    if (s.clear(), top.string("product_formula", s), !s.empty())
      cfg.product_formula = parse_choice<ProductFormula>(
          s, "config.product_formula",
          {{"deterministic", ProductFormula::deterministic}, {"randomized", ProductFormula::randomized}});
    top.integer("n_traj", cfg.n_traj);
    if (s.clear(), top.string("draw_mode", s), !s.empty())
      cfg.draw_mode = parse_choice<DrawMode>(
          s, "config.draw_mode", {{"per_step", DrawMode::per_step}, {"per_trajectory", DrawMode::per_trajectory}});
    top.number("rescale_factor", cfg.rescale_factor);
    if (const json* g = top.find("gadget")) {
      ObjectReader gad(*g, "config.gadget");
      if (s.clear(), gad.string("mode", s), !s.empty())
        cfg.gadget.mode = parse_choice<GadgetMode>(
            s, "config.gadget.mode", {{"exact_unitary", GadgetMode::exact_unitary}, {"compiled", GadgetMode::compiled}});
      gad.integer("m", cfg.gadget.m);
      gad.integer("restarts", cfg.gadget.restarts);
      gad.integer("iterations", cfg.gadget.iterations);
      gad.finish();
    }
    top.number("noise_p", cfg.noise_p);
    top.integer("shots", cfg.shots);
    if (const json* o = top.find("observables")) {
      ObjectReader obs(*o, "config.observables");
      obs.integer("correlators", cfg.observables.correlators);
      obs.boolean("heat_capacity", cfg.observables.heat_capacity);
      obs.finish();
    }
    if (const json* sw = top.find("sweep")) {
      if (!sw->is_object()) top.fail("sweep", "expected an object");
      for (const auto& [axis, values] : sw->items()) {
        if (!sweep_axes().count(axis)) throw ConfigError("config.sweep: unknown axis '" + axis + "'");
        if (!values.is_array()) throw ConfigError("config.sweep." + axis + ": expected an array");
        auto& out = cfg.sweep[axis];
        for (const auto& v : values) {
          if (!v.is_number() || (is_integer_axis(axis) && !v.is_number_integer()))
            throw ConfigError("config.sweep." + axis + ": invalid value");
          out.push_back(v.get<double>());
        }
      }
    }
    top.unsigned64("seed", cfg.seed);
    top.string("output", cfg.output);
    top.finish();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["model"] = cfg.model;
  j["model_params"] = json::object();
  for (const auto& [k, v] : cfg.model_params) j["model_params"][k] = v;
  j["lattice"] = {{"extents", cfg.extents}, {"boundary", cfg.boundary}};
  j["beta"] = cfg.beta;
  j["r"] = cfg.r;
  j["envelope"] = cfg.envelope;
  j["renormalize_envelope"] = cfg.renormalize_envelope;
  j["tau"] = cfg.tau;
  j["t"] = cfg.t;
  j["record_every"] = cfg.record_every;
  j["backend"] = to_string(cfg.backend);
  j["product_formula"] = to_string(cfg.product_formula);
  j["n_traj"] = cfg.n_traj;
  j["draw_mode"] = to_string(cfg.draw_mode);
  j["rescale_factor"] = cfg.rescale_factor;
  j["gadget"] = {{"mode", to_string(cfg.gadget.mode)},
                 {"m", cfg.gadget.m},
                 {"restarts", cfg.gadget.restarts},
                 {"iterations", cfg.gadget.iterations}};
  j["noise_p"] = cfg.noise_p;
  j["shots"] = cfg.shots;
  j["observables"] = {{"correlators", cfg.observables.correlators},
                      {"heat_capacity", cfg.observables.heat_capacity}};
  j["sweep"] = json::object();
  for (const auto& [axis, values] : cfg.sweep) {
    json arr = json::array();
    for (double v : values) {
      if (is_integer_axis(axis))
        arr.push_back(static_cast<long long>(std::llround(v)));
      else
        arr.push_back(v);
    }
    j["sweep"][axis] = arr;
  }
  j["seed"] = cfg.seed;
  j["output"] = cfg.output;
  return j.dump(2);
}

void validate_config(const ExperimentConfig& cfg) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  check(cfg.model == "mfi" || cfg.model == "tfi1d" || cfg.model == "xxz" || cfg.model == "tfim2d",
        "unknown model '" + cfg.model + "'");
  const auto defaults = default_model_params(cfg.model);
  for (const auto& [k, v] : cfg.model_params) {
    check(defaults.count(k) > 0, "model '" + cfg.model + "' has no parameter '" + k + "'");
    check(std::isfinite(v), "model parameter '" + k + "' must be finite");
  }
  check(!cfg.extents.empty() && cfg.extents.size() <= 2, "lattice must have one or two axes");
  for (int e : cfg.extents) check(e >= 1, "lattice extents must be positive");
  check(cfg.boundary == "periodic" || cfg.boundary == "open", "boundary must be 'periodic' or 'open'");
  check((cfg.model == "tfim2d") == (cfg.extents.size() == 2), "model dimension does not match the lattice");
  check(std::isfinite(cfg.beta) && cfg.beta >= 0.0, "beta must be finite and nonnegative");
  check(cfg.r >= 0, "r must be nonnegative");
  try {
    (void)parse_envelope(cfg.envelope);
  } catch (const InvalidArgument&) {
    throw ConfigError("config: unknown envelope '" + cfg.envelope + "'");
  }
  check(std::isfinite(cfg.tau) && cfg.tau > 0.0, "tau must be positive");
  check(std::isfinite(cfg.t) && cfg.t >= 0.0, "t must be nonnegative");
  check(std::abs(cfg.steps() * cfg.tau - cfg.t) <= 1e-9 * std::max(1.0, cfg.t), "t must be a multiple of tau");
  check(cfg.record_every >= 0, "record_every must be nonnegative");
  check(cfg.n_traj >= 2, "n_traj must be at least 2");
  check(std::isfinite(cfg.rescale_factor) && cfg.rescale_factor > 0.0, "rescale_factor must be positive");
  check(cfg.gadget.m >= 1, "gadget.m must be at least 1");
  check(cfg.gadget.restarts >= 1 && cfg.gadget.iterations >= 0, "invalid compile budget");
  check(cfg.noise_p >= 0.0 && cfg.noise_p <= 1.0, "noise_p must lie in [0, 1]");
  check(cfg.shots >= 0, "shots must be nonnegative");
  check(cfg.observables.correlators >= 0, "observables.correlators must be nonnegative");
  check(cfg.sweep.size() <= 2, "at most two sweep axes");
  check(!cfg.output.empty(), "output must be nonempty");
  if (cfg.noise_p > 0.0)
    check(cfg.gadget.mode == GadgetMode::compiled, "noise requires gadget.mode = compiled");
  if (cfg.gadget.mode == GadgetMode::compiled) {
    check(cfg.backend == Backend::trajectories, "compiled gadgets run on the trajectories backend");
    check(cfg.observables.correlators == 0 && !cfg.observables.heat_capacity,
          "compiled runs record the energy only");
  }
  for (const auto& [axis, values] : cfg.sweep)
    for (double v : values) validate_config(with_axis([&] {
                                                      ExperimentConfig c = cfg;
                                                      c.sweep.clear();
                                                      return c;
                                                    }(),
                                                    axis, v));
  int n = 1;
  for (int e : cfg.extents) n *= e;
  if (n > kMaxDenseQubits)
    throw ResourceCapExceeded("lattice of " + std::to_string(n) + " sites exceeds the dense cap of " +
                              std::to_string(kMaxDenseQubits));
}

std::string config_hash(const ExperimentConfig& cfg) {
  ExperimentConfig keyed = cfg;
  keyed.output.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(keyed)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig with_axis(const ExperimentConfig& cfg, const std::string& axis, double value) {
  ExperimentConfig c = cfg;
  if (axis == "beta")
    c.beta = value;
  else if (axis == "r")
    c.r = static_cast<int>(std::llround(value));
  else if (axis == "tau")
    c.tau = value;
  else if (axis == "t")
    c.t = value;
  else if (axis == "noise_p")
    c.noise_p = value;
  else if (axis == "m")
    c.gadget.m = static_cast<int>(std::llround(value));
  else
    throw ConfigError("config.sweep: unknown axis '" + axis + "'");
  return c;
}

}  // namespace qgibbs
