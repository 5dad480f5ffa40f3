// qgibbs: command-line runner for the Gibbs-sampler simulator.
//
// Exit codes: 0 ok, 1 internal error, 2 config error, 3 resource cap,
// 4 verification failure.

#include "qgibbs/config.hpp"
#include "qgibbs/experiment.hpp"
#include "qgibbs/verify.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
constexpr int kExitVerify = 4;

// Accepts either a config file or a manifest written by a previous run.
qgibbs::ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qgibbs::ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw qgibbs::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("tool") && doc.contains("config"))
    return qgibbs::parse_config(doc["config"].dump());
  return qgibbs::parse_config(text);
}

void write_text(const qgibbs::ExperimentConfig& cfg, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(cfg.output);
  std::ofstream out(std::filesystem::path(cfg.output) / name, std::ios::binary);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and verification harness for dissipative Gibbs-state preparation"};
  app.set_version_flag("--version", std::string(qgibbs::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out_dir;
  app.add_option("--config", config_path, "Experiment config (JSON) or a previous manifest.json");
  app.add_option("--seed", seed, "Seed override");
  app.add_option("--threads", threads, "Worker threads for linear algebra")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory override");

  auto* model = app.add_subcommand("model", "Summarize the Hamiltonian and its dense Gibbs state");
  auto* lindblad = app.add_subcommand("lindblad", "Build the truncated Lindbladian and report its checks");
  auto* evolve = app.add_subcommand("evolve", "Run the product-formula evolution and write a CSV time series");
  auto* gadget = app.add_subcommand("gadget", "Scan gadget error bounds over the time step");
  auto* compile = app.add_subcommand("compile", "Compile the reference-site gadgets and write loss traces");
  auto* sweep = app.add_subcommand("sweep", "Run the Cartesian product of the sweep axes");
  auto* verify = app.add_subcommand("verify", "Run the property checks");
  auto* report = app.add_subcommand("report", "Summarize the CSV files of an output directory");

  std::string level = "fast";
  bool corrupt = false;
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_flag("--corrupt-jump-weight", corrupt, "Test hook: break detailed balance on purpose")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  Eigen::setNbThreads(threads);

  try {
    if (verify->parsed()) {
      qgibbs::VerifyOptions vo;
      vo.level = qgibbs::parse_verify_level(level);
      vo.corrupt_jump_weight = corrupt;
      const auto rep = qgibbs::run_verify(vo);
      std::cout << rep.text();
      return rep.ok() ? kExitOk : kExitVerify;
    }

    qgibbs::ExperimentConfig cfg = config_path.empty() ? qgibbs::ExperimentConfig{} : read_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output = out_dir;
    qgibbs::validate_config(cfg);

    if (report->parsed()) {
      std::cout << qgibbs::report_directory(cfg.output);
    } else if (model->parsed()) {
      const auto text = qgibbs::model_summary(cfg);
      write_text(cfg, "model.json", text);
      std::cout << text;
    } else if (lindblad->parsed()) {
      const auto text = qgibbs::lindblad_summary(cfg);
      write_text(cfg, "lindblad.json", text);
      std::cout << text;
    } else {
      std::string command, name;
      qgibbs::Table table;
      if (evolve->parsed()) {
        command = "evolve";
        table = qgibbs::run_experiment(cfg);
      } else if (gadget->parsed()) {
        command = "gadget";
        table = qgibbs::gadget_scan(cfg);
      } else if (compile->parsed()) {
        command = "compile";
        table = qgibbs::compile_traces(cfg);
      } else if (sweep->parsed()) {
        command = "sweep";
        table = qgibbs::run_sweep(cfg);
      }
      name = command + ".csv";
      qgibbs::write_outputs(cfg, command, name, qgibbs::format_csv(table, cfg, command));
      std::cout << "wrote " << (std::filesystem::path(cfg.output) / name).string() << " (" << table.rows.size()
                << " rows)\n";
    }
    return kExitOk;
  } catch (const qgibbs::ResourceCapExceeded& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitResource;
  } catch (const qgibbs::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
