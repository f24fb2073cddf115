// Command-line front end: load a scenario, run it, write telemetry and a
// summary, and map the terminal status to an exit code.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "foldsim/harness.hpp"
#include "foldsim/scenario.hpp"

namespace {

constexpr int k_exit_done = 0;
constexpr int k_exit_runtime = 1;
constexpr int k_exit_fault = 2;
constexpr int k_exit_timed_out = 3;
constexpr int k_exit_usage = 64;

int status_code(foldsim::RunStatus s) {
  switch (s) {
    case foldsim::RunStatus::Done: return k_exit_done;
    case foldsim::RunStatus::Fault: return k_exit_fault;
    case foldsim::RunStatus::TimedOut: return k_exit_timed_out;
  }
  return k_exit_runtime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Folding assembly simulation: master-slave contact controller "
               "against a quasi-static penalty-contact plant"};

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  bool no_noise = false;
  bool summary_only = false;

  app.add_option("--config", config_path, "scenario config file")->required();
  app.add_option("--out", out_dir, "output directory for run.csv and summary.json");
  app.add_option("--seed", seed, "override sensor.seed");
  app.add_option("--duration", duration, "override run.duration (s)");
  app.add_flag("--no-noise", no_noise, "force sensor noise to zero");
  app.add_flag("--summary-only", summary_only, "write summary.json only, skip run.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : k_exit_usage;
  }

  foldsim::ScenarioConfig cfg;
  try {
    cfg = foldsim::load_config(config_path);
    if (seed) cfg.sensor.seed = *seed;
    if (duration) cfg.run.duration = *duration;
    if (no_noise) {
      cfg.sensor.sigma_f = 0.0;
      cfg.sensor.sigma_tau = 0.0;
    }
    cfg.validate();
  } catch (const foldsim::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return k_exit_usage;
  }

  try {
    const foldsim::RunStatus status = foldsim::run_scenario(cfg, out_dir, summary_only);
    std::printf("status: %s\n", foldsim::to_string(status));
    std::printf("outputs: %s\n", (std::filesystem::path(out_dir) / "summary.json").string().c_str());
    return status_code(status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return k_exit_runtime;
  }
}
