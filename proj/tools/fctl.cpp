// Command-line front end: analysis, simulation and comparison runs driven by
// a JSON model file.

#include <iostream>

#include "CLI11.hpp"
#include "fctl/report.hpp"

int main(int argc, char** argv) {
  fctl::RunConfig rc;
  CLI::App app{"Fixed-cycle traffic-light queues and line networks"};
  app.set_version_flag("--version", fctl::kToolVersion);
  app.add_option("--config", rc.config_path, "Model file (JSON)")->required();
  app.add_option("--mode", rc.mode, "Run mode")
      ->required()
      ->check(CLI::IsMember({"analyze-single", "analyze-network", "simulate-single",
                             "simulate-network", "compare", "roots", "invert"}));
  app.add_option("--out", rc.out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", rc.seed, "Simulation seed");
  app.add_option("--cycles", rc.cycles, "Simulated cycles including warmup");
  app.add_option("--warmup-cycles", rc.warmup_cycles, "Warmup cycles");
  app.add_option("--replications", rc.replications, "Independent replications");
  app.add_option("--epsilon-weight", rc.epsilon_weight,
                 "Drop mixture scenarios lighter than this");
  app.add_option("--sigmas", rc.compare_sigmas, "Threshold for compare mode")
      ->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(fctl::ExitCode::config_error);
  }
  return static_cast<int>(fctl::run(rc, std::cerr));
}
