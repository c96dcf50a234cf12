#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bhzsim: spin Chern numbers of the BHZ model"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ulink", "U-link invariants over the sweep points"},
      {"lr", "linear-response curvature and spin Chern number"},
      {"sweep", "ulink and lr combined"},
      {"tomography", "measurement pipeline vs direct Bloch components on one ky line"},
      {"frames-check", "lab frame vs rotating frame evolution"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--output", output, "output CSV path (overrides output_path)");
    sub->add_option("--workers", workers, "worker threads (overrides workers)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "gauge-scrambling seed (overrides seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bhzcli::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  bhzcli::RunConfig cfg;
  try {
    cfg = bhzcli::load_config(config_path);
  } catch (const bhzcli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return bhzcli::kExitConfig;
  }
  if (output) cfg.output_path = *output;
  if (workers) cfg.workers = *workers;
  if (seed) cfg.seed = *seed;

  return bhzcli::run_command(name, cfg, std::cout, std::cerr);
}
