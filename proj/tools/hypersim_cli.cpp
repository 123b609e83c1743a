#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hypersim/registry.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hypersim: exact simulator for two-DOF photonic protocols"};

  std::string config_path, protocol, mode, out_path, format;
  std::vector<std::string> sets;
  long trials = -1;
  std::uint64_t seed = 0;
  bool seed_given = false, list = false;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--protocol", protocol, "protocol name (see --list)");
  app.add_option("--set", sets, "parameter override key=value (repeatable)");
  app.add_option("--mode", mode, "exact | sample");
  app.add_option("--trials", trials, "sample size for --mode sample");
  auto* seed_opt = app.add_option("--seed", seed, "sampler seed");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--format", format, "csv | json");
  app.add_flag("--list", list, "list registered protocols and exit");

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  if (list) {
    std::cout << hypersim::cli::render_protocol_list();
    return 0;
  }

  hypersim::cli::RunConfig config;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return hypersim::cli::kExitIoFailure;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    try {
      config = hypersim::cli::config_from_json(buf.str());
    } catch (const std::exception& e) {
      std::cerr << "error: bad config: " << e.what() << "\n";
      return hypersim::cli::kExitInvalidParams;
    }
  }
  if (!protocol.empty()) config.protocol = protocol;
  if (!mode.empty()) config.mode = mode;
  if (trials >= 0) config.trials = trials;
  if (seed_given) config.seed = seed;
  if (!out_path.empty()) config.output_path = out_path;
  if (!format.empty()) config.output_format = format;
  for (const auto& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      return hypersim::cli::kExitInvalidParams;
    }
    config.parameters[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (config.protocol.empty()) {
    std::cerr << "error: no protocol given (use --protocol or --config; --list to browse)\n";
    return hypersim::cli::kExitUnknownProtocol;
  }

  auto result = hypersim::cli::run(config);
  if (result.exit_code != 0) {
    std::cerr << "error: " << result.message << "\n";
    return result.exit_code;
  }
  if (config.output_path.empty()) std::cout << result.payload;
  return 0;
}
