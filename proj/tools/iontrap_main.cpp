#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "iontrap/scenarios.hpp"

namespace {

void usage(std::ostream& out) {
  out << "usage: iontrap <scenario> --config <path> [--out <path>] [--seed <n>]\n"
         "scenarios: rate stability secular chain lock servo dynamics\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace iontrap;

  if (argc < 2) {
    usage(std::cerr);
    return 1;
  }
  const std::string scenario = argv[1];
  if (scenario == "--help" || scenario == "-h") {
    usage(std::cout);
    return 0;
  }

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[++i];
    } else if (arg == "--out" && i + 1 < argc) {
      out_path = argv[++i];
    } else if (arg == "--seed" && i + 1 < argc) {
      seed = std::stoull(argv[++i]);
      seed_given = true;
    } else {
      std::cerr << "error: unrecognized argument '" << arg << "'\n";
      usage(std::cerr);
      return 1;
    }
  }
  if (config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return 1;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file '" << config_path << "'\n";
    return 1;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  ConfigErrors parse_errors;
  RunConfig config = parse_config(buffer.str(), parse_errors);
  if (config.scenario.empty()) {
    config.scenario = scenario;
  } else if (config.scenario != scenario) {
    parse_errors.messages.push_back("scenario '" + config.scenario +
                                    "' in config conflicts with '" + scenario +
                                    "' on the command line");
  }
  if (seed_given) {
    config.seed = seed;
    config.seed_overridden = true;
  } else if (config.values.count("seed")) {
    config.seed = std::stoull(config.values["seed"]);
    config.seed_overridden = true;
    config.values.erase("seed");
  }
  if (!parse_errors.ok()) {
    for (const auto& m : parse_errors.messages) std::cerr << "config error: " << m << "\n";
    return 1;
  }

  try {
    ScenarioResult result = run_scenario(config);
    if (!result.errors.ok()) {
      for (const auto& m : result.errors.messages) std::cerr << "config error: " << m << "\n";
      return 1;
    }
    if (out_path.empty())
      std::cout << to_csv(result.table);
    else
      write_csv(result.table, out_path);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
