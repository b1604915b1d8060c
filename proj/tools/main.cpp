#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "config.hpp"
#include "hypercyc/errors.hpp"
#include "pipelines.hpp"

int main(int argc, char** argv) {
  using namespace hypercyc;
  CLI::App app{"hypercyc: weighted-shift models of group actions"};
  std::string command, config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "weights|norms|jrt|tower|build|support|orbit|feldman|continuous|all")
      ->required()
      ->check(CLI::IsMember(app::commands()));
  app.add_option("--config", config_path, "JSON config")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "overrides the config seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    auto cfg = app::load_config(config_path, seed);
    int code = app::run_and_write(command, cfg, out_dir);
    std::printf("%s: %s (report in %s/report.json)\n", command.c_str(), code == 0 ? "pass" : "FAIL",
                out_dir.c_str());
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
