#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lagsol/config.hpp"
#include "lagsol/runner.hpp"

int main(int argc, char** argv) {
  using namespace lagsol;
  CLI::App app{"Lagrangian translating soliton toolkit"};
  // --h is the step override, so help is long-form only.
  app.set_help_flag("--help", "print this message and exit");
  std::string mode;
  std::string config_path;
  cli::Overrides ov;
  app.add_option("mode", mode, "curve, surface, verify, flow, preset or suite")
      ->required()
      ->check(CLI::IsMember({"curve", "surface", "verify", "flow", "preset", "suite"}));
  app.add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", ov.out, "output directory");
  app.add_option("--h", ov.h, "grid and curve step")->check(CLI::PositiveNumber);
  app.add_option("--tolerance-c", ov.tolerance_c, "tolerance constant C in C h^2")->check(CLI::PositiveNumber);
  app.add_option("--obj-projection", ov.obj_projection, "OBJ projection")
      ->check(CLI::IsMember({"z1", "z2", "mixed"}));
  CLI11_PARSE(app, argc, argv);
  ov.mode = cli::parse_mode(mode);

  try {
    std::ifstream in(config_path, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();
    const auto cfg = cli::parse_config(text.str(), ov);
    const auto result = cli::run(cfg);
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    std::cout << (result.exit_code == 0 ? "PASS" : "FAIL") << '\n';
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
