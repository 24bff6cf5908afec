// Acceptance gate: one PASS/FAIL line per criterion.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lagsol/config.hpp"
#include "lagsol/runner.hpp"

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

lagsol::cli::RunResult suite_run(const std::filesystem::path& dir) {
  lagsol::cli::Overrides ov;
  ov.out = dir.string();
  return lagsol::cli::run(lagsol::cli::parse_config(R"({"mode": "suite"})", ov));
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path work = argc > 1 ? argv[1] : "acceptance_work";
  std::filesystem::remove_all(work);

  // Identical configs, so both runs target the same directory.
  const auto first = suite_run(work);
  const std::string first_report = slurp(work / "report.json");
  bool all = true;
  for (const auto& c : first.report["summaries"]["criteria"]) {
    const bool pass = c["pass"].get<bool>();
    all = all && pass;
    std::size_t failed = 0;
    for (const auto& chk : c["checks"]) failed += chk["pass"].get<bool>() ? 0 : 1;
    std::printf("criterion %d %s  %s (%zu checks, %zu failed)\n", c["criterion"].get<int>(), pass ? "PASS" : "FAIL",
                c["title"].get<std::string>().c_str(), c["checks"].size(), failed);
    for (const auto& chk : c["checks"]) {
      if (chk["pass"].get<bool>()) continue;
      std::printf("    %s = %s %s %s\n", chk["name"].get<std::string>().c_str(), chk["value"].dump().c_str(),
                  chk["relation"].get<std::string>().c_str(), chk["bound"].dump().c_str());
    }
  }

  const auto second = suite_run(work);
  const bool same = first.exit_code == second.exit_code && first_report == slurp(work / "report.json");
  all = all && same;
  std::printf("criterion 8 %s  suite reports byte-identical across two runs\n", same ? "PASS" : "FAIL");
  std::printf("acceptance %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
