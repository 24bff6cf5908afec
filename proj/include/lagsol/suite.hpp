#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lagsol/config.hpp"

namespace lagsol::cli {

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool upper = true;  // value <= bound when true, value >= bound otherwise
  bool pass = false;
  std::string note;
};

Check at_most(std::string name, double value, double bound, std::string note = {});
Check at_least(std::string name, double value, double bound, std::string note = {});

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;

  bool pass() const;
};

struct SuiteResult {
  std::vector<CriterionResult> criteria;

  bool pass() const;
};

// The acceptance battery, criteria 1 to 7. Criterion 8 (byte-identical
// reports) needs two runs and is checked by the callers.
SuiteResult run_suite(const SuiteSpec& spec, double tolerance_c = 10.0);

CriterionResult run_criterion(int id, double tolerance_c = 10.0);

nlohmann::ordered_json checks_to_json(const std::vector<Check>& checks);
nlohmann::ordered_json suite_to_json(const SuiteResult& result);

}  // namespace lagsol::cli
