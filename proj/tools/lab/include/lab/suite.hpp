#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "lab/config.hpp"
#include "lab/criteria.hpp"

namespace lab {

/// Criterion ids run by a suite; throws std::invalid_argument for an unknown name.
std::vector<int> suite_criteria(const std::string& suite);

struct SuiteOutcome {
  std::string suite;
  std::filesystem::path dir;
  std::vector<CriterionResult> results;
  std::vector<std::string> artifacts;
  double seconds = 0.0;

  bool pass() const;
};

struct SuiteOptions {
  std::filesystem::path out_root;  // empty: no artifacts, no manifest
  bool verbose = true;
};

/// Runs the suite's criteria in order, writing artifacts under out_root/suite and a manifest.json.
/// Progress and PASS/FAIL lines go to log.
SuiteOutcome run_suite(const std::string& suite, const ExperimentConfig& cfg, const SuiteOptions& options,
                       std::ostream& log);

/// JSON: suite, config hash and text, version, compiler, wall time, criteria with checks.
void write_manifest(std::ostream& out, const SuiteOutcome& outcome, const ExperimentConfig& cfg);

std::string version_string();
std::string compiler_string();

}  // namespace lab
