#include "lab/suite.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "blowup/profile.hpp"

#ifndef BLOWUPLAB_VERSION
#define BLOWUPLAB_VERSION "0.0.0"
#endif

namespace lab {

namespace {

const std::map<std::string, std::vector<int>>& suite_table() {
  static const std::map<std::string, std::vector<int>> t = {
      {"profiles", {3}},    {"spectral", {1}}, {"kernel", {2, 6}},
      {"dynamics", {4, 5}}, {"shoot", {7}},    {"physical", {8, 9}},
      {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9}},
  };
  return t;
}

blowup::CsvMeta base_meta(const ExperimentConfig& cfg, const std::string& suite) {
  return {{"config_hash", cfg.hash()}, {"suite", suite}, {"version", version_string()}};
}

}  // namespace

std::vector<int> suite_criteria(const std::string& suite) {
  const auto it = suite_table().find(suite);
  if (it == suite_table().end()) throw std::invalid_argument("unknown suite '" + suite + "'");
  return it->second;
}

bool SuiteOutcome::pass() const {
  for (const auto& r : results) {
    if (!r.pass()) return false;
  }
  return !results.empty();
}

std::string version_string() { return BLOWUPLAB_VERSION; }

std::string compiler_string() {
#if defined(__clang__)
  return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  return std::string("gcc ") + __VERSION__;
#else
  return "unknown";
#endif
}

SuiteOutcome run_suite(const std::string& suite, const ExperimentConfig& cfg, const SuiteOptions& options,
                       std::ostream& log) {
  const auto ids = suite_criteria(suite);
  const auto start = std::chrono::steady_clock::now();
  SuiteOutcome outcome;
  outcome.suite = suite;
  Artifacts out;
  if (!options.out_root.empty()) {
    outcome.dir = options.out_root / suite;
    out = Artifacts(outcome.dir, base_meta(cfg, suite));
  }

  // The configured problem's phi table rides along with the profiles suite.
  if (suite == "profiles" && out.enabled()) {
    const auto pp = cfg.problem_params();
    const auto phi = blowup::solve_phi_ode(pp, 5.0, 1e4);
    out.write("phi.csv", [&](std::ostream& f, const blowup::CsvMeta& meta) { phi.write_csv(f, meta); });
  }

  for (int id : ids) {
    const CriterionEntry& entry = criteria_table().at(static_cast<std::size_t>(id - 1));
    if (options.verbose) log << "running C" << id << " (" << entry.key << ")..." << std::endl;
    CriterionResult r = run_criterion(entry, cfg, out);
    log << r.summary_line() << std::endl;
    if (options.verbose) r.print_details(log);
    outcome.results.push_back(std::move(r));
  }
  outcome.artifacts = out.written();
  outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (out.enabled()) {
    std::ofstream f(outcome.dir / "manifest.json");
    if (!f) throw std::runtime_error("cannot write " + (outcome.dir / "manifest.json").string());
    write_manifest(f, outcome, cfg);
    outcome.artifacts.push_back("manifest.json");
  }
  return outcome;
}

void write_manifest(std::ostream& out, const SuiteOutcome& outcome, const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["suite"] = outcome.suite;
  j["config_hash"] = cfg.hash();
  j["config"] = cfg.canonical();
  j["version"] = version_string();
  j["compiler"] = compiler_string();
  j["wall_seconds"] = outcome.seconds;
  j["pass"] = outcome.pass();
  auto& crit = j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& r : outcome.results) {
    nlohmann::ordered_json c;
    c["id"] = r.id;
    c["title"] = r.title;
    c["pass"] = r.pass();
    c["seconds"] = r.seconds;
    auto& checks = c["checks"] = nlohmann::ordered_json::array();
    for (const auto& k : r.checks) {
      nlohmann::ordered_json e{{"name", k.name}, {"value", k.value}, {"relation", k.relation}, {"limit", k.limit}};
      if (k.relation == "in") e["limit_hi"] = k.limit_hi;
      e["pass"] = k.pass;
      checks.push_back(std::move(e));
    }
    c["notes"] = r.notes;
    if (!r.error.empty()) c["error"] = r.error;
    crit.push_back(std::move(c));
  }
  j["artifacts"] = outcome.artifacts;
  out << j.dump(2) << "\n";
}

}  // namespace lab
