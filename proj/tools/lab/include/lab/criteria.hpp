#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "blowup/csv.hpp"
#include "lab/config.hpp"
#include "lab/plot_spec.hpp"

namespace lab {

/// One measured quantity compared against its limit.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "in"
  double limit = 0.0;
  double limit_hi = 0.0;  // upper end when relation is "in"
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  double seconds = 0.0;
  double budget_seconds = 0.0;
  std::string error;  // set when the run threw

  bool pass() const;
  /// "PASS C3 title" or "FAIL C3 title: first failing check".
  std::string summary_line() const;
  void print_details(std::ostream& out) const;
};

/// Where a criterion puts its CSVs and plot specs; a sink without a directory writes nothing.
class Artifacts {
 public:
  Artifacts() = default;
  Artifacts(std::filesystem::path dir, blowup::CsvMeta meta);

  bool enabled() const { return dir_.has_value(); }
  /// Opens dir/name for writing and calls fill with the stream and the shared CSV meta.
  void write(const std::string& name, const std::function<void(std::ostream&, const blowup::CsvMeta&)>& fill) const;
  void plot(const std::string& name, PlotKind kind, const PlotOptions& options = {}) const;
  std::vector<std::string> written() const { return written_; }

 private:
  std::optional<std::filesystem::path> dir_;
  blowup::CsvMeta meta_;
  mutable std::vector<std::string> written_;
};

Check check_le(const std::string& name, double value, double limit);
Check check_ge(const std::string& name, double value, double limit);
Check check_in(const std::string& name, double value, double lo, double hi);
Check check_true(const std::string& name, bool ok);

using CriterionFn = CriterionResult (*)(const ExperimentConfig&, const Artifacts&);

CriterionResult criterion_spectral(const ExperimentConfig& cfg, const Artifacts& out);      // 1
CriterionResult criterion_semigroup(const ExperimentConfig& cfg, const Artifacts& out);     // 2
CriterionResult criterion_phi_ode(const ExperimentConfig& cfg, const Artifacts& out);       // 3
CriterionResult criterion_potential(const ExperimentConfig& cfg, const Artifacts& out);     // 4
CriterionResult criterion_sources(const ExperimentConfig& cfg, const Artifacts& out);       // 5
CriterionResult criterion_kernel(const ExperimentConfig& cfg, const Artifacts& out);        // 6
CriterionResult criterion_shooting(const ExperimentConfig& cfg, const Artifacts& out);      // 7
CriterionResult criterion_physical(const ExperimentConfig& cfg, const Artifacts& out);      // 8
CriterionResult criterion_cross_solver(const ExperimentConfig& cfg, const Artifacts& out);  // 9

struct CriterionEntry {
  int id;
  const char* key;
  const char* title;
  double budget_seconds;
  CriterionFn fn;
};

/// All nine, in order.
const std::vector<CriterionEntry>& criteria_table();

/// Runs fn, fills id, timing and the runtime-budget check, and turns exceptions into a failure.
CriterionResult run_criterion(const CriterionEntry& entry, const ExperimentConfig& cfg, const Artifacts& out);

}  // namespace lab
