#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "blowup/csv.hpp"
#include "lab/criteria.hpp"

namespace lab {

using blowup::format_double;

bool CriterionResult::pass() const {
  if (!error.empty() || checks.empty()) return false;
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

std::string describe(const Check& c) {
  std::ostringstream s;
  s << c.name << " = " << format_double(c.value);
  if (c.relation == "in") {
    s << ", required in [" << format_double(c.limit) << ", " << format_double(c.limit_hi) << "]";
  } else if (!c.relation.empty()) {
    s << ", required " << c.relation << " " << format_double(c.limit);
  }
  return s.str();
}

}  // namespace

std::string CriterionResult::summary_line() const {
  std::string line = (pass() ? "PASS C" : "FAIL C") + std::to_string(id) + " " + title;
  if (!error.empty()) return line + ": error: " + error;
  for (const auto& c : checks) {
    if (!c.pass) return line + ": " + describe(c);
  }
  return line;
}

void CriterionResult::print_details(std::ostream& out) const {
  for (const auto& c : checks) out << "    [" << (c.pass ? "ok" : "!!") << "] " << describe(c) << "\n";
  for (const auto& n : notes) out << "    note: " << n << "\n";
  if (!error.empty()) out << "    error: " << error << "\n";
}

Check check_le(const std::string& name, double value, double limit) {
  return {name, value, "<=", limit, 0.0, value <= limit};
}

Check check_ge(const std::string& name, double value, double limit) {
  return {name, value, ">=", limit, 0.0, value >= limit};
}

Check check_in(const std::string& name, double value, double lo, double hi) {
  return {name, value, "in", lo, hi, value >= lo && value <= hi};
}

Check check_true(const std::string& name, bool ok) { return {name, ok ? 1.0 : 0.0, "", 0.0, 0.0, ok}; }

Artifacts::Artifacts(std::filesystem::path dir, blowup::CsvMeta meta) : dir_(std::move(dir)), meta_(std::move(meta)) {
  std::filesystem::create_directories(*dir_);
}

void Artifacts::write(const std::string& name,
                      const std::function<void(std::ostream&, const blowup::CsvMeta&)>& fill) const {
  if (!dir_) return;
  const auto path = *dir_ / name;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  fill(f, meta_);
  written_.push_back(name);
}

void Artifacts::plot(const std::string& name, PlotKind kind, const PlotOptions& options) const {
  if (!dir_) return;
  const auto spec = emit_plot_spec((*dir_ / name).string(), kind, options);
  written_.push_back(std::filesystem::path(spec).filename().string());
}

const std::vector<CriterionEntry>& criteria_table() {
  static const std::vector<CriterionEntry> table = {
      {1, "spectral", "Hermite orthogonality and triple products", 5.0, &criterion_spectral},
      {2, "semigroup", "Mehler semigroup eigenrelation", 30.0, &criterion_semigroup},
      {3, "phi_ode", "phi-ODE tail asymptotics", 10.0, &criterion_phi_ode},
      {4, "potential", "potential at the origin and in the far field", 5.0, &criterion_potential},
      {5, "sources", "source-term decay exponents", 120.0, &criterion_sources},
      {6, "kernel", "kernel propagation and bounds", 300.0, &criterion_kernel},
      {7, "shooting", "winding-number shooting", 1200.0, &criterion_shooting},
      {8, "physical", "physical blow-up and profiles", 1200.0, &criterion_physical},
      {9, "cross_solver", "cross-solver consistency", 300.0, &criterion_cross_solver},
  };
  return table;
}

CriterionResult run_criterion(const CriterionEntry& entry, const ExperimentConfig& cfg, const Artifacts& out) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = entry.fn(cfg, out);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.id = entry.id;
  r.title = entry.title;
  r.budget_seconds = entry.budget_seconds;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.checks.push_back(check_le("runtime_seconds", r.seconds, r.budget_seconds));
  return r;
}

}  // namespace lab
