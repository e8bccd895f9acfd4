#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>

#include "blowup/mol.hpp"
#include "blowup/params.hpp"

namespace lab {

/// Parse or validation failure; what() reads "source:line: message" (line 0 when not line-bound).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct ProblemBlock {
  double p = 3.0;
  blowup::PerturbationCase perturbation_case = blowup::PerturbationCase::ExplicitLog;
  double a = 1.0;
  double mu = 0.0;
  double M = 1.0;
  double varrho = 0.0;  // 0 means 0.9 nu
};

struct NumericsBlock {
  double dy = 0.05;
  int quadrature_order = 200;
  double K = 5.0;
  double A = 20.0;
  double s0 = 20.0;
  double horizon = 10.0;  // trajectories run over [s0, s0 + horizon]
  double record_every = 0.1;
  blowup::TimeScheme shoot_scheme = blowup::TimeScheme::ImexARS222;
  double shoot_pad = 2.0;  // extra horizon given to the shooting search
};

struct KernelBlock {
  double sigma = 30.0;
  double lambda = 1.0;
  int samples = 4;
};

struct PhysicalBlock {
  double log_T = 6.0;  // T = e^{-log_T}, so the similarity time starts at log_T
  double c_dt = 0.005;
  double mesh_a = 2e-7;
  double mesh_dxi = 0.01;
  double half_width = 2.0;
  double amplification_cap = 1e6;
  double K0 = 3.0;
  double shoot_A = 5.0;
};

struct RunBlock {
  std::string suite = "all";
  std::string out = "blowuplab-out";
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct ExperimentConfig {
  ProblemBlock problem;
  NumericsBlock numerics;
  KernelBlock kernel;
  PhysicalBlock physical;
  RunBlock run;

  blowup::ProblemParams problem_params() const;
  /// Sorted section.key=value lines of every setting that affects results.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

/// Sectioned key = value text. '#' and ';' start comments. Unknown sections or keys,
/// duplicates and malformed values are rejected with the offending line.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

std::string fnv1a_hex(const std::string& text);

/// The valid suite names, "all" included.
bool is_suite_name(const std::string& name);

}  // namespace lab
