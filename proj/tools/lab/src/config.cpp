#include "lab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "blowup/csv.hpp"

namespace lab {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Ctx {
  const std::string& source;
  int line;
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source, line, msg); }
};

double to_double(const std::string& v, const Ctx& c) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) c.fail("expected a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& v, const Ctx& c) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) c.fail("expected an integer, got '" + v + "'");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const Ctx&)>;

template <class Block>
Setter real(Block ExperimentConfig::*block, double Block::*field) {
  return [=](ExperimentConfig& cfg, const std::string& v, const Ctx& c) { (cfg.*block).*field = to_double(v, c); };
}

template <class Block>
Setter integer(Block ExperimentConfig::*block, int Block::*field) {
  return [=](ExperimentConfig& cfg, const std::string& v, const Ctx& c) {
    (cfg.*block).*field = static_cast<int>(to_integer(v, c));
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.p", real(&ExperimentConfig::problem, &ProblemBlock::p)},
      {"problem.case",
       [](ExperimentConfig& cfg, const std::string& v, const Ctx& c) {
         try {
           cfg.problem.perturbation_case = blowup::perturbation_case_from_string(v);
         } catch (const std::exception& e) {
           c.fail(e.what());
         }
       }},
      {"problem.a", real(&ExperimentConfig::problem, &ProblemBlock::a)},
      {"problem.mu", real(&ExperimentConfig::problem, &ProblemBlock::mu)},
      {"problem.M", real(&ExperimentConfig::problem, &ProblemBlock::M)},
      {"problem.varrho", real(&ExperimentConfig::problem, &ProblemBlock::varrho)},
      {"numerics.dy", real(&ExperimentConfig::numerics, &NumericsBlock::dy)},
      {"numerics.quadrature_order", integer(&ExperimentConfig::numerics, &NumericsBlock::quadrature_order)},
      {"numerics.K", real(&ExperimentConfig::numerics, &NumericsBlock::K)},
      {"numerics.A", real(&ExperimentConfig::numerics, &NumericsBlock::A)},
      {"numerics.s0", real(&ExperimentConfig::numerics, &NumericsBlock::s0)},
      {"numerics.horizon", real(&ExperimentConfig::numerics, &NumericsBlock::horizon)},
      {"numerics.record_every", real(&ExperimentConfig::numerics, &NumericsBlock::record_every)},
      {"numerics.shoot_scheme",
       [](ExperimentConfig& cfg, const std::string& v, const Ctx& c) {
         try {
           cfg.numerics.shoot_scheme = blowup::time_scheme_from_string(v);
         } catch (const std::exception& e) {
           c.fail(e.what());
         }
       }},
      {"numerics.shoot_pad", real(&ExperimentConfig::numerics, &NumericsBlock::shoot_pad)},
      {"kernel.sigma", real(&ExperimentConfig::kernel, &KernelBlock::sigma)},
      {"kernel.lambda", real(&ExperimentConfig::kernel, &KernelBlock::lambda)},
      {"kernel.samples", integer(&ExperimentConfig::kernel, &KernelBlock::samples)},
      {"physical.log_T", real(&ExperimentConfig::physical, &PhysicalBlock::log_T)},
      {"physical.c_dt", real(&ExperimentConfig::physical, &PhysicalBlock::c_dt)},
      {"physical.mesh_a", real(&ExperimentConfig::physical, &PhysicalBlock::mesh_a)},
      {"physical.mesh_dxi", real(&ExperimentConfig::physical, &PhysicalBlock::mesh_dxi)},
      {"physical.half_width", real(&ExperimentConfig::physical, &PhysicalBlock::half_width)},
      {"physical.amplification_cap", real(&ExperimentConfig::physical, &PhysicalBlock::amplification_cap)},
      {"physical.K0", real(&ExperimentConfig::physical, &PhysicalBlock::K0)},
      {"physical.shoot_A", real(&ExperimentConfig::physical, &PhysicalBlock::shoot_A)},
      {"run.suite",
       [](ExperimentConfig& cfg, const std::string& v, const Ctx& c) {
         if (!is_suite_name(v)) c.fail("unknown suite '" + v + "'");
         cfg.run.suite = v;
       }},
      {"run.out", [](ExperimentConfig& cfg, const std::string& v, const Ctx&) { cfg.run.out = v; }},
      {"run.seed",
       [](ExperimentConfig& cfg, const std::string& v, const Ctx& c) {
         const long long s = to_integer(v, c);
         if (s < 0) c.fail("seed must be non-negative");
         cfg.run.seed = static_cast<std::uint64_t>(s);
       }},
      {"run.jobs", integer(&ExperimentConfig::run, &RunBlock::jobs)},
  };
  return table;
}

void validate(const ExperimentConfig& cfg, const std::map<std::string, int>& lines, const std::string& source) {
  auto at = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  auto require = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(source, at(key), key + ": " + msg);
  };
  try {
    (void)cfg.problem_params();
  } catch (const std::exception& e) {
    int line = 0;
    for (const char* k : {"problem.varrho", "problem.a", "problem.p", "problem.case"}) {
      if (at(k) > 0) {
        line = at(k);
        break;
      }
    }
    throw ConfigError(source, line, std::string("problem parameters rejected: ") + e.what());
  }
  const auto& n = cfg.numerics;
  require(n.dy > 0.0 && n.dy <= 0.5, "numerics.dy", "must lie in (0, 0.5]");
  require(n.quadrature_order >= 8 && n.quadrature_order <= 400, "numerics.quadrature_order", "must lie in [8, 400]");
  require(n.K > 0.0, "numerics.K", "must be positive");
  require(n.A > 1.0, "numerics.A", "must exceed 1");
  require(n.s0 >= 5.0, "numerics.s0", "must be at least 5");
  require(n.horizon > 0.0, "numerics.horizon", "must be positive");
  require(n.record_every > 0.0, "numerics.record_every", "must be positive");
  require(n.shoot_pad >= 0.0, "numerics.shoot_pad", "must be non-negative");
  const auto& k = cfg.kernel;
  require(k.sigma >= 5.0, "kernel.sigma", "must be at least 5");
  require(k.lambda > 0.0 && k.lambda <= k.sigma, "kernel.lambda", "must lie in (0, sigma]");
  require(k.samples >= 1, "kernel.samples", "must be at least 1");
  const auto& ph = cfg.physical;
  require(ph.log_T >= 5.0, "physical.log_T", "must be at least 5 (phi table start)");
  require(ph.c_dt > 0.0 && ph.c_dt <= 0.1, "physical.c_dt", "must lie in (0, 0.1]");
  require(ph.mesh_a > 0.0, "physical.mesh_a", "must be positive");
  require(ph.mesh_dxi > 0.0 && ph.mesh_dxi <= 0.1, "physical.mesh_dxi", "must lie in (0, 0.1]");
  require(ph.half_width > 0.0, "physical.half_width", "must be positive");
  require(ph.amplification_cap >= 1e3, "physical.amplification_cap", "must be at least 1e3");
  require(ph.K0 > 0.0, "physical.K0", "must be positive");
  require(ph.shoot_A > 1.0, "physical.shoot_A", "must exceed 1");
  require(cfg.run.jobs >= 1, "run.jobs", "must be at least 1");
}

}  // namespace

blowup::ProblemParams ExperimentConfig::problem_params() const {
  std::optional<double> varrho;
  if (problem.varrho != 0.0) varrho = problem.varrho;
  return blowup::ProblemParams::make(problem.p, problem.perturbation_case, problem.a, problem.mu, problem.M, varrho);
}

std::string ExperimentConfig::canonical() const {
  using blowup::format_double;
  std::vector<std::string> lines = {
      "problem.p=" + format_double(problem.p),
      "problem.case=" + blowup::to_string(problem.perturbation_case),
      "problem.a=" + format_double(problem.a),
      "problem.mu=" + format_double(problem.mu),
      "problem.M=" + format_double(problem.M),
      "problem.varrho=" + format_double(problem.varrho),
      "numerics.dy=" + format_double(numerics.dy),
      "numerics.quadrature_order=" + std::to_string(numerics.quadrature_order),
      "numerics.K=" + format_double(numerics.K),
      "numerics.A=" + format_double(numerics.A),
      "numerics.s0=" + format_double(numerics.s0),
      "numerics.horizon=" + format_double(numerics.horizon),
      "numerics.record_every=" + format_double(numerics.record_every),
      "numerics.shoot_scheme=" + blowup::to_string(numerics.shoot_scheme),
      "numerics.shoot_pad=" + format_double(numerics.shoot_pad),
      "kernel.sigma=" + format_double(kernel.sigma),
      "kernel.lambda=" + format_double(kernel.lambda),
      "kernel.samples=" + std::to_string(kernel.samples),
      "physical.log_T=" + format_double(physical.log_T),
      "physical.c_dt=" + format_double(physical.c_dt),
      "physical.mesh_a=" + format_double(physical.mesh_a),
      "physical.mesh_dxi=" + format_double(physical.mesh_dxi),
      "physical.half_width=" + format_double(physical.half_width),
      "physical.amplification_cap=" + format_double(physical.amplification_cap),
      "physical.K0=" + format_double(physical.K0),
      "physical.shoot_A=" + format_double(physical.shoot_A),
      "run.seed=" + std::to_string(run.seed),
  };
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical()); }

bool is_suite_name(const std::string& name) {
  static const std::set<std::string> names = {"profiles", "spectral", "kernel", "dynamics", "shoot", "physical", "all"};
  return names.count(name) > 0;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  static const std::set<std::string> sections = {"problem", "numerics", "kernel", "physical", "run"};
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const Ctx ctx{source, line_no};
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) ctx.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected key = value");
    if (section.empty()) ctx.fail("key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) ctx.fail("empty key");
    if (value.empty()) ctx.fail("empty value for '" + key + "'");
    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) ctx.fail("unknown key '" + key + "' in [" + section + "]");
    if (const auto prev = seen.find(full); prev != seen.end()) {
      ctx.fail("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")");
    }
    seen[full] = line_no;
    it->second(cfg, value, ctx);
  }
  validate(cfg, seen, source);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  return parse_config(in, path);
}

}  // namespace lab
