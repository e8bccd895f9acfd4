#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "blowup/errors.hpp"
#include "lab/config.hpp"
#include "lab/criteria.hpp"
#include "lab/plot_spec.hpp"
#include "lab/suite.hpp"

using namespace lab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("blowuplab-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const auto d = parse("");
  CHECK(d.numerics.K == 5.0);
  CHECK(d.numerics.A == 20.0);
  CHECK(d.numerics.s0 == 20.0);
  CHECK(d.numerics.dy == 0.05);
  CHECK(d.problem_params().varrho() == doctest::Approx(0.45));
  const auto c = parse(
      "# comment\n[problem]\np = 2.5\ncase = explicit_log ; trailing\nmu = 0.5\n\n[numerics]\nshoot_scheme = rk4\n"
      "[run]\nseed = 7\n");
  CHECK(c.problem.p == 2.5);
  CHECK(c.problem.mu == 0.5);
  CHECK(c.numerics.shoot_scheme == blowup::TimeScheme::ExplicitRK4);
  CHECK(c.run.seed == 7);
}

TEST_CASE("config errors carry the offending line") {
  CHECK(error_line("[problem]\np = 3\nbogus = 1\n") == 3);
  CHECK(error_line("[nowhere]\n") == 1);
  CHECK(error_line("[numerics]\ndy = 0.05\ndy = 0.1\n") == 3);
  CHECK(error_line("[numerics]\n\nK = five\n") == 3);
  CHECK(error_line("[problem]\np = 0.5\n") == 2);
  CHECK(error_line("[numerics]\nA = 1\n") == 2);
  CHECK(error_line("key_without_section = 1\n") == 1);
  try {
    parse("[problem]\nq = 1\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("test.cfg:2:", 0) == 0);
  }
}

TEST_CASE("config hash is stable and ignores output location") {
  const auto a = parse("[problem]\nmu = 0.5\n[run]\nout = /tmp/a\njobs = 4\n");
  const auto b = parse("[run]\nout = /tmp/b\n[problem]\nmu = 0.5\n");
  const auto c = parse("[problem]\nmu = 0.25\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash().size() == 16);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(is_suite_name("all"));
  CHECK_FALSE(is_suite_name("everything"));
}

TEST_CASE("suites map onto the criteria") {
  CHECK(suite_criteria("spectral") == std::vector<int>{1});
  CHECK(suite_criteria("kernel") == std::vector<int>{2, 6});
  CHECK(suite_criteria("physical") == std::vector<int>{8, 9});
  CHECK(suite_criteria("all").size() == 9);
  std::vector<int> covered;
  for (const char* s : {"profiles", "spectral", "kernel", "dynamics", "shoot", "physical"}) {
    for (int id : suite_criteria(s)) covered.push_back(id);
  }
  std::sort(covered.begin(), covered.end());
  CHECK(covered == suite_criteria("all"));
  CHECK_THROWS(suite_criteria("nope"));
  CHECK(criteria_table().size() == 9);
}

TEST_CASE("spectral suite writes a table and a manifest") {
  const auto dir = scratch("spectral");
  SuiteOptions o;
  o.out_root = dir;
  o.verbose = false;
  std::ostringstream log;
  const auto outcome = run_suite("spectral", ExperimentConfig{}, o, log);
  CHECK(outcome.pass());
  CHECK(log.str().rfind("PASS C1", 0) == 0);
  CHECK(fs::exists(dir / "spectral" / "orthogonality.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "spectral" / "manifest.json"));
  CHECK(j["config_hash"] == ExperimentConfig{}.hash());
  CHECK(j["criteria"].size() == 1);
  CHECK(j["criteria"][0]["pass"] == true);
  CHECK(slurp(dir / "spectral" / "orthogonality.csv").find("# config_hash=") == 0);
}

TEST_CASE("criterion failures and exceptions become FAIL lines") {
  CriterionResult r;
  r.id = 4;
  r.title = "t";
  r.checks.push_back(check_le("x", 2.0, 1.0));
  CHECK_FALSE(r.pass());
  CHECK(r.summary_line() == "FAIL C4 t: x = 2, required <= 1");
  const CriterionEntry thrower{9, "boom", "throws", 10.0,
                               [](const ExperimentConfig&, const Artifacts&) -> CriterionResult {
                                 throw std::runtime_error("kaput");
                               }};
  const auto res = run_criterion(thrower, ExperimentConfig{}, Artifacts{});
  CHECK_FALSE(res.pass());
  CHECK(res.summary_line().find("error: kaput") != std::string::npos);
  CHECK(check_in("v", 0.5, 0.0, 1.0).pass);
  CHECK_FALSE(check_ge("v", 0.5, 1.0).pass);
}

TEST_CASE("decay plot spec carries the reference slope and is deterministic") {
  const auto dir = scratch("plot");
  const auto csv = dir / "decay.csv";
  write_file(csv, "# config_hash=abc\ns,R2\n50,1e-4\n100,1e-5\n500,2e-7\n");
  PlotOptions o;
  o.reference_slope = -2.5;
  const auto path = emit_plot_spec(csv.string(), PlotKind::DecayLogLog, o);
  CHECK(fs::path(path).filename() == "decay.decay_loglog.json");
  const std::string first = slurp(path);
  emit_plot_spec(csv.string(), PlotKind::DecayLogLog, o);
  CHECK(slurp(path) == first);
  const auto j = nlohmann::json::parse(first);
  CHECK(first.find("-2.5") != std::string::npos);
  CHECK(j.contains("series"));
}

TEST_CASE("profile overlay includes f(z)") {
  const auto dir = scratch("overlay");
  const auto csv = dir / "prof.csv";
  write_file(csv, "# p=3\nz,value\n0,0.7\n1,0.65\n2,0.5\n");
  const auto text = slurp(emit_plot_spec(csv.string(), PlotKind::ProfileOverlay));
  CHECK(text.find("f(z)") != std::string::npos);
}

TEST_CASE("missing columns raise a schema error naming them") {
  const auto dir = scratch("schema");
  const auto csv = dir / "bad.csv";
  write_file(csv, "s,q0\n20,0.1\n");
  try {
    emit_plot_spec(csv.string(), PlotKind::TrajectoryModes);
    FAIL("expected SchemaError");
  } catch (const blowup::SchemaError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("q1") != std::string::npos);
    CHECK(msg.find("q2") != std::string::npos);
  }
  CHECK(plot_kind_from_string("winding_map") == PlotKind::WindingMap);
  CHECK_THROWS(plot_kind_from_string("pie"));
}
