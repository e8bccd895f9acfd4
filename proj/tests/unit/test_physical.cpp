#include <doctest.h>

#include <cmath>
#include <sstream>

#include "blowup/csv.hpp"
#include "blowup/errors.hpp"
#include "blowup/physical.hpp"
#include "blowup/selfsim.hpp"

using namespace blowup;

namespace {

const PhiSolution& phi0() {
  static const PhiSolution phi = solve_phi_ode(ProblemParams::explicit_log(3.0, 1.0, 0.0), 5.0, 200.0);
  return phi;
}

}  // namespace

TEST_CASE("u0 at the origin and its symmetry") {
  const double T = std::exp(-6.0);
  CHECK(build_u0_value(0.0, 0.0, 0.0, T, phi0()) == doctest::Approx(std::pow(T, -0.5) * phi0().phi(6.0)).epsilon(1e-14));
  for (double x : {1e-3, 0.02, 0.3}) {
    CHECK(build_u0_value(0.05, 0.0, x, T, phi0()) == build_u0_value(0.05, 0.0, -x, T, phi0()));
  }
  CHECK_THROWS_AS(build_u0_value(0.0, 0.0, 0.0, std::exp(-300.0), phi0()), DomainError);
}

TEST_CASE("u0 transformed to similarity variables is varphi + q") {
  const double s0 = 20.0, T = std::exp(-s0);
  for (double y : {0.0, 1.3, 7.0, -12.0}) {
    const double w = std::sqrt(T) * build_u0_value(0.01, 0.004, y * std::sqrt(T), T, phi0());
    const double expected = eval_varphi(y, s0, phi0()).value + initial_data_value(0.01, 0.004, y, s0, phi0());
    CHECK(std::abs(w - expected) < 1e-8);
  }
}

TEST_CASE("graded mesh geometry and interpolation") {
  const auto m = PhysicalMesh::graded(2.0, 1e-4, 0.05);
  CHECK(m.x(0) == -2.0);
  CHECK(m.half_width() == 2.0);
  CHECK(m.x(m.center()) == 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(m.x(i) == -m.x(m.size() - 1 - i));
  CHECK(m.min_spacing() < 1e-5);
  std::vector<double> u;
  for (double x : m.nodes()) u.push_back(x * x * x - x);
  for (double x : {-1.234, 0.0021, 0.7}) {
    CHECK(m.interpolate(u, x) == doctest::Approx(x * x * x - x).epsilon(1e-10));
    CHECK(m.interpolate_derivative(u, x) == doctest::Approx(3.0 * x * x - 1.0).epsilon(1e-8));
  }
}

TEST_CASE("compensated time keeps tiny increments") {
  CompensatedTime t;
  t.add(1.0);
  for (int i = 0; i < 1000; ++i) t.add(1e-20);
  CHECK(t.minus(1.0) == doctest::Approx(1e-17));
}

TEST_CASE("flat data follows the scalar ODE") {
  const auto pp = ProblemParams::explicit_log(2.0, 1.0, 0.0);
  const auto mesh = PhysicalMesh::uniform(1.0, 0.1);
  const auto run = evolve_physical(std::vector<double>(mesh.size(), 1.0), mesh, pp, PerturbationFamily::for_params(pp));
  CHECK(run.stop == PhysicalStop::AmplificationCap);
  const auto e = estimate_T(run);
  CHECK(std::abs(e.T - 1.0) < 1e-3);
  CHECK(flat_blowup_time(1.0, 2.0) == 1.0);
  CHECK(flat_blowup_time(2.0, 3.0) == doctest::Approx(0.125));
  for (std::size_t k = 1; k < run.samples.size(); ++k) {
    CHECK(run.samples[k].t.minus(run.samples[k - 1].t) > 0.0);
    if (k > 1) CHECK(run.samples[k].dt <= run.samples[k - 1].dt * (1.0 + 1e-12));
  }
}

// Neumann ends conserve mass, so the flat mode eventually grows; only the spreading phase is checked.
TEST_CASE("small Gaussian data decays while it spreads") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  const auto mesh = PhysicalMesh::uniform(2.0, 0.02);
  std::vector<double> u0;
  for (double x : mesh.nodes()) u0.push_back(0.1 * std::exp(-x * x / 0.01));
  PhysicalConfig c;
  c.c_dt = 1e-4;
  c.max_steps = 60;
  const auto run = evolve_physical(u0, mesh, pp, PerturbationFamily::for_params(pp), c);
  CHECK(run.stop == PhysicalStop::MaxSteps);
  std::size_t k = 1;
  for (; k < run.samples.size() && run.samples[k - 1].max_u > 0.02; ++k) {
    CHECK(run.samples[k].max_u <= run.samples[k - 1].max_u);
  }
  CHECK(k < run.samples.size());
}

TEST_CASE("estimate_T on an exact synthetic series") {
  const double p = 3.0, kappa = 1.0 / std::sqrt(2.0), T = 0.37;
  std::vector<double> t, u;
  for (double tau = 1e-2; tau > 1e-6; tau *= 0.9) {
    t.push_back(T - tau);
    u.push_back(kappa * std::pow(tau, -0.5));
  }
  const auto e = estimate_T_series(t, u, p);
  CHECK(std::abs(e.T - T) < 1e-6);
  CHECK(e.slope == doctest::Approx(-(p - 1.0)).epsilon(1e-6));
  CHECK(e.reliable);

  const std::vector<double> t2 = {0.0, 0.1, 0.2};
  const std::vector<double> u2 = {1.0, 2.0, 3.0};
  PhysicalRun short_run;
  short_run.initial_max = 1.0;
  PhysicalSample smp;
  smp.max_u = 5.0;
  short_run.samples.push_back(smp);
  CHECK_THROWS_AS(estimate_T(short_run), InsufficientDataError);
}

TEST_CASE("t(x0) root, monotonicity and identity") {
  const double T = 0.0025, K0 = 3.0;
  double prev = 0.0;
  for (double x0 : {1e-2, 1e-3, 1e-4}) {
    const auto r = solve_t_of_x0(x0, T, K0);
    CHECK(r.residual < 1e-12);
    CHECK(r.t > prev);
    CHECK(r.t < T);
    prev = r.t;
    CHECK(r.tau * std::abs(std::log(r.tau)) == doctest::Approx(x0 * x0 / (K0 * K0)).epsilon(1e-10));
  }
  CHECK_THROWS(solve_t_of_x0(10.0, T, K0));
}

TEST_CASE("f_hat at zero is f(K0) and the final-profile formula") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  for (double K0 : {1.0, 3.0, 5.0}) CHECK(f_hat(0.0, K0, pp) == doctest::Approx(eval_f(K0, pp)).epsilon(1e-14));
  const double x = 1e-3;
  CHECK(final_profile_theory(x, 3.0) == doctest::Approx(std::sqrt(24.0 * std::abs(std::log(x)) / (4.0 * x * x))));
}

TEST_CASE("run CSV columns") {
  const auto pp = ProblemParams::explicit_log(2.0, 1.0, 0.0);
  const auto mesh = PhysicalMesh::uniform(1.0, 0.2);
  PhysicalConfig c;
  c.amplification_cap = 10.0;
  const auto run = evolve_physical(std::vector<double>(mesh.size(), 1.0), mesh, pp, PerturbationFamily::for_params(pp), c);
  std::stringstream ss;
  run.write_csv(ss);
  const auto t = read_csv(ss);
  for (const char* col : {"t", "dt", "max_u", "argmax_x", "u_at_0"}) CHECK(t.has_column(col));
  REQUIRE(!run.snapshots.empty());
  std::stringstream sn;
  PhysicalRun::write_snapshot_csv(sn, mesh, run.snapshots.back());
  const auto ts = read_csv(sn);
  CHECK(ts.has_column("x"));
  CHECK(ts.has_column("u"));
}
