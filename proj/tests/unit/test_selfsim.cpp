#include <doctest.h>

#include <cmath>
#include <sstream>

#include "blowup/csv.hpp"
#include "blowup/errors.hpp"
#include "blowup/kernels.hpp"
#include "blowup/selfsim.hpp"

using namespace blowup;

namespace {

const PhiSolution& phi0() {
  static const PhiSolution phi = solve_phi_ode(ProblemParams::explicit_log(3.0, 1.0, 0.0), 5.0, 200.0);
  return phi;
}

SolverConfig quick(double s_end) {
  SolverConfig c;
  c.half_width = 3.0 * 5.0 * std::sqrt(s_end);
  return c;
}

}  // namespace

TEST_CASE("initial data with d = 0 is the constant correction") {
  const double s0 = 20.0;
  const Grid g = Grid::symmetric(40.0, 0.1);
  const auto q = make_initial_data(0.0, 0.0, s0, phi0(), g);
  for (double v : q.values) CHECK(v == doctest::Approx(-phi0().phi(s0) / (2.0 * 3.0 * s0)).epsilon(1e-14));
  CHECK(initial_data_value(0.01, 0.02, 3.0, s0, phi0()) == doctest::Approx(interpolate(make_initial_data(0.01, 0.02, s0, phi0(), g), 3.0)).epsilon(1e-6));
}

TEST_CASE("initial data gradient scales like (|d0| + |d1|)/sqrt(s0)") {
  for (double s0 : {20.0, 80.0}) {
    const Grid g = Grid::symmetric(3.0 * 5.0 * std::sqrt(s0), 0.02);
    const double d = 0.05;
    const auto q = make_initial_data(d, d, s0, phi0(), g);
    double grad = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
      grad = std::max(grad, std::abs(q.values[i + 1] - q.values[i - 1]) / (2.0 * g.spacing()));
    CHECK(grad * std::sqrt(s0) / (2.0 * d) < 2.0);
    CHECK(grad * std::sqrt(s0) / (2.0 * d) > 0.05);
  }
}

TEST_CASE("zero data with R switched off stays zero") {
  const Grid g = Grid::symmetric(30.0, 0.1);
  SourceMask mask;
  mask.R = false;
  auto q = WeightedField::zeros(g, 20.0);
  for (int k = 0; k < 5; ++k) q = step_q(q, 1e-3, phi0(), mask);
  for (double v : q.values) CHECK(v == 0.0);
  CHECK(q.s == doctest::Approx(20.005));
}

TEST_CASE("with only the linear part a step matches the semigroup") {
  const Grid g = Grid::symmetric(30.0, 0.05);
  SourceMask mask{false, false, false, false};
  const auto f = [](double y) { return std::exp(-y * y / 8.0); };
  const double dt = 0.001;
  auto q = WeightedField::sample(g, 20.0, f);
  for (int k = 0; k < 10; ++k) q = step_q(q, dt, phi0(), mask);
  const auto rule = QuadratureRule::gauss_hermite(200);
  for (double y : {0.0, 1.0, 4.0}) CHECK(std::abs(interpolate(q, y) - apply_semigroup(10 * dt, f, y, rule)) < 1e-4);
}

TEST_CASE("non-finite data raises SolverBlowUp with a location") {
  const Grid g = Grid::symmetric(10.0, 0.1);
  auto q = WeightedField::zeros(g, 20.0);
  q.values[g.center() + 3] = std::nan("");
  try {
    step_q(q, 1e-3, phi0());
    FAIL("expected SolverBlowUp");
  } catch (const SolverBlowUp& e) {
    CHECK(std::isfinite(e.s()));
    CHECK(std::abs(e.y()) <= 10.0);
  }
}

TEST_CASE("large d0 leaves the shrinking set through mode 0") {
  auto c = quick(30.0);
  const auto tr = evolve(0.5, 0.0, 20.0, 30.0, phi0(), c);
  CHECK(tr.termination == Termination::Exit);
  CHECK(tr.exit.constraint == Constraint::Mode0);
  CHECK(tr.exit.s_exit < 22.0);
}

TEST_CASE("trajectory invariants: increasing samples, evenness, determinism") {
  auto c = quick(21.0);
  c.stop_on_exit = false;
  c.store_fields = true;
  const auto a = evolve(0.01, 0.0, 20.0, 21.0, phi0(), c);
  const auto b = evolve(0.01, 0.0, 20.0, 21.0, phi0(), c);
  REQUIRE(a.samples.size() >= 10);
  for (std::size_t k = 1; k < a.samples.size(); ++k) CHECK(a.samples[k].s > a.samples[k - 1].s);
  const auto& last = a.fields.back();
  const std::size_t n = last.grid.size();
  for (std::size_t i = 0; i < n / 2; i += 7) CHECK(std::abs(last.values[i] - last.values[n - 1 - i]) < 1e-9);
  for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].norms.q_sup == b.samples[k].norms.q_sup);
  const auto dec = a.decomposition(a.samples.size() - 1);
  const auto rec = dec.reconstruct();
  for (std::size_t i = 0; i < n; i += 11) CHECK(std::abs(rec.values[i] - last.values[i]) < 1e-10);
}

TEST_CASE("trajectory CSV columns") {
  auto c = quick(20.5);
  const auto tr = evolve(0.0, 0.0, 20.0, 20.5, phi0(), c);
  std::stringstream ss;
  tr.write_csv(ss);
  const auto t = read_csv(ss);
  for (const char* col : {"s", "q0", "q1", "q2", "norm_qminus_weighted", "norm_qe", "norm_q", "norm_grad_q", "in_VA",
                          "exit_flag"})
    CHECK(t.has_column(col));
}

TEST_CASE("full step is second-order grid convergent") {
  const double s0 = 20.0, s1 = 20.2;
  auto run = [&](double dy) {
    SolverConfig c = quick(s1);
    c.dy = dy;
    c.stop_on_exit = false;
    c.store_fields = true;
    c.record_every = 0.2;
    return evolve(0.02, 0.01, s0, s1, phi0(), c);
  };
  const auto a = run(0.2), b = run(0.1), d = run(0.05);
  double e1 = 0.0, e2 = 0.0;
  for (double y = -20.0; y <= 20.0; y += 0.2) {
    e1 = std::max(e1, std::abs(interpolate(a.fields.back(), y) - interpolate(b.fields.back(), y)));
    e2 = std::max(e2, std::abs(interpolate(b.fields.back(), y) - interpolate(d.fields.back(), y)));
  }
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}

TEST_CASE("w = kappa is stationary and flat data follows the scalar ODE") {
  const double kappa = phi0().params().kappa();
  SolverConfig c;
  c.half_width = 20.0;
  c.record_every = 0.5;
  const Grid g = c.make_grid(21.0);
  const auto wk = evolve_w(WeightedField::sample(g, 20.0, [&](double) { return kappa; }), 21.0, phi0(), c);
  for (double v : wk.fields.back().values) CHECK(v == doctest::Approx(kappa).epsilon(1e-12));

  const double w0 = 0.5;
  const auto wc = evolve_w(WeightedField::sample(g, 20.0, [&](double) { return w0; }), 21.0, phi0(), c);
  // w' = -w/2 + w^3 has w^{-2} = 2 + (w0^{-2} - 2) e^{s - s0}.
  const double exact = 1.0 / std::sqrt(2.0 + (1.0 / (w0 * w0) - 2.0) * std::exp(1.0));
  for (std::size_t i = 0; i < g.size(); i += 13) CHECK(wc.fields.back().values[i] == doctest::Approx(exact).epsilon(1e-8));
}
