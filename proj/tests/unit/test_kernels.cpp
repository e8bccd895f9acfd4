#include <doctest.h>

#include <cmath>
#include <sstream>

#include "blowup/csv.hpp"
#include "blowup/errors.hpp"
#include "blowup/hermite.hpp"
#include "blowup/kernels.hpp"

using namespace blowup;

namespace {

const QuadratureRule& rule() {
  static const QuadratureRule r = QuadratureRule::gauss_hermite(200);
  return r;
}

const PhiSolution& phi0() {
  static const PhiSolution phi = solve_phi_ode(ProblemParams::explicit_log(3.0, 1.0, 0.0), 5.0, 200.0);
  return phi;
}

// Trapezoid over x of mehler(t, y, x) g(x).
double integrate_kernel(double t, double y, const std::function<double(double)>& g) {
  const double dx = 0.002;
  double sum = 0.0;
  for (double x = -40.0; x <= 40.0; x += dx) sum += mehler_kernel(t, y, x) * g(x);
  return sum * dx;
}

}  // namespace

TEST_CASE("mehler kernel integrals") {
  for (double t : {0.5, 2.0}) {
    for (double y : {0.0, 1.7}) {
      CHECK(std::abs(integrate_kernel(t, y, [](double) { return 1.0; }) - std::exp(t)) < 1e-8);
      CHECK(std::abs(integrate_kernel(t, y, [](double x) { return x * x - 2.0; }) - (y * y - 2.0)) < 1e-6);
    }
  }
  // Second-order Taylor oracle: the kernel is a Gaussian of variance 2(1 - e^{-t}) about y e^{-t/2}.
  const auto g = [](double x) { return std::cos(0.5 * x); };
  const double t = 0.01, m = 1.2 * std::exp(-0.005);
  const double taylor = std::exp(t) * (g(m) - (1.0 - std::exp(-t)) * 0.25 * g(m));
  CHECK(std::abs(integrate_kernel(t, 1.2, g) - std::exp(t) * g(m)) < 3e-3);
  CHECK(std::abs(integrate_kernel(t, 1.2, g) - taylor) < 1e-5);
  CHECK(mehler_kernel(1.0, 0.3, 2.0) > 0.0);
  CHECK_THROWS_AS(mehler_kernel(0.0, 0.0, 0.0), DomainError);
}

TEST_CASE("apply_semigroup eigenrelation and growth bound") {
  CHECK(std::abs(apply_semigroup(1.0, [](double x) { return x; }, 2.0, rule()) - std::exp(0.5) * 2.0) < 1e-6);
  CHECK(apply_semigroup(1.5, [](double) { return 1.0; }, -3.0, rule()) == doctest::Approx(std::exp(1.5)));
  const auto cube = [](double x) { return std::pow(1.0 + std::abs(x), 3); };
  auto ratio = [&](double y) {
    return apply_semigroup(2.0, cube, y, rule()) / (std::exp(2.0) * std::pow(1.0 + std::exp(-1.0) * y, 3));
  };
  double C = 0.0;
  for (double y = 0.0; y <= 10.0; y += 0.5) C = std::max(C, ratio(y));
  CHECK(std::isfinite(C));
  for (double y : {20.0, 40.0, 80.0}) CHECK(ratio(y) <= C);
}

TEST_CASE("field form of the semigroup warns when the window is too small") {
  const Grid small = Grid::symmetric(4.0, 0.05);
  const auto f = WeightedField::sample(small, 0.0, [](double) { return 1.0; });
  CHECK(apply_semigroup(1.0, f, rule()).window_warning);
  const Grid wide = Grid::symmetric(40.0, 0.05);
  const auto g = WeightedField::sample(wide, 0.0, [](double y) { return std::exp(-y * y); });
  const auto r = apply_semigroup(0.5, g, rule());
  CHECK_FALSE(r.window_warning);
  CHECK(std::abs(r.field.values[wide.center()] - apply_semigroup(0.5, [](double y) { return std::exp(-y * y); }, 0.0, rule())) <
        1e-6);
}

TEST_CASE("free propagation of h2 is stationary") {
  const Grid g = Grid::symmetric(3.0 * 5.0 * std::sqrt(31.0), 0.05);
  PropagationOptions free;
  free.include_potential = false;
  const auto theta =
      propagate_K(30.0, 31.0, WeightedField::sample(g, 30.0, [](double y) { return y * y - 2.0; }), phi0(), free);
  for (double y : {0.0, 3.0, 10.0}) CHECK(std::abs(interpolate(theta, y) - (y * y - 2.0)) < 1e-3 * (1.0 + y * y));
}

TEST_CASE("propagation is linear") {
  const double sigma = 30.0, s = 30.5;
  const Grid g = Grid::symmetric(3.0 * 5.0 * std::sqrt(s), 0.05);
  const auto a = make_kernel_probe(KernelProbe::Mode1, g, sigma, 5.0);
  const auto b = make_kernel_probe(KernelProbe::TailBump, g, sigma, 5.0);
  WeightedField c = a;
  for (std::size_t i = 0; i < g.size(); ++i) c.values[i] = 2.0 * a.values[i] - 0.5 * b.values[i];
  const std::vector<WeightedField> batch = {a, b, c};
  const auto out = propagate_K_batch(sigma, s, batch, phi0());
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    scale = std::max(scale, std::abs(out[2].values[i]));
    err = std::max(err, std::abs(out[2].values[i] - (2.0 * out[0].values[i] - 0.5 * out[1].values[i])));
  }
  CHECK(err <= 1e-10 * std::max(1.0, scale));
  const auto single = propagate_K(sigma, s, a, phi0());
  for (std::size_t i = 0; i < g.size(); i += 97) CHECK(single.values[i] == doctest::Approx(out[0].values[i]));
}

TEST_CASE("propagation rejects an unstable step") {
  const Grid g = Grid::symmetric(20.0, 0.05);
  PropagationOptions o;
  o.dt = 0.1;
  CHECK_THROWS_AS(propagate_K(30.0, 31.0, WeightedField::zeros(g, 30.0), phi0(), o), StepSizeError);
}

TEST_CASE("second-order grid convergence on a smooth probe") {
  const double sigma = 30.0, s = 30.5;
  PropagationOptions free;
  free.include_potential = false;
  auto run = [&](double dy) {
    const Grid g = Grid::symmetric(40.0, dy);
    return propagate_K(sigma, s, WeightedField::sample(g, sigma, [](double y) { return std::exp(-y * y / 4.0); }), phi0(),
                       free);
  };
  const auto a = run(0.2), b = run(0.1), c = run(0.05);
  double e1 = 0.0, e2 = 0.0;
  for (double y = -10.0; y <= 10.0; y += 0.2) {
    e1 = std::max(e1, std::abs(interpolate(a, y) - interpolate(b, y)));
    e2 = std::max(e2, std::abs(interpolate(b, y) - interpolate(c, y)));
  }
  const double ratio = e1 / e2;
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("kernel bounds: zero probe and report columns") {
  const std::vector<KernelProbe> probes = {KernelProbe::Zero, KernelProbe::Mode0, KernelProbe::TailBump};
  KernelCheckOptions o;
  o.samples = 2;
  const auto reports = verify_kernel_bounds(30.0, 1.0, probes, phi0(), o);
  CHECK(!reports.empty());
  for (const auto& r : reports) {
    CHECK(std::isfinite(r.measured));
    if (r.probe == KernelProbe::Zero) CHECK(r.measured == 0.0);
    CHECK(r.pass);
  }
  std::stringstream ss;
  write_kernel_reports(ss, reports);
  const auto t = read_csv(ss);
  for (const char* c : {"probe", "sigma", "s", "component", "measured", "bound_shape_value", "fitted_C", "pass"})
    CHECK(t.has_column(c));
}
