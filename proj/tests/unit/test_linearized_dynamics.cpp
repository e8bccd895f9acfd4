#include <doctest.h>

#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/fitting.hpp"
#include "blowup/hermite.hpp"
#include "blowup/sources.hpp"

using namespace blowup;

namespace {

const PhiSolution& phi_mu1() {
  static const PhiSolution phi = solve_phi_ode(ProblemParams::explicit_log(3.0, 1.0, 1.0), 5.0, 1e4);
  return phi;
}

const PhiSolution& phi_mu0() {
  static const PhiSolution phi = solve_phi_ode(ProblemParams::explicit_log(3.0, 1.0, 0.0), 5.0, 1e4);
  return phi;
}

}  // namespace

TEST_CASE("B and N vanish at q = 0") {
  for (double y : {-20.0, 0.0, 3.0, 40.0}) {
    CHECK(eval_B(0.0, y, 30.0, phi_mu1()) == 0.0);
    CHECK(eval_N(0.0, y, 30.0, phi_mu1()) == 0.0);
  }
}

TEST_CASE("B for p = 3 is 3 varphi q^2 + q^3") {
  const double s = 40.0;
  for (double y : {0.0, 2.0, 15.0}) {
    const double v = eval_varphi(y, s, phi_mu0()).value;
    for (double q : {1e-3, -0.05, 0.2}) {
      CHECK(eval_B(q, y, s, phi_mu0()) == doctest::Approx(3.0 * v * q * q + q * q * q).epsilon(1e-11));
    }
  }
  CHECK(nonlinear_remainder(1e-9, 0.5, 2.5) == doctest::Approx(0.5 * 2.5 * 1.5 * std::pow(0.5, 0.5) * 1e-18).epsilon(1e-6));
}

TEST_CASE("B tangency exponent as q -> 0") {
  std::vector<double> qs, bs;
  for (double q : log_space(1e-6, 1e-2, 9)) {
    qs.push_back(q);
    bs.push_back(std::abs(eval_B(q, 1.0, 50.0, phi_mu1())));
  }
  CHECK(fit_loglog(qs, bs).slope >= 2.0 - 0.05);
}

TEST_CASE("2 s V(0, s) -> 1") {
  for (double s : {500.0, 5000.0}) CHECK(std::abs(2.0 * s * eval_V(0.0, s, phi_mu0()) - 1.0) < 0.1);
  const double e_lo = std::abs(2.0 * 50.0 * eval_V(0.0, 50.0, phi_mu0()) - 1.0);
  const double e_hi = std::abs(2.0 * 5000.0 * eval_V(0.0, 5000.0, phi_mu0()) - 1.0);
  CHECK(e_hi < e_lo);
}

TEST_CASE("far field of V approaches -p/(p-1) and improves with |y|/sqrt(s)") {
  const double s = 100.0;
  double prev = 1e9;
  for (double z : {6.0, 12.0, 24.0}) {
    const double d = std::abs(eval_V(z * std::sqrt(s), s, phi_mu0()) + 1.5);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("V + h2/(4s) is of higher order near the origin") {
  std::vector<double> S, E;
  for (double s : log_space(100.0, 1000.0, 6)) {
    double m = 0.0;
    for (double y = 0.0; y <= std::sqrt(s); y += 0.25) {
      m = std::max(m, std::abs(eval_V(y, s, phi_mu0()) + hermite_poly(2, y) / (4.0 * s)) / (1.0 + std::pow(y, 4)));
    }
    S.push_back(s);
    E.push_back(m);
  }
  CHECK(fit_loglog(S, E).slope <= -2.0 + 0.3);
}

TEST_CASE("R equals (phi/kappa) Q + G") {
  const auto& phi = phi_mu1();
  const double kappa = phi.params().kappa();
  for (double s : {20.0, 200.0}) {
    for (double y : {0.0, 1.5, 10.0, 60.0}) {
      const double lhs = eval_R(y, s, phi);
      const double rhs = phi.phi(s) / kappa * eval_Q(y, s, phi.params()) + eval_G(y, s, phi);
      CHECK(std::abs(lhs - rhs) < 1e-8);
    }
  }
}

TEST_CASE("mode 2 of Q decays like tau^-3 for h = 0") {
  const auto rule = QuadratureRule::gauss_hermite(200);
  const auto& pp = phi_mu0().params();
  std::vector<double> S, Q2;
  for (double s : log_space(50.0, 500.0, 8)) {
    const Grid g = Grid::symmetric(2.2 * 5.0 * std::sqrt(s), 0.05);
    const auto dec = decompose_function([&](double y) { return eval_Q(y, s, pp); }, g, s, 5.0, rule);
    S.push_back(s);
    Q2.push_back(dec.q2);
  }
  const double slope = fit_loglog(S, Q2).slope;
  CHECK(slope >= -3.3);
  CHECK(slope <= -2.7);
}

TEST_CASE("N is the plain difference in the log-bounded case") {
  const auto pp = ProblemParams::log_bounded(3.0, 1.5, 1.0);
  const auto fam = PerturbationFamily::for_params(pp);
  const auto phi = solve_phi_ode(pp, fam, 5.0, 500.0);
  const double s = 30.0, y = 2.0, q = 0.01;
  const double v = eval_varphi(y, s, phi).value;
  const double e = std::exp(s / 2.0);
  const double expected = std::exp(-1.5 * s) * (fam.eval(0, e * (v + q)) - fam.eval(0, e * v));
  CHECK(eval_N(q, y, s, phi) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("N / q^2 tends to the second-order Taylor term") {
  const auto& phi = phi_mu1();
  const double s = 40.0, y = 3.0;
  const double v = eval_varphi(y, s, phi).value;
  const double limit = 0.5 * phi.family().scaled(2, v, s);
  const double q = 1e-4;
  CHECK(std::abs(eval_N(q, y, s, phi) / (q * q) / limit - 1.0) < 0.05);
}

TEST_CASE("mode ODE residuals vanish on exact solutions") {
  std::vector<double> s, q0, q1, q2;
  const double c = 2e-3;
  for (int i = 0; i <= 100; ++i) {
    const double si = 20.0 + 0.05 * i;
    s.push_back(si);
    q0.push_back(c * std::exp(si - 20.0));
    q1.push_back(c * std::exp(0.5 * (si - 20.0)));
    q2.push_back(c / (si * si));
  }
  const auto r = mode_ode_residuals(s, q0, q1, q2);
  CHECK(!r.s.empty());
  for (std::size_t k = 0; k < r.s.size(); ++k) {
    CHECK(std::abs(r.residual[0][k]) <= 1e-6 * c * std::exp(r.s[k] - 20.0));
    CHECK(std::abs(r.residual[1][k]) <= 1e-6 * c * std::exp(r.s[k] - 20.0));
    CHECK(std::abs(r.residual[2][k]) <= 1e-6 * c);
  }
  const std::vector<double> few = {1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(mode_ode_residuals(few, few, few, few), InsufficientDataError);
}

TEST_CASE("sources bundle agrees with the individual evaluators") {
  const auto& phi = phi_mu1();
  const auto b = eval_sources(0.02, 1.5, 25.0, phi);
  CHECK(b.V == eval_V(1.5, 25.0, phi));
  CHECK(b.B == doctest::Approx(eval_B(0.02, 1.5, 25.0, phi)));
  CHECK(b.R == doctest::Approx(eval_R(1.5, 25.0, phi)));
  CHECK(b.N == doctest::Approx(eval_N(0.02, 1.5, 25.0, phi)));
}
