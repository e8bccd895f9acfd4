#include <doctest.h>

#include <cmath>
#include <sstream>

#include "blowup/csv.hpp"
#include "blowup/errors.hpp"
#include "blowup/params.hpp"
#include "blowup/perturbation.hpp"
#include "blowup/profile.hpp"

using namespace blowup;

TEST_CASE("kappa^{p-1} (p-1) = 1 and derived constants") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const auto pp = ProblemParams::explicit_log(p, 1.0, 0.0);
    CHECK(std::abs(std::pow(pp.kappa(), p - 1.0) * (p - 1.0) - 1.0) < 1e-12);
    CHECK(pp.c_p() == doctest::Approx((p - 1.0) / (4.0 * p)));
    CHECK(pp.p_prime() == std::min(p, 2.0));
  }
  const auto lb = ProblemParams::log_bounded(3.0, 1.3, 1.0);
  CHECK(lb.nu() == doctest::Approx(0.3));
  CHECK(lb.iota() == 0.0);
  CHECK(lb.beta() == 1.0);
  CHECK(lb.a_bar() == doctest::Approx(0.3));
  const auto el = ProblemParams::explicit_log(3.0, 2.0, 1.0);
  CHECK(el.nu() == 0.5);
  CHECK(el.iota() == 1.0);
  CHECK(el.beta() == 2.0);
  CHECK(el.varrho() > 0.0);
  CHECK(el.varrho() < el.nu());
}

TEST_CASE("parameter validation") {
  CHECK_THROWS(ProblemParams::explicit_log(1.0, 1.0, 0.0));
  CHECK_THROWS(ProblemParams::explicit_log(3.0, 0.0, 0.0));
  CHECK_THROWS(ProblemParams::log_bounded(3.0, 1.0, 1.0));
  CHECK_THROWS(ProblemParams::explicit_log(3.0, 1.0, 0.0, 0.6));
  CHECK_NOTHROW(ProblemParams::log_bounded(3.0, 1.5, 1.0));
}

TEST_CASE("eval_f examples") {
  const auto p2 = ProblemParams::explicit_log(2.0, 1.0, 0.0);
  const auto p3 = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  CHECK(eval_f(0.0, p3) == doctest::Approx(p3.kappa()).epsilon(1e-15));
  CHECK(eval_f(1.0, p2) == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(eval_f(std::sqrt(8.0), p2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eval_f(1.3, p3) == eval_f(-1.3, p3));
  CHECK(eval_f(2.0, p3) < eval_f(1.0, p3));
}

TEST_CASE("f^{p-1} (1 + c_p z^2) = kappa^{p-1}") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const auto pp = ProblemParams::explicit_log(p, 1.0, 0.0);
    for (double z = -10.0; z <= 10.0; z += 0.25) {
      const double lhs = std::pow(eval_f(z, pp), p - 1.0) * (1.0 + pp.c_p() * z * z);
      CHECK(std::abs(lhs - std::pow(pp.kappa(), p - 1.0)) < 1e-12);
    }
  }
}

TEST_CASE("eval_f_deriv examples") {
  const auto p2 = ProblemParams::explicit_log(2.0, 1.0, 0.0);
  const auto p3 = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  CHECK(eval_f_deriv(0.0, p3) == 0.0);
  CHECK(eval_f_deriv(1.0, p2) == doctest::Approx(-16.0 / 81.0).epsilon(1e-14));
  const double h = 1e-5;
  const double fd = (eval_f(0.5 + h, p3) - eval_f(0.5 - h, p3)) / (2.0 * h);
  CHECK(std::abs(fd - eval_f_deriv(0.5, p3)) < 1e-8);
  const double fd2 = (eval_f_deriv(0.5 + h, p3) - eval_f_deriv(0.5 - h, p3)) / (2.0 * h);
  CHECK(std::abs(fd2 - eval_f_second(0.5, p3)) < 1e-8);
}

TEST_CASE("eval_h examples and symmetry") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const auto fam = PerturbationFamily::for_params(pp);
  CHECK(eval_h(0, 0.0, fam) == 0.0);
  CHECK(eval_h(0, 1.0, fam) == doctest::Approx(1.0 / std::log(3.0)).epsilon(1e-14));
  for (double z : {0.3, 1.7, 12.0}) CHECK(eval_h(0, -z, fam) == doctest::Approx(-eval_h(0, z, fam)));
}

TEST_CASE("analytic derivatives of h match finite differences") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const auto fam = PerturbationFamily::for_params(pp);
  const double h = 1e-5;
  for (double z = -10.0; z <= 10.0; z += 0.5) {
    for (int j = 0; j < 2; ++j) {
      const double fd = (eval_h(j, z + h, fam) - eval_h(j, z - h, fam)) / (2.0 * h);
      CHECK(std::abs(fd - eval_h(j + 1, z, fam)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("log-bounded reference satisfies its bound and rejects j = 2 for custom h") {
  const auto pp = ProblemParams::log_bounded(3.0, 1.5, 2.0);
  const auto fam = PerturbationFamily::for_params(pp);
  for (double z = -50.0; z <= 50.0; z += 0.37) {
    for (int j = 0; j <= 1; ++j) {
      const double bound = pp.M() * (std::pow(std::abs(z), 3.0 - j) / std::pow(std::log(2.0 + z * z), 1.5) + 1.0);
      CHECK(std::abs(eval_h(j, z, fam)) <= bound);
    }
  }
  const auto custom = PerturbationFamily::custom(3.0, [](double z) { return z; }, [](double) { return 1.0; });
  CHECK_THROWS(eval_h(2, 1.0, custom));
}

TEST_CASE("rescaled h bound over s in [1e2, 1e6]") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const auto fam = PerturbationFamily::for_params(pp);
  double C = 0.0;
  for (double s = 1e2; s <= 1e6; s *= 1.5) {
    for (double w : {0.1, 1.0, 3.0}) {
      for (int j = 0; j <= 2; ++j) {
        C = std::max(C, std::abs(fam.scaled(j, w, s)) * std::pow(s, 1.0) / (std::pow(w, 3.0 - j) + 1.0));
      }
    }
  }
  CHECK(std::isfinite(C));
  CHECK(C < 10.0);
  CHECK(std::abs(fam.scaled(0, 1.0, 100.0)) <= C * 1e-2 * 2.0);
}

TEST_CASE("phi ODE with h = 0 is the fixed point") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  const auto phi = solve_phi_ode(pp, 5.0, 1e3);
  for (double s : {5.0, 10.0, 100.0, 999.0}) CHECK(phi.phi(s) == doctest::Approx(pp.kappa()).epsilon(1e-14));
}

TEST_CASE("phi ODE tail: s eta(s) -> C0 and residual is small") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const auto phi = solve_phi_ode(pp, 5.0, 1e5);
  CHECK(std::abs(1e4 * phi.eta(1e4) - 1.0) < 0.05);
  for (double s : {6.0, 20.0, 300.0, 5000.0}) {
    const double phi_v = phi.phi(s);
    CHECK(phi_v > 0.0);
    CHECK(phi.phi_from_eta(phi.eta(s)) == doctest::Approx(phi_v).epsilon(1e-15));
    const double h = 1e-4 * s;
    const double fd = (phi.phi(s + h) - phi.phi(s - h)) / (2.0 * h);
    CHECK(std::abs(fd - phi.ode_rhs(s, phi_v)) < 1e-6);
  }
  CHECK_THROWS_AS(phi.phi(2.0), DomainError);
}

TEST_CASE("phi backward integration is step converged") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  PhiOdeOptions fine;
  fine.max_step = 0.025;
  fine.points_per_decade = 4000;
  const auto a = solve_phi_ode(pp, 5.0, 1e4);
  const auto b = solve_phi_ode(pp, 5.0, 1e4, fine);
  CHECK(std::abs(a.phi(5.0) - b.phi(5.0)) < 1e-8);
}

TEST_CASE("phi table CSV has the documented columns") {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const auto phi = solve_phi_ode(pp, 5.0, 100.0);
  std::stringstream ss;
  phi.write_csv(ss);
  const auto table = read_csv(ss);
  for (const char* c : {"s", "phi", "eta_a", "phi_prime"}) CHECK(table.has_column(c));
}

TEST_CASE("eval_varphi identities and derivatives") {
  const auto p0 = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  const auto phi0 = solve_phi_ode(p0, 5.0, 200.0);
  const double s = 50.0;
  CHECK(eval_varphi(1.0, s, phi0).value ==
        doctest::Approx(eval_f(1.0 / std::sqrt(s), p0) + p0.kappa() / (2.0 * 3.0 * s)).epsilon(1e-14));
  const double h = 1e-4;
  const double fd_s = (eval_varphi(1.0, s + h, phi0).value - eval_varphi(1.0, s - h, phi0).value) / (2.0 * h);
  CHECK(std::abs(fd_s - eval_varphi(1.0, s, phi0).ds) < 1e-6);

  const auto p1 = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const auto phi1 = solve_phi_ode(p1, 5.0, 200.0);
  CHECK(eval_varphi(0.0, 30.0, phi1).value ==
        doctest::Approx(phi1.phi(30.0) * (1.0 + 1.0 / (6.0 * 30.0))).epsilon(1e-14));
  const auto v = eval_varphi(2.0, 30.0, phi1);
  const double fd_y = (eval_varphi(2.0 + h, 30.0, phi1).value - eval_varphi(2.0 - h, 30.0, phi1).value) / (2.0 * h);
  const double fd_yy = (eval_varphi(2.0 + h, 30.0, phi1).value - 2.0 * v.value +
                        eval_varphi(2.0 - h, 30.0, phi1).value) / (h * h);
  CHECK(std::abs(fd_y - v.dy) < 1e-8);
  CHECK(std::abs(fd_yy - v.dyy) < 1e-5);
  CHECK_THROWS_AS(eval_varphi(0.0, 300.0, phi1), DomainError);
}
