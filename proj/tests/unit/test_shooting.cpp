#include <doctest.h>

#include <cmath>
#include <sstream>

#include "blowup/csv.hpp"
#include "blowup/membership.hpp"
#include "blowup/shooting.hpp"

using namespace blowup;

namespace {

const PhiSolution& phi0() {
  static const PhiSolution phi = solve_phi_ode(ProblemParams::explicit_log(3.0, 1.0, 0.0), 5.0, 200.0);
  return phi;
}

ShrinkingSetParams ssp20() { return ShrinkingSetParams::from(phi0().params(), 20.0, 5.0); }

AffineModeMap diagonal_map(double a0, double a1, double z0, double z1) {
  AffineModeMap m;
  m.a00 = a0;
  m.a11 = a1;
  m.b0 = -a0 * z0;
  m.b1 = -a1 * z1;
  return m;
}

}  // namespace

TEST_CASE("shrinking-set parameters are validated") {
  CHECK_THROWS(ShrinkingSetParams::from(phi0().params(), 1.0));
  const auto s = ssp20();
  CHECK(s.nu == doctest::Approx(0.5));
  CHECK(s.varrho == doctest::Approx(0.45));
}

TEST_CASE("membership of the zero field and of a mode-0 excess") {
  const auto ssp = ssp20();
  const double s = 20.0;
  NormReport zero;
  const auto r0 = check_VA(zero, s, ssp);
  CHECK(r0.in_set);
  for (double m : r0.margin) CHECK(m == 0.0);
  CHECK(r0.tightest == Constraint::None);

  NormReport out;
  out.q0 = 2.0 * ssp.A / std::pow(s, 1.0 + ssp.nu);
  const auto r1 = check_VA(out, s, ssp);
  CHECK_FALSE(r1.in_set);
  CHECK_FALSE(r1.satisfied(Constraint::Mode0));
  CHECK(r1.tightest == Constraint::Mode0);
  CHECK(r1.margin_of(Constraint::Mode0) == doctest::Approx(2.0));
}

TEST_CASE("extremal member has sup norm of order A^2 / s^varrho") {
  const auto ssp = ssp20();
  std::vector<double> C;
  for (double s : {20.0, 40.0, 80.0}) {
    const auto b = MembershipBounds::at(s, ssp);
    const Grid g = Grid::symmetric(2.2 * 5.0 * std::sqrt(s), 0.05);
    const auto q = WeightedField::sample(g, s, [&](double y) {
      const double chi = cutoff_chi(y, s, 5.0);
      return chi * (b.value[0] + b.value[1] * y + b.value[2] * (y * y - 2.0) +
                    0.5 * b.value[3] * (1.0 + std::pow(std::abs(y), 3)) * std::cos(y)) +
             (1.0 - chi) * b.value[4];
    });
    C.push_back(q.sup_norm() * std::pow(s, ssp.varrho) / (ssp.A * ssp.A));
  }
  // One constant serves every s.
  CHECK(C[1] <= 1.1 * C[0]);
  CHECK(C[2] <= 1.1 * C[0]);
}

TEST_CASE("mode map is affine and the rectangle scales like 1/s0") {
  SolverConfig c;
  double prev_a1 = 0.0, first_C = 0.0;
  for (double s0 : {20.0, 40.0, 80.0}) {
    const auto ir = initial_rectangle(s0, ssp20(), phi0(), c);
    CHECK(std::abs(ir.map.a01) < 1e-8 * std::abs(ir.map.a00));
    CHECK(std::abs(ir.map.a10) < 1e-8 * std::abs(ir.map.a11));
    const double C = std::max({std::abs(ir.rect.d0_lo), std::abs(ir.rect.d0_hi), std::abs(ir.rect.d1_lo),
                               std::abs(ir.rect.d1_hi)}) * s0;
    if (first_C == 0.0) first_C = C;
    CHECK(C <= 1.05 * first_C);
    const double a1 = ir.map.a11 * std::sqrt(s0);
    if (prev_a1 != 0.0) CHECK(std::abs(a1 / prev_a1 - 1.0) < 0.2);
    prev_a1 = a1;
    CHECK(std::abs(ir.map.a00) > 0.1);
  }
  const auto ir = initial_rectangle(20.0, ssp20(), phi0(), c);
  const auto [x0, y0] = ir.map.apply(0.001, 0.002);
  const auto [x1, y1] = ir.map.apply(0.001 + 1e-3, 0.002);
  CHECK(std::abs((x1 - x0) - 1e-3 * ir.map.a00) < 1e-8);
  CHECK(std::abs((y1 - y0) - 1e-3 * ir.map.a10) < 1e-8);
  const auto [d0, d1] = ir.map.solve(x0, y0);
  CHECK(d0 == doctest::Approx(0.001));
  CHECK(d1 == doctest::Approx(0.002));
}

TEST_CASE("rectangle geometry") {
  const Rectangle r{-1.0, 1.0, -2.0, 2.0};
  CHECK(r.diameter() == doctest::Approx(std::sqrt(20.0)));
  const auto q = r.split();
  for (const auto& c : q) CHECK(r.contains(c));
  CHECK(q[0].d0_hi == 0.0);
  CHECK(q[2].d1_lo == 0.0);
  const auto [x, y] = r.loop_point(1.5);
  CHECK(x == 1.0);
  CHECK(y == doctest::Approx(0.0));
  const auto [cx, cy] = clamp_to_unit_square(0.2, 0.1);
  CHECK(cx == doctest::Approx(1.0));
  CHECK(cy == doctest::Approx(0.5));
}

TEST_CASE("boundary of D exits at s0 with the normalized initial modes") {
  SolverConfig c;
  c.scheme = TimeScheme::ImexARS222;
  const double s0 = 20.0;
  const auto ir = initial_rectangle(s0, ssp20(), phi0(), c);
  const SelfSimilarMap map(phi0(), s0, s0 + 2.0, c);
  const auto smp = map_Phi(ir.rect.d0_hi, 0.5 * (ir.rect.d1_lo + ir.rect.d1_hi), map);
  CHECK(smp.exited);
  CHECK(smp.s_exit == doctest::Approx(s0));
  CHECK(std::max(std::abs(smp.x), std::abs(smp.y)) == doctest::Approx(1.0));
  CHECK(smp.x > 0.0);
}

TEST_CASE("linear double: closed-form exits, winding and shooting to the zero") {
  const double s0 = 20.0;
  const auto ssp = ssp20();
  const double z0 = 0.003, z1 = -0.001;
  const LinearTestDouble dbl(diagonal_map(0.9, 0.2, z0, z1), s0, ssp, s0 + 1000.0);
  CHECK(dbl.zero().first == doctest::Approx(z0));
  CHECK(dbl.zero().second == doctest::Approx(z1));
  PhiCache cache(dbl);

  const Rectangle around{-0.02, 0.02, -0.02, 0.02};
  CHECK(std::abs(winding_number(around, cache).winding) == 1);
  const Rectangle away{0.01, 0.015, 0.01, 0.015};
  CHECK(winding_number(away, cache).winding == 0);

  // Parent winding is the sum over the children.
  int sum = 0;
  for (const auto& child : around.split()) sum += winding_number(child, cache).winding;
  CHECK(sum == winding_number(around, cache).winding);

  const auto res = shoot(around, dbl);
  CHECK(std::hypot(res.d0 - z0, res.d1 - z1) <= 1e-8 * around.diameter());
  for (std::size_t k = 0; k < res.history.size(); ++k) {
    CHECK(std::abs(res.history[k].winding) == 1);
    if (k > 0) CHECK(res.history[k - 1].rect.contains(res.history[k].rect));
  }
  std::stringstream ss;
  res.write_probes_csv(ss);
  const auto t = read_csv(ss);
  for (const char* col : {"d0", "d1", "s_exit", "exit_constraint", "phi_x", "phi_y"}) CHECK(t.has_column(col));
}

TEST_CASE("Phi is continuous away from corners") {
  const double s0 = 20.0;
  const LinearTestDouble dbl(diagonal_map(0.9, 0.2, 0.0, 0.0), s0, ssp20(), s0 + 1000.0);
  const auto a = map_Phi(0.004, 0.001, dbl);
  const auto b = map_Phi(0.004 + 1e-6, 0.001, dbl);
  CHECK(std::hypot(a.x - b.x, a.y - b.y) < 1e-2);
}

TEST_CASE("parallel cache evaluation matches serial") {
  const double s0 = 20.0;
  const LinearTestDouble dbl(diagonal_map(0.9, 0.2, 0.001, 0.0), s0, ssp20(), s0 + 1000.0);
  PhiCache serial(dbl, 1), parallel(dbl, 4);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 16; ++i) pts.emplace_back(0.001 * i - 0.008, 0.0005 * i);
  const auto a = serial.get_many(pts);
  const auto b = parallel.get_many(pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
}
