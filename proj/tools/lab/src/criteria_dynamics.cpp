#include <cmath>
#include <ostream>
#include <random>

#include "blowup/fitting.hpp"
#include "blowup/kernels.hpp"
#include "blowup/selfsim.hpp"
#include "blowup/shooting.hpp"
#include "lab/criteria.hpp"

namespace lab {

using namespace blowup;

namespace {

double sup_diff_on(const WeightedField& a, const WeightedField& b, double window) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    const double y = a.grid.y(i);
    if (std::abs(y) <= window) m = std::max(m, std::abs(a.values[i] - interpolate(b, y)));
  }
  return m;
}

double sup_on(const WeightedField& a, double window) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    if (std::abs(a.grid.y(i)) <= window) m = std::max(m, std::abs(a.values[i]));
  }
  return m;
}

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig c;
  c.dy = cfg.numerics.dy;
  c.K = cfg.numerics.K;
  c.A = cfg.numerics.A;
  c.record_every = cfg.numerics.record_every;
  c.quadrature_order = cfg.numerics.quadrature_order;
  return c;
}

}  // namespace

CriterionResult criterion_kernel(const ExperimentConfig& cfg, const Artifacts& out) {
  CriterionResult r;
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  const double sigma = cfg.kernel.sigma;
  const double s = sigma + cfg.kernel.lambda;
  const double K = cfg.numerics.K;
  const double dy = cfg.numerics.dy;
  const auto phi = solve_phi_ode(pp, 5.0, std::max(200.0, 2.0 * s));
  const auto rule = QuadratureRule::gauss_hermite(cfg.numerics.quadrature_order);
  const Grid grid = Grid::symmetric(3.0 * K * std::sqrt(s), dy);
  const double window = 2.0 * K * std::sqrt(s);

  // V = 0 against the Mehler formula.
  PropagationOptions free;
  free.include_potential = false;
  double worst_rel = 0.0;
  std::vector<std::vector<std::string>> mehler_rows;
  const std::vector<std::pair<std::string, RealFn>> data = {
      {"h0", [](double) { return 1.0; }},
      {"h1", [](double y) { return y; }},
      {"h2", [](double y) { return y * y - 2.0; }},
      {"gaussian", [](double y) { return std::exp(-y * y / 8.0); }},
  };
  for (const auto& [name, g] : data) {
    const auto theta = propagate_K(sigma, s, WeightedField::sample(grid, sigma, g), phi, free);
    const auto ref = WeightedField::sample(grid, s, [&](double y) { return apply_semigroup(s - sigma, g, y, rule); });
    const double rel = sup_diff_on(theta, ref, window) / sup_on(ref, window);
    worst_rel = std::max(worst_rel, rel);
    mehler_rows.push_back({name, format_double(rel)});
  }
  r.checks.push_back(check_le("V=0 propagation vs Mehler, relative", worst_rel, 1e-4));

  // Composition through an intermediate time against the single-propagation error.
  const double tau = sigma + 0.37 * (s - sigma);
  const auto psi = make_kernel_probe(KernelProbe::MinusBump, grid, sigma, K);
  const auto direct = propagate_K(sigma, s, psi, phi);
  const auto composed = propagate_K(tau, s, propagate_K(sigma, tau, psi, phi), phi);
  const Grid fine = Grid::symmetric(3.0 * K * std::sqrt(s), 0.5 * dy);
  const auto direct_fine = propagate_K(sigma, s, make_kernel_probe(KernelProbe::MinusBump, fine, sigma, K), phi);
  const double disc = sup_diff_on(direct, direct_fine, window);
  const double defect = sup_diff_on(composed, direct, window);
  r.checks.push_back(check_le("composition defect / discretization error", defect / disc, 2.0));
  r.notes.push_back("composition defect " + format_double(defect) + ", dy vs dy/2 difference " + format_double(disc));

  // Kernel envelopes.
  const std::vector<KernelProbe> probes = {KernelProbe::Mode0, KernelProbe::Mode1, KernelProbe::Mode2,
                                           KernelProbe::MinusBump, KernelProbe::TailBump};
  KernelCheckOptions ko;
  ko.K = K;
  ko.dy = dy;
  ko.samples = cfg.kernel.samples;
  ko.quadrature_order = cfg.numerics.quadrature_order;
  const auto reports = verify_kernel_bounds(sigma, cfg.kernel.lambda, probes, phi, ko);
  int failed = 0;
  for (const auto& rep : reports) failed += rep.pass ? 0 : 1;
  r.checks.push_back(check_le("kernel envelope violations over 5 probes", failed, 0));
  for (auto comp : {KernelComponent::Theta2, KernelComponent::ThetaMinus, KernelComponent::ThetaE}) {
    for (const auto& rep : reports) {
      if (rep.component == comp) {
        r.notes.push_back("fitted C for " + to_string(comp) + " = " + format_double(rep.fitted_C));
        break;
      }
    }
  }
  out.write("kernel_mehler.csv", [&](std::ostream& f, const CsvMeta& meta) {
    write_csv_header(f, {"probe", "relative_error"}, meta);
    for (const auto& row : mehler_rows) write_csv_row(f, row);
  });
  out.write("kernel_bounds.csv", [&](std::ostream& f, const CsvMeta& meta) { write_kernel_reports(f, reports, meta); });
  return r;
}

namespace {

struct RealShoot {
  ShootingResult result;
  TrajectoryRecord trajectory;
  double decay_exponent = 0.0;
};

RealShoot shoot_real(const ExperimentConfig& cfg, double mu, const Artifacts& out, const std::string& tag,
                     CriterionResult& r) {
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, mu);
  const double s0 = cfg.numerics.s0;
  const double s_end = s0 + cfg.numerics.horizon;
  const auto phi = solve_phi_ode(pp, 5.0, std::max(200.0, 2.0 * s_end));
  SolverConfig c = solver_config(cfg);
  c.scheme = cfg.numerics.shoot_scheme;
  const auto ssp = ShrinkingSetParams::from(pp, cfg.numerics.A, cfg.numerics.K);
  const auto ir = initial_rectangle(s0, ssp, phi, c);
  const SelfSimilarMap map(phi, s0, s_end + cfg.numerics.shoot_pad, c);
  ShootOptions so;
  so.jobs = cfg.run.jobs;
  RealShoot rs;
  rs.result = shoot(ir.rect, map, so);
  const int w0 = rs.result.history.empty() ? 0 : rs.result.history.front().winding;
  r.checks.push_back(check_in(tag + ": winding of the boundary of D", std::abs(w0), 1, 1));

  SolverConfig tc = c;
  tc.stop_on_exit = false;
  rs.trajectory = evolve(rs.result.d0, rs.result.d1, s0, s_end, phi, tc);
  r.checks.push_back(check_ge(tag + ": in V_A until", rs.trajectory.in_set_until(), s_end - 1e-9));
  std::vector<double> s, q;
  const double fit_from = s0 + 0.5 * cfg.numerics.horizon;
  for (const auto& smp : rs.trajectory.samples) {
    if (smp.s >= fit_from - 1e-9) {
      s.push_back(smp.s);
      q.push_back(smp.norms.q_sup);
    }
  }
  rs.decay_exponent = -fit_loglog(s, q).slope;
  r.checks.push_back(check_ge(tag + ": ||q||_inf decay exponent on the second half", rs.decay_exponent,
                              pp.varrho() - 0.3));
  r.notes.push_back(tag + ": d = (" + format_double(rs.result.d0) + ", " + format_double(rs.result.d1) +
                    "), termination " + to_string(rs.result.termination) + ", " +
                    std::to_string(rs.result.probes.size()) + " probes");

  out.write("shoot_" + tag + "_manifest.txt",
            [&](std::ostream& f, const CsvMeta& meta) { rs.result.write_manifest(f, meta); });
  out.write("shoot_" + tag + "_probes.csv",
            [&](std::ostream& f, const CsvMeta& meta) { rs.result.write_probes_csv(f, meta); });
  out.plot("shoot_" + tag + "_probes.csv", PlotKind::WindingMap);
  out.write("shoot_" + tag + "_trajectory.csv",
            [&](std::ostream& f, const CsvMeta& meta) { rs.trajectory.write_csv(f, meta); });
  out.plot("shoot_" + tag + "_trajectory.csv", PlotKind::TrajectoryModes);
  return rs;
}

}  // namespace

CriterionResult criterion_shooting(const ExperimentConfig& cfg, const Artifacts& out) {
  CriterionResult r;
  const double s0 = cfg.numerics.s0;
  {
    const auto pp = ProblemParams::explicit_log(3.0, 1.0, 0.0);
    const auto phi = solve_phi_ode(pp, 5.0, 200.0);
    SolverConfig c = solver_config(cfg);
    c.scheme = cfg.numerics.shoot_scheme;
    const auto ssp = ShrinkingSetParams::from(pp, cfg.numerics.A, cfg.numerics.K);
    const auto ir = initial_rectangle(s0, ssp, phi, c);
    // The seed places the analytic zero inside D.
    std::mt19937_64 rng(cfg.run.seed);
    std::uniform_real_distribution<double> jitter(-0.4, 0.4);
    const auto [c0, c1] = ir.rect.center();
    const double z0 = c0 + jitter(rng) * (ir.rect.d0_hi - ir.rect.d0_lo);
    const double z1 = c1 + jitter(rng) * (ir.rect.d1_hi - ir.rect.d1_lo);
    AffineModeMap m = ir.map;
    m.b0 = -(m.a00 * z0 + m.a01 * z1);
    m.b1 = -(m.a10 * z0 + m.a11 * z1);
    const LinearTestDouble dbl(m, s0, ssp, s0 + 1000.0);
    ShootOptions so;
    so.jobs = cfg.run.jobs;
    const auto res = shoot(ir.rect, dbl, so);
    const auto [zx, zy] = dbl.zero();
    const double err = std::hypot(res.d0 - zx, res.d1 - zy);
    int bad = 0;
    for (const auto& h : res.history) bad += std::abs(h.winding) == 1 ? 0 : 1;
    r.checks.push_back(check_le("double: |d - zero| / diam D", err / ir.rect.diameter(), 1e-8));
    r.checks.push_back(check_le("double: accepted rectangles with |winding| != 1", bad, 0));
    r.notes.push_back("double: termination " + to_string(res.termination) + " after " +
                      std::to_string(res.history.size()) + " levels");
    out.write("shoot_double_manifest.txt", [&](std::ostream& f, const CsvMeta& meta) { res.write_manifest(f, meta); });
  }
  shoot_real(cfg, 0.0, out, "mu0", r);
  shoot_real(cfg, 0.5, out, "mu0.5", r);
  return r;
}

}  // namespace lab
