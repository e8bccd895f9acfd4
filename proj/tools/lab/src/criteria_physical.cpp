#include <cmath>
#include <ostream>

#include "blowup/fitting.hpp"
#include "blowup/physical.hpp"
#include "blowup/selfsim.hpp"
#include "blowup/shooting.hpp"
#include "lab/criteria.hpp"

namespace lab {

using namespace blowup;

namespace {

const ProblemParams& physical_params() {
  static const ProblemParams pp = ProblemParams::explicit_log(3.0, 1.0, 0.0);
  return pp;
}

/// (d0, d1) located by shooting at s0 = log_T, so the physical data is the constructed one.
std::pair<double, double> constructed_data(const ExperimentConfig& cfg, const PhiSolution& phi) {
  const double s0 = cfg.physical.log_T;
  SolverConfig c;
  c.dy = cfg.numerics.dy;
  c.K = cfg.numerics.K;
  c.A = cfg.physical.shoot_A;
  c.quadrature_order = cfg.numerics.quadrature_order;
  c.scheme = cfg.numerics.shoot_scheme;
  const auto ssp = ShrinkingSetParams::from(phi.params(), cfg.physical.shoot_A, cfg.numerics.K);
  const auto ir = initial_rectangle(s0, ssp, phi, c);
  const SelfSimilarMap map(phi, s0, s0 + cfg.numerics.horizon, c);
  ShootOptions so;
  so.jobs = cfg.run.jobs;
  const auto res = shoot(ir.rect, map, so);
  return {res.d0, res.d1};
}

PhysicalMesh physical_mesh(const ExperimentConfig& cfg, double refine = 1.0) {
  return PhysicalMesh::graded(cfg.physical.half_width, cfg.physical.mesh_a, cfg.physical.mesh_dxi / refine);
}

PhysicalConfig physical_config(const ExperimentConfig& cfg, double refine = 1.0) {
  PhysicalConfig c;
  c.c_dt = cfg.physical.c_dt / refine;
  c.amplification_cap = cfg.physical.amplification_cap;
  return c;
}

double tau_of(const BlowupEstimate& T, const CompensatedTime& t) { return T.delta - t.minus(T.t_ref); }

}  // namespace

CriterionResult criterion_physical(const ExperimentConfig& cfg, const Artifacts& out) {
  CriterionResult r;

  {
    const auto p2 = ProblemParams::explicit_log(2.0, 1.0, 0.0);
    const auto mesh = PhysicalMesh::uniform(1.0, 0.1);
    PhysicalConfig c = physical_config(cfg);
    const auto run = evolve_physical(std::vector<double>(mesh.size(), 1.0), mesh, p2,
                                     PerturbationFamily::for_params(p2), c);
    const auto e = estimate_T(run);
    r.checks.push_back(check_le("flat data p=2: |T_est - 1|", std::abs(e.T - flat_blowup_time(1.0, 2.0)), 1e-3));
  }

  const ProblemParams& pp = physical_params();
  const auto fam = PerturbationFamily::for_params(pp);
  const auto phi = solve_phi_ode(pp, 5.0, 200.0);
  const double p = pp.p();
  const double T = std::exp(-cfg.physical.log_T);
  const auto [d0, d1] = constructed_data(cfg, phi);
  const auto mesh = physical_mesh(cfg);
  const auto u0 = build_constructed_u0(d0, d1, T, phi, mesh);
  PhysicalConfig c = physical_config(cfg);
  c.probe_x = {1e-2, 1e-3, 1e-4};
  const auto first = evolve_physical(u0, mesh, pp, fam, c);
  const auto T1 = estimate_T(first);
  for (double x0 : c.probe_x) c.snapshot_times.push_back(solve_t_of_x0(x0, T1.T, cfg.physical.K0).t);
  const auto run = evolve_physical(u0, mesh, pp, fam, c);
  const auto Test = estimate_T(run);
  r.notes.push_back("constructed data d = (" + format_double(d0) + ", " + format_double(d1) + "), T_est/T - 1 = " +
                    format_double(Test.T / T - 1.0) + ", fit residual " + format_double(Test.relative_residual));

  // (T - t)^{1/(p-1)} u(0, t) against kappa over the last decade.
  const double last = run.samples.back().max_u;
  double scaling = 0.0;
  for (const auto& smp : run.samples) {
    if (smp.max_u * 10.0 < last) continue;
    const double tau = tau_of(Test, smp.t);
    if (tau <= 0.0) continue;
    scaling = std::max(scaling, std::abs(std::pow(tau, 1.0 / (p - 1.0)) * smp.u_at_0 / pp.kappa() - 1.0));
  }
  r.checks.push_back(check_le("|(T-t)^{1/(p-1)} u(0,t)/kappa - 1| over the last decade", scaling, 0.05));

  const auto profile = check_intermediate_profile(run, Test, pp);
  double e_at_1e5 = std::nan("");
  int rises = 0;
  for (std::size_t i = 0; i < profile.samples.size(); ++i) {
    if (std::isnan(e_at_1e5) && profile.samples[i].amplification >= 1e5 * (1.0 - 1e-9)) e_at_1e5 = profile.samples[i].e0;
    if (i > 0 && profile.samples[i].e0 > profile.samples[i - 1].e0) ++rises;
  }
  r.checks.push_back(check_ge("intermediate profile: fitted decay exponent of e0 in |log(T-t)|",
                              profile.fitted_exponent, pp.varrho() - 0.3));
  r.checks.push_back(check_le("intermediate profile: e0 at amplification 1e5", e_at_1e5, 0.1));
  r.notes.push_back("e0 rises between consecutive snapshots " + std::to_string(rises) + " times out of " +
                    std::to_string(profile.samples.size() - 1));

  const auto fp = extract_final_profile(run, Test, pp, {1e-3, 1e-2, 21, cfg.physical.K0, 0.5, 0.9});
  double ratio_dev = 0.0;
  for (const auto& pt : fp.points) ratio_dev = std::max(ratio_dev, std::abs(pt.ratio - 1.0));
  r.checks.push_back(check_le("final profile: max |u*/theory - 1| on 1e-3 <= |x| <= 1e-2", ratio_dev, 0.25));
  if (fp.extrapolation_warning) r.notes.push_back("final profile extrapolation warning: drift above 1%");
  for (const auto& v : fp.v_checks) {
    r.notes.push_back("v-transform x0=" + format_double(v.x0) + ": start " + format_double(v.eps_start) + ", track " +
                      format_double(v.eps_track));
  }

  out.write("physical_run.csv", [&](std::ostream& f, const CsvMeta& meta) { run.write_csv(f, meta); });
  out.write("profile_errors.csv", [&](std::ostream& f, const CsvMeta& meta) {
    write_csv_header(f, {"t", "tau", "amplification", "e0", "e1"}, meta);
    for (const auto& e : profile.samples) write_csv_row(f, std::vector<double>{e.t, e.tau, e.amplification, e.e0, e.e1});
  });
  out.write("final_profile.csv", [&](std::ostream& f, const CsvMeta& meta) { fp.write_csv(f, meta); });
  out.write("v_transform.csv", [&](std::ostream& f, const CsvMeta& meta) {
    write_csv_header(f, {"x0", "t_x0", "eps_start", "eps_track", "tau_max"}, meta);
    for (const auto& v : fp.v_checks) write_csv_row(f, std::vector<double>{v.x0, v.t_x0, v.eps_start, v.eps_track, v.tau_max});
  });
  out.write("profile_snapshots.csv", [&](std::ostream& f, const CsvMeta& meta) {
    CsvMeta m = meta;
    m.emplace_back("p", format_double(p));
    write_csv_header(f, {"t", "z", "value"}, m);
    std::size_t next = 0;
    for (int decade = 1; decade <= 6; ++decade) {
      while (next < run.snapshots.size() &&
             (run.snapshots[next].requested || run.snapshots[next].amplification < std::pow(10.0, decade) * (1.0 - 1e-9)))
        ++next;
      if (next == run.snapshots.size()) break;
      const Snapshot& snap = run.snapshots[next];
      const double tau = tau_of(Test, snap.t);
      if (tau <= 0.0 || tau >= std::exp(-1.0)) continue;
      const double L = -std::log(tau);
      for (double z : lin_space(-3.0, 3.0, 121)) {
        const double x = z * std::sqrt(L * tau);
        if (std::abs(x) > mesh.half_width()) continue;
        write_csv_row(f, std::vector<double>{snap.t.value(), z,
                                             std::pow(tau, 1.0 / (p - 1.0)) * mesh.interpolate(snap.u, x)});
      }
    }
  });
  out.plot("profile_snapshots.csv", PlotKind::ProfileOverlay);
  return r;
}

CriterionResult criterion_cross_solver(const ExperimentConfig& cfg, const Artifacts& out) {
  CriterionResult r;
  const ProblemParams& pp = physical_params();
  const auto phi = solve_phi_ode(pp, 5.0, 200.0);
  const double p = pp.p();
  const double K = cfg.numerics.K;
  std::vector<std::vector<std::string>> rows;

  // w against varphi + q over [s0, s0 + 2].
  {
    const double s0 = cfg.numerics.s0, s1 = s0 + 2.0;
    const double d0 = 0.2 / s0, d1 = 0.1 / s0;
    struct Pair {
      TrajectoryRecord q;
      WTrajectory w;
    };
    auto run = [&](double dy) {
      SolverConfig c;
      c.dy = dy;
      c.K = K;
      c.A = cfg.numerics.A;
      c.quadrature_order = cfg.numerics.quadrature_order;
      c.stop_on_exit = false;
      c.store_fields = true;
      c.record_every = 0.5;
      c.half_width = 3.0 * K * std::sqrt(s1);
      const Grid g = c.make_grid(s1);
      Pair pr{evolve(d0, d1, s0, s1, phi, c), {}};
      WeightedField w0 = make_initial_data(d0, d1, s0, phi, g);
      for (std::size_t i = 0; i < g.size(); ++i) w0.values[i] += eval_varphi(g.y(i), s0, phi).value;
      w0.s = s0;
      pr.w = evolve_w(w0, s1, phi, c);
      return pr;
    };
    const Pair coarse = run(cfg.numerics.dy);
    const Pair fine = run(0.5 * cfg.numerics.dy);
    double diff = 0.0, tol = 0.0;
    for (std::size_t k = 0; k < coarse.w.fields.size() && k < coarse.q.fields.size(); ++k) {
      const double s = coarse.w.s[k];
      const double window = 2.0 * K * std::sqrt(s);
      const auto& fw = coarse.w.fields[k];
      const auto& fq = coarse.q.fields[k];
      double dk = 0.0, eq = 0.0, ew = 0.0;
      for (std::size_t i = 0; i < fw.grid.size(); ++i) {
        const double y = fw.grid.y(i);
        if (std::abs(y) > window) continue;
        dk = std::max(dk, std::abs(fw.values[i] - eval_varphi(y, s, phi).value - fq.values[i]));
        eq = std::max(eq, std::abs(fq.values[i] - interpolate(fine.q.fields[k], y)));
        ew = std::max(ew, std::abs(fw.values[i] - interpolate(fine.w.fields[k], y)));
      }
      diff = std::max(diff, dk);
      tol = std::max(tol, eq + ew);
      rows.push_back({"w_vs_varphi_plus_q", format_double(s), format_double(dk), format_double(eq + ew)});
    }
    r.checks.push_back(check_le("||w - (varphi + q)|| / discretization tolerance", diff / tol, 3.0));
    r.notes.push_back("w vs varphi + q: difference " + format_double(diff) + ", tolerance " + format_double(tol));
  }

  // Physical run mapped to similarity variables against evolve_w.
  {
    const double s0 = cfg.physical.log_T, s1 = s0 + 2.0;
    const double T = std::exp(-s0);
    const auto fam = PerturbationFamily::for_params(pp);
    const auto [d0, d1] = constructed_data(cfg, phi);
    const std::vector<double> s_cmp = {s0 + 0.5, s0 + 1.0, s0 + 1.5, s1};
    auto physical = [&](double refine) {
      const auto mesh = physical_mesh(cfg, refine);
      PhysicalConfig c = physical_config(cfg, refine);
      for (double s : s_cmp) c.snapshot_times.push_back(T - std::exp(-s));
      return evolve_physical(build_constructed_u0(d0, d1, T, phi, mesh), mesh, pp, fam, c);
    };
    auto similarity = [&](double dy) {
      SolverConfig c;
      c.dy = dy;
      c.K = K;
      c.record_every = 0.5;
      c.half_width = 3.0 * K * std::sqrt(s1);
      const Grid g = c.make_grid(s1);
      const auto w0 = WeightedField::sample(g, s0, [&](double y) {
        return std::pow(T, 1.0 / (p - 1.0)) * build_u0_value(d0, d1, y * std::sqrt(T), T, phi);
      });
      return evolve_w(w0, s1, phi, c);
    };
    const auto pa = physical(1.0);
    const auto pb = physical(2.0);
    const auto wa = similarity(cfg.numerics.dy);
    const auto wb = similarity(0.5 * cfg.numerics.dy);
    auto w_of = [&](const PhysicalRun& run, double s, double y) {
      const Snapshot* snap = run.snapshot_at(T - std::exp(-s));
      return std::exp(-s / (p - 1.0)) * run.mesh.interpolate(snap->u, y * std::exp(-s / 2.0));
    };
    double diff = 0.0, tol = 0.0;
    for (std::size_t k = 1; k < wa.s.size(); ++k) {
      const double s = wa.s[k];
      const double window = 2.0 * K * std::sqrt(s);
      double dk = 0.0, ep = 0.0, ew = 0.0;
      for (std::size_t i = 0; i < wa.grid.size(); ++i) {
        const double y = wa.grid.y(i);
        if (std::abs(y) > window) continue;
        const double a = w_of(pa, s, y);
        dk = std::max(dk, std::abs(wa.fields[k].values[i] - a));
        ep = std::max(ep, std::abs(a - w_of(pb, s, y)));
        ew = std::max(ew, std::abs(wa.fields[k].values[i] - interpolate(wb.fields[k], y)));
      }
      diff = std::max(diff, dk);
      tol = std::max(tol, ep + ew);
      rows.push_back({"physical_round_trip", format_double(s), format_double(dk), format_double(ep + ew)});
    }
    r.checks.push_back(check_le("round trip: ||w_phys - w|| / discretization tolerance", diff / tol, 3.0));
    r.notes.push_back("round trip: difference " + format_double(diff) + ", tolerance " + format_double(tol));
  }
  out.write("cross_solver.csv", [&](std::ostream& f, const CsvMeta& meta) {
    write_csv_header(f, {"comparison", "s", "difference", "tolerance"}, meta);
    for (const auto& row : rows) write_csv_row(f, row);
  });
  return r;
}

}  // namespace lab
