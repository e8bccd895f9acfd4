#include <cmath>
#include <ostream>

#include "blowup/fitting.hpp"
#include "blowup/hermite.hpp"
#include "blowup/kernels.hpp"
#include "blowup/profile.hpp"
#include "blowup/sources.hpp"
#include "lab/criteria.hpp"

namespace lab {

using namespace blowup;

CriterionResult criterion_spectral(const ExperimentConfig& cfg, const Artifacts& out) {
  CriterionResult r;
  const auto rule = QuadratureRule::gauss_hermite(cfg.numerics.quadrature_order);
  double off = 0.0, diag = 0.0;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= 6; ++i) {
    for (int j = 0; j <= 6; ++j) {
      const double v = inner_product_rho([i](double y) { return hermite_poly(i, y); },
                                         [j](double y) { return hermite_poly(j, y); }, rule, i + j);
      const double expected = i == j ? hermite_norm_sq(i) : 0.0;
      if (i == j) {
        diag = std::max(diag, std::abs(v - expected) / expected);
      } else {
        off = std::max(off, std::abs(v));
      }
      rows.push_back({double(i), double(j), v, expected});
    }
  }
  const auto h2 = [](double y) { return hermite_poly(2, y); };
  const double h2h2 = inner_product_rho(h2, h2, rule, 4);
  const double h2cube = inner_product_rho([](double y) { return std::pow(hermite_poly(2, y), 2); }, h2, rule, 6);
  r.checks.push_back(check_le("max_offdiagonal", off, 1e-10));
  r.checks.push_back(check_le("max_diagonal_rel_error", diag, 1e-10));
  r.checks.push_back(check_le("|<h2,h2> - 8|", std::abs(h2h2 - 8.0), 1e-8));
  r.checks.push_back(check_le("|<h2^2,h2> - 64|", std::abs(h2cube - 64.0), 1e-8));
  out.write("orthogonality.csv", [&](std::ostream& f, const CsvMeta& meta) {
    write_csv_header(f, {"i", "j", "value", "expected"}, meta);
    for (const auto& row : rows) write_csv_row(f, row);
  });
  return r;
}

CriterionResult criterion_semigroup(const ExperimentConfig& cfg, const Artifacts& out) {
  CriterionResult r;
  const auto rule = QuadratureRule::gauss_hermite(cfg.numerics.quadrature_order);
  double worst = 0.0;
  std::vector<std::vector<double>> rows;
  for (int m = 0; m <= 4; ++m) {
    for (double t : {0.5, 1.0, 2.0}) {
      double err = 0.0;
      for (double y : lin_space(-5.0, 5.0, 201)) {
        const double got = apply_semigroup(t, [m](double x) { return hermite_poly(m, x); }, y, rule);
        const double want = std::exp((1.0 - 0.5 * m) * t) * hermite_poly(m, y);
        err = std::max(err, std::abs(got - want));
      }
      worst = std::max(worst, err);
      rows.push_back({double(m), t, err});
    }
  }
  r.checks.push_back(check_le("sup_error_over_m_t_y", worst, 1e-6));
  out.write("semigroup.csv", [&](std::ostream& f, const CsvMeta& meta) {
    write_csv_header(f, {"m", "t", "sup_error"}, meta);
    for (const auto& row : rows) write_csv_row(f, row);
  });
  return r;
}

CriterionResult criterion_phi_ode(const ExperimentConfig&, const Artifacts& out) {
  CriterionResult r;
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const double a = pp.a();
  const double C0 = pp.mu() * std::pow((pp.p() - 1.0) / 2.0, a);
  const auto phi = solve_phi_ode(pp, 5.0, 1e6);
  auto scaled = [&](double s) { return std::pow(s, a) * phi.eta(s) / C0; };
  r.checks.push_back(check_le("|s^a eta(s)/C0 - 1| at s=1e4", std::abs(scaled(1e4) - 1.0), 0.05));

  std::vector<double> x, y, s_col;
  for (double s : log_space(1e3, 1e4, 41)) {
    s_col.push_back(s);
    x.push_back(1.0 / s);
    y.push_back(scaled(s));
  }
  const LineFit fit = fit_line(x, y);
  const double b1 = fit.slope;
  r.checks.push_back(check_le("|b1 - (-a)| / a", std::abs(b1 + a) / a, 0.2));
  r.notes.push_back("fitted b1 = " + format_double(b1) + " on s in [1e3, 1e4]; expansion of log(2 + z^2) at z = e^{s/(p-1)} phi gives -a(1 - log(p-1)) = " +
                    format_double(-a * (1.0 - std::log(pp.p() - 1.0))));
  out.write("phi_tail.csv", [&](std::ostream& f, const CsvMeta& meta) {
    CsvMeta m = meta;
    m.emplace_back("b1_fit", format_double(b1));
    write_csv_header(f, {"s", "eta", "scaled_eta"}, m);
    for (double s : log_space(10.0, 1e5, 81)) write_csv_row(f, std::vector<double>{s, phi.eta(s), scaled(s)});
  });
  if (out.enabled()) {
    out.write("phi_tail_decay.csv", [&](std::ostream& f, const CsvMeta& meta) {
      write_csv_header(f, {"s", "eta"}, meta);
      for (double s : log_space(10.0, 1e5, 81)) write_csv_row(f, std::vector<double>{s, phi.eta(s)});
    });
    out.plot("phi_tail_decay.csv", PlotKind::DecayLogLog, {-a, "s^{-a}", std::nullopt, "eta_a tail"});
  }
  return r;
}

CriterionResult criterion_potential(const ExperimentConfig&, const Artifacts& out) {
  CriterionResult r;
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const auto phi = solve_phi_ode(pp, 5.0, 1e4);
  const double s = 1e3;
  const double v0 = eval_V(0.0, s, phi);
  r.checks.push_back(check_le("|2 s V(0,s) - 1| at s=1e3", std::abs(2.0 * s * v0 - 1.0), 0.1));
  const double y_far = 8.0 * std::sqrt(s);
  const double target = -pp.p() / (pp.p() - 1.0);
  const double far = std::max(std::abs(eval_V(y_far, s, phi) - target), std::abs(eval_V(-y_far, s, phi) - target));
  r.checks.push_back(check_le("|V + p/(p-1)| at |y|=8 sqrt(s), s=1e3", far, 0.05));
  const double fz = eval_f(8.0, pp);
  r.notes.push_back("p f(8)^{p-1} = " + format_double(pp.p() * std::pow(fz, pp.p() - 1.0)) +
                    " is the leading part of V + p/(p-1) at z = 8");
  out.write("potential.csv", [&](std::ostream& f, const CsvMeta& meta) {
    CsvMeta m = meta;
    m.emplace_back("s", format_double(s));
    write_csv_header(f, {"y", "z", "V"}, m);
    for (double y : lin_space(0.0, 10.0 * std::sqrt(s), 201)) {
      write_csv_row(f, std::vector<double>{y, y / std::sqrt(s), eval_V(y, s, phi)});
    }
  });
  return r;
}

CriterionResult criterion_sources(const ExperimentConfig& cfg, const Artifacts& out) {
  CriterionResult r;
  const auto pp = ProblemParams::explicit_log(3.0, 1.0, 1.0);
  const auto phi = solve_phi_ode(pp, 5.0, 1e4);
  const auto rule = QuadratureRule::gauss_hermite(cfg.numerics.quadrature_order);
  const double K = cfg.numerics.K;
  const double dy = cfg.numerics.dy;
  const double nu = pp.nu();
  const double s_lo = 50.0, s_hi = 500.0;

  std::vector<double> S, R2, Re;
  for (double s : log_space(s_lo, s_hi, 11)) {
    const Grid g = Grid::symmetric(3.0 * K * std::sqrt(s), dy);
    const auto dec = decompose_function([&](double y) { return eval_R(y, s, phi); }, g, s, K, rule);
    S.push_back(s);
    R2.push_back(dec.q2);
    Re.push_back(dec.q_e.sup_norm());
  }
  const double r2_slope = fit_loglog(S, R2).slope;
  const double re_slope = fit_loglog(S, Re).slope;
  r.checks.push_back(check_le("slope |R_2| on [50,500]", r2_slope, -(2.0 + nu) + 0.3));
  r.checks.push_back(check_le("slope ||R_e|| on [50,500]", re_slope, -nu + 0.3));

  // B: sup over the cutoff region of |chi B(eps)| against eps.
  const auto eps = log_space(1e-6, 1e-2, 9);
  std::vector<double> bsup;
  {
    const double s = s_lo;
    const Grid g = Grid::symmetric(3.0 * K * std::sqrt(s), dy);
    for (double e : eps) {
      double m = 0.0;
      for (double y : g.nodes()) m = std::max(m, std::abs(cutoff_chi(y, s, K) * eval_B(e, y, s, phi)));
      bsup.push_back(m);
    }
  }
  const double b_exp = fit_loglog(eps, bsup).slope;
  r.checks.push_back(check_ge("B exponent in |q|", b_exp, pp.p_prime() - 0.05));

  // N: plane fit of log sup|N| against (log eps, log s).
  std::vector<double> lx, ls, ln;
  for (double s : log_space(s_lo, s_hi, 5)) {
    const Grid g = Grid::symmetric(2.0 * K * std::sqrt(s), dy);
    for (double e : eps) {
      double m = 0.0;
      for (double y : g.nodes()) m = std::max(m, std::abs(eval_N(e, y, s, phi)));
      lx.push_back(std::log(e));
      ls.push_back(std::log(s));
      ln.push_back(std::log(m));
    }
  }
  const PlaneFit nf = fit_plane(lx, ls, ln);
  r.checks.push_back(check_in("N exponent beta", nf.b1, pp.beta() - 0.3, pp.beta() + 0.3));
  r.checks.push_back(check_in("N exponent a", -nf.b2, pp.a() - 0.3, pp.a() + 0.3));

  out.write("source_decay.csv", [&](std::ostream& f, const CsvMeta& meta) {
    write_csv_header(f, {"s", "R2", "Re"}, meta);
    for (std::size_t i = 0; i < S.size(); ++i) write_csv_row(f, std::vector<double>{S[i], R2[i], Re[i]});
  });
  out.plot("source_decay.csv", PlotKind::DecayLogLog, {-(2.0 + nu), "s^{-(2+nu)}", std::nullopt, "R_2 and R_e"});
  out.write("source_slopes.csv", [&](std::ostream& f, const CsvMeta& meta) {
    std::vector<SlopeReport> rep = {
        {"R_2", s_lo, s_hi, r2_slope, -(2.0 + nu), r.checks[0].pass},
        {"R_e", s_lo, s_hi, re_slope, -nu, r.checks[1].pass},
        {"B_in_q", eps.front(), eps.back(), b_exp, pp.p_prime(), r.checks[2].pass},
        {"N_in_q", eps.front(), eps.back(), nf.b1, pp.beta(), r.checks[3].pass},
        {"N_in_s", s_lo, s_hi, nf.b2, -pp.a(), r.checks[4].pass},
    };
    write_slope_reports(f, rep, meta);
  });
  return r;
}

}  // namespace lab
