#include "blowup/selfsim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "blowup/errors.hpp"

namespace blowup {

Grid SolverConfig::make_grid(double s_end) const {
  const double L = half_width > 0.0 ? half_width : 3.0 * K * std::sqrt(s_end);
  return Grid::symmetric(L, dy);
}

double SolverConfig::effective_dt(const Grid& grid) const {
  double want = dt;
  if (!(want > 0.0)) want = scheme == TimeScheme::ExplicitRK4 ? MolIntegrator::rk4_limit(grid) : 0.01;
  if (!(record_every > 0.0)) throw std::invalid_argument("record_every must be positive");
  const double n = std::ceil(record_every / want - 1e-9);
  return record_every / n;
}

double initial_data_value(double d0, double d1, double y, double s0, const PhiSolution& phi) {
  const ProblemParams& pp = phi.params();
  const double z = y / std::sqrt(s0);
  const double fp = std::pow(eval_f(z, pp), pp.p());
  return phi.phi(s0) / pp.kappa() * (fp * (d0 + d1 * z) - pp.kappa() / (2.0 * pp.p() * s0));
}

WeightedField make_initial_data(double d0, double d1, double s0, const PhiSolution& phi, const Grid& grid) {
  if (!phi.in_range(s0)) throw DomainError("s0 outside the phi table");
  const ProblemParams& pp = phi.params();
  const ProfileShape shape(pp);
  const double scale = phi.phi(s0) / pp.kappa();
  const double shift = pp.kappa() / (2.0 * pp.p() * s0);
  const double rs = std::sqrt(s0);
  return WeightedField::sample(grid, s0, [&](double y) {
    const double z = y / rs;
    return scale * (shape.values(z).f_pow_p * (d0 + d1 * z) - shift);
  });
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Horizon: return "horizon";
    case Termination::Exit: return "exit";
    case Termination::SolverBlowUp: return "solver_blowup";
  }
  return "unknown";
}

double TrajectoryRecord::in_set_until() const {
  if (exit.exited) return exit.s_exit;
  return samples.empty() ? s0 : samples.back().s;
}

SpectralDecomposition TrajectoryRecord::decomposition(std::size_t k) const {
  if (k >= fields.size()) throw std::out_of_range("trajectory did not store field " + std::to_string(k));
  return decompose(fields[k], config.K, QuadratureRule::gauss_hermite(config.quadrature_order));
}

void TrajectoryRecord::write_csv(std::ostream& out, const CsvMeta& meta) const {
  write_csv_header(out, {"s", "q0", "q1", "q2", "norm_qminus_weighted", "norm_qe", "norm_q", "norm_grad_q",
                         "in_VA", "exit_flag"},
                   meta);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& smp = samples[k];
    const bool last = k + 1 == samples.size();
    std::string flag = "none";
    if (last && exit.exited) flag = to_string(exit.constraint);
    if (last && termination == Termination::SolverBlowUp) flag = "solver_blowup";
    write_csv_row(out, {format_double(smp.s), format_double(smp.signed_q[0]), format_double(smp.signed_q[1]),
                        format_double(smp.signed_q[2]), format_double(smp.norms.qminus_weighted),
                        format_double(smp.norms.qe_sup), format_double(smp.norms.q_sup),
                        format_double(smp.grad_sup), smp.membership.in_set ? "1" : "0", flag});
  }
}

QStepper::QStepper(const Grid& grid, const PhiSolution& phi, TimeScheme scheme, double dt, SourceMask mask)
    : phi_(&phi),
      mask_(mask),
      cache_(grid, phi),
      mol_(grid, 1.0, BoundaryKind::Dirichlet, scheme, dt),
      fn_([this](std::span<const double> q, double s, std::span<double> out) { explicit_part(q, s, out); }) {}

void QStepper::explicit_part(std::span<const double> q, double s, std::span<double> out) {
  const ProfileSlice& sl = cache_.at(s);
  const SourceEvaluator& ev = cache_.evaluator();
  const bool use_N = mask_.N && !ev.h_zero();
  const std::size_t n = q.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = q[i];
    double r = 0.0;
    if (mask_.V) r += sl.V[i] * u;
    if (mask_.B) r += ev.B(u, sl.varphi[i]);
    if (mask_.R) r += sl.R[i];
    if (use_N) r += ev.N(u, sl.varphi[i], sl.H0[i], sl.H1.empty() ? 0.0 : sl.H1[i], s);
    out[i] = r;
  }
}

void QStepper::step(std::vector<double>& q, double s) { mol_.step(q, s, fn_); }

WeightedField step_q(const WeightedField& q, double dt, const PhiSolution& phi, SourceMask mask) {
  QStepper stepper(q.grid, phi, TimeScheme::ExplicitRK4, dt, mask);
  WeightedField out = q;
  stepper.step(out.values, q.s);
  out.s = q.s + dt;
  return out;
}

namespace {

double gradient_sup(const Grid& grid, std::span<const double> v) {
  double g = 0.0;
  const double inv = 1.0 / (2.0 * grid.spacing());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) g = std::max(g, std::abs(v[i + 1] - v[i - 1]) * inv);
  return g;
}

TrajectorySample make_sample(const ModeProjector& proj, std::span<const double> q, double s,
                             const ShrinkingSetParams& ssp) {
  TrajectorySample smp;
  smp.s = s;
  const auto modes = proj.project(q, s, ssp.K);
  smp.norms = proj.norms(q, s, ssp.K);
  for (int m = 0; m < 3; ++m) smp.signed_q[m] = modes[m];
  smp.grad_sup = gradient_sup(proj.grid(), q);
  smp.membership = check_VA(smp.norms, s, ssp);
  return smp;
}

}  // namespace

TrajectoryRecord evolve_field(const WeightedField& q0, double s_end, const PhiSolution& phi,
                              const SolverConfig& config) {
  const double s0 = q0.s;
  if (!(s_end > s0)) throw std::invalid_argument("evolve needs s_end > s0");
  if (!phi.in_range(s0) || !phi.in_range(s_end)) throw DomainError("evolve window outside the phi table");
  const Grid& grid = q0.grid;
  if (grid.half_width() < 2.0 * config.K * std::sqrt(s_end)) {
    throw DomainError("grid half-width must reach 2K sqrt(s_end)");
  }
  const ShrinkingSetParams ssp{config.A, phi.params().nu(), phi.params().varrho(), config.K};

  TrajectoryRecord rec;
  rec.s0 = s0;
  rec.s_end = s_end;
  rec.config = config;
  rec.grid = grid;
  rec.dt_used = config.effective_dt(grid);
  const double dt = rec.dt_used;
  const auto record_stride = static_cast<long>(std::llround(config.record_every / dt));
  const auto steps = static_cast<long>(std::ceil((s_end - s0) / dt - 1e-9));

  const ModeProjector proj(grid, QuadratureRule::gauss_hermite(config.quadrature_order));
  QStepper stepper(grid, phi, config.scheme, dt, config.sources);
  std::vector<double> q = q0.values;

  auto push = [&](const TrajectorySample& smp) {
    rec.samples.push_back(smp);
    if (config.store_fields) rec.fields.push_back(WeightedField{grid, q, smp.s});
  };

  TrajectorySample prev = make_sample(proj, q, s0, ssp);
  push(prev);
  {
    const auto& m = prev.membership;
    const double worst = m.tightest == Constraint::None ? 0.0 : m.margin_of(m.tightest);
    if (worst >= 1.0 - 1e-9) {
      rec.exit = {true, s0, m.tightest, prev.signed_q[0], prev.signed_q[1], true};
      if (config.stop_on_exit) {
        rec.termination = Termination::Exit;
        return rec;
      }
    }
  }

  for (long k = 0; k < steps; ++k) {
    const double s = s0 + dt * static_cast<double>(k);
    const double s_next = s0 + dt * static_cast<double>(k + 1);
    try {
      stepper.step(q, s);
    } catch (const SolverBlowUp& e) {
      rec.termination = Termination::SolverBlowUp;
      rec.blowup_message = e.what();
      return rec;
    }
    TrajectorySample cur = make_sample(proj, q, s_next, ssp);
    const bool newly_out = !cur.membership.in_set && !rec.exit.exited;
    if (newly_out) {
      const Constraint c = cur.membership.tightest;
      const double m0 = prev.membership.margin_of(c);
      const double m1 = cur.membership.margin_of(c);
      const double theta = m1 > m0 ? std::clamp((1.0 - m0) / (m1 - m0), 0.0, 1.0) : 1.0;
      rec.exit.exited = true;
      rec.exit.s_exit = s + theta * dt;
      rec.exit.constraint = c;
      rec.exit.q0 = prev.signed_q[0] + theta * (cur.signed_q[0] - prev.signed_q[0]);
      rec.exit.q1 = prev.signed_q[1] + theta * (cur.signed_q[1] - prev.signed_q[1]);
    }
    const bool last = k + 1 == steps;
    if ((k + 1) % record_stride == 0 || last || (newly_out && config.stop_on_exit)) push(cur);
    if (newly_out && config.stop_on_exit) {
      rec.termination = Termination::Exit;
      return rec;
    }
    prev = cur;
  }
  rec.termination = rec.exit.exited ? Termination::Exit : Termination::Horizon;
  return rec;
}

TrajectoryRecord evolve(double d0, double d1, double s0, double s_end, const PhiSolution& phi,
                        const SolverConfig& config) {
  const Grid grid = config.make_grid(s_end);
  TrajectoryRecord rec = evolve_field(make_initial_data(d0, d1, s0, phi, grid), s_end, phi, config);
  rec.d0 = d0;
  rec.d1 = d1;
  return rec;
}

WTrajectory evolve_w(const WeightedField& w0, double s_end, const PhiSolution& phi, const SolverConfig& config) {
  const double s0 = w0.s;
  if (!(s_end > s0)) throw std::invalid_argument("evolve_w needs s_end > s0");
  const ProblemParams& pp = phi.params();
  const double p = pp.p();
  const PerturbationFamily& fam = phi.family();
  const bool h_zero = fam.identically_zero();
  const Power pow_pm1(p - 1.0);

  WTrajectory out;
  out.grid = w0.grid;
  out.dt_used = config.effective_dt(w0.grid);
  const double dt = out.dt_used;
  const auto record_stride = static_cast<long>(std::llround(config.record_every / dt));
  const auto steps = static_cast<long>(std::ceil((s_end - s0) / dt - 1e-9));

  MolIntegrator mol(w0.grid, -1.0 / (p - 1.0), BoundaryKind::Outflow, config.scheme, dt);
  const MolIntegrator::Explicit fn = [&](std::span<const double> w, double s, std::span<double> r) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double v = w[i];
      double val = pow_pm1(std::abs(v)) * v;
      if (!h_zero) val += fam.scaled(0, v, s);
      r[i] = val;
    }
  };
  std::vector<double> w = w0.values;
  out.s.push_back(s0);
  out.fields.push_back(w0);
  for (long k = 0; k < steps; ++k) {
    const double s = s0 + dt * static_cast<double>(k);
    mol.step(w, s, fn);
    if ((k + 1) % record_stride == 0 || k + 1 == steps) {
      const double sn = s0 + dt * static_cast<double>(k + 1);
      out.s.push_back(sn);
      out.fields.push_back(WeightedField{w0.grid, w, sn});
    }
  }
  return out;
}

ModeResidualSeries mode_ode_residuals(const TrajectoryRecord& traj) {
  std::vector<double> s, q0, q1, q2;
  const double stride = traj.config.record_every;
  for (const auto& smp : traj.samples) {
    // Only the uniformly spaced samples; an exit sample may fall between them.
    const double k = (smp.s - traj.s0) / stride;
    if (std::abs(k - std::round(k)) > 1e-6) continue;
    s.push_back(smp.s);
    q0.push_back(smp.signed_q[0]);
    q1.push_back(smp.signed_q[1]);
    q2.push_back(smp.signed_q[2]);
  }
  return mode_ode_residuals(s, q0, q1, q2);
}

}  // namespace blowup
