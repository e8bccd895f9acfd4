#include "blowup/physical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "blowup/errors.hpp"
#include "blowup/fitting.hpp"

namespace blowup {

PhysicalMesh PhysicalMesh::graded(double half_width, double a, double dxi) {
  if (!(half_width > 0.0 && a > 0.0 && dxi > 0.0)) throw std::invalid_argument("graded mesh needs positive L, a, dxi");
  const double Xi = std::asinh(half_width / a);
  const auto n = static_cast<std::size_t>(std::ceil(Xi / dxi));
  const double step = Xi / static_cast<double>(n);
  PhysicalMesh m;
  m.x_.assign(2 * n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double v = k == n ? half_width : a * std::sinh(step * static_cast<double>(k));
    m.x_[n + k] = v;
    m.x_[n - k] = -v;
  }
  return m;
}

PhysicalMesh PhysicalMesh::uniform(double half_width, double dx) {
  if (!(half_width > 0.0 && dx > 0.0)) throw std::invalid_argument("uniform mesh needs positive L, dx");
  const auto n = static_cast<std::size_t>(std::ceil(half_width / dx));
  const double h = half_width / static_cast<double>(n);
  PhysicalMesh m;
  m.x_.assign(2 * n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double v = k == n ? half_width : h * static_cast<double>(k);
    m.x_[n + k] = v;
    m.x_[n - k] = -v;
  }
  return m;
}

double PhysicalMesh::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) h = std::min(h, x_[i + 1] - x_[i]);
  return h;
}

std::size_t PhysicalMesh::locate(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin() - 1, 0));
  // First node of a four-point stencil around [x_j, x_{j+1}].
  return std::min(j > 0 ? j - 1 : 0, x_.size() - 4);
}

double PhysicalMesh::interpolate(std::span<const double> u, double x) const {
  if (x <= x_.front()) return u.front();
  if (x >= x_.back()) return u.back();
  const std::size_t b = locate(x);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) w *= (x - x_[b + j]) / (x_[b + i] - x_[b + j]);
    }
    sum += w * u[b + i];
  }
  return sum;
}

double PhysicalMesh::interpolate_derivative(std::span<const double> u, double x) const {
  if (x <= x_.front() || x >= x_.back()) return 0.0;
  const std::size_t b = locate(x);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double denom = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) denom *= x_[b + i] - x_[b + j];
    }
    double num = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (k == i) continue;
      double prod = 1.0;
      for (int j = 0; j < 4; ++j) {
        if (j != i && j != k) prod *= x - x_[b + j];
      }
      num += prod;
    }
    sum += num / denom * u[b + i];
  }
  return sum;
}

void CompensatedTime::add(double dt) {
  const double s = hi + dt;
  const double bp = s - hi;
  const double err = (hi - (s - bp)) + (dt - bp);
  hi = s;
  lo += err;
  const double t = hi + lo;
  lo -= t - hi;
  hi = t;
}

double build_u0_value(double d0, double d1, double x, double T, const PhiSolution& phi) {
  if (!(T > 0.0 && T < 1.0)) throw DomainError("build_u0 needs T in (0, 1)");
  const ProblemParams& pp = phi.params();
  const double p = pp.p();
  const double s0 = -std::log(T);
  const double z = x / std::sqrt(T * s0);
  const double bracket = 1.0 + (d0 + d1 * z) / (p - 1.0 + (p - 1.0) * (p - 1.0) / (4.0 * p) * z * z);
  return std::pow(T, -1.0 / (p - 1.0)) * phi.phi(s0) / pp.kappa() * eval_f(z, pp) * bracket;
}

std::vector<double> build_constructed_u0(double d0, double d1, double T, const PhiSolution& phi,
                                          const PhysicalMesh& mesh) {
  if (!phi.in_range(-std::log(T))) throw DomainError("-log T outside the phi table");
  std::vector<double> u(mesh.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = build_u0_value(d0, d1, mesh.x(i), T, phi);
  return u;
}

std::string to_string(PhysicalStop s) {
  switch (s) {
    case PhysicalStop::AmplificationCap: return "amplification_cap";
    case PhysicalStop::DtFloor: return "dt_floor";
    case PhysicalStop::MaxSteps: return "max_steps";
    case PhysicalStop::NonFinite: return "non_finite";
  }
  return "unknown";
}

const Snapshot* PhysicalRun::snapshot_at(double t) const {
  const Snapshot* best = nullptr;
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& s : snapshots) {
    const double g = std::abs(s.t.minus(t));
    if (g < gap) {
      gap = g;
      best = &s;
    }
  }
  return best;
}

void PhysicalRun::write_csv(std::ostream& out, const CsvMeta& meta) const {
  write_csv_header(out, {"t", "dt", "max_u", "argmax_x", "u_at_0"}, meta);
  for (const auto& s : samples) {
    write_csv_row(out, std::vector<double>{s.t.value(), s.dt, s.max_u, s.argmax_x, s.u_at_0});
  }
}

void PhysicalRun::write_snapshot_csv(std::ostream& out, const PhysicalMesh& mesh, const Snapshot& snap,
                                     const CsvMeta& meta) {
  CsvMeta m = meta;
  m.emplace_back("t", format_double(snap.t.value()));
  m.emplace_back("amplification", format_double(snap.amplification));
  write_csv_header(out, {"x", "u"}, m);
  for (std::size_t i = 0; i < mesh.size(); ++i) write_csv_row(out, std::vector<double>{mesh.x(i), snap.u[i]});
}

namespace {

class Diffusion {
 public:
  explicit Diffusion(const PhysicalMesh& mesh) {
    const std::size_t n = mesh.size();
    lo_.assign(n, 0.0);
    up_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hm = mesh.x(i) - mesh.x(i - 1);
      const double hp = mesh.x(i + 1) - mesh.x(i);
      lo_[i] = 2.0 / ((hm + hp) * hm);
      up_[i] = 2.0 / ((hm + hp) * hp);
    }
    const double h0 = mesh.x(1) - mesh.x(0);
    const double hn = mesh.x(n - 1) - mesh.x(n - 2);
    up_[0] = 2.0 / (h0 * h0);  // mirror ghost node
    lo_[n - 1] = 2.0 / (hn * hn);
    c_.resize(n);
  }

  /// u <- (I - dt D)^{-1} u.
  void backward_euler(std::vector<double>& u, double dt) {
    const std::size_t n = u.size();
    double prev_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = -dt * lo_[i];
      const double b = 1.0 + dt * (lo_[i] + up_[i]);
      const double c = -dt * up_[i];
      const double pivot = b - (i > 0 ? a * prev_c : 0.0);
      c_[i] = c / pivot;
      u[i] = (u[i] - (i > 0 ? a * u[i - 1] : 0.0)) / pivot;
      prev_c = c_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) u[i] -= c_[i] * u[i + 1];
  }

  /// Second order: 2 BE(dt/2)^2 - BE(dt).
  void step(std::vector<double>& u, double dt) {
    half_ = u;
    backward_euler(half_, 0.5 * dt);
    backward_euler(half_, 0.5 * dt);
    backward_euler(u, dt);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 2.0 * half_[i] - u[i];
  }

 private:
  std::vector<double> lo_, up_, c_, half_;
};

}  // namespace

PhysicalRun evolve_physical(std::vector<double> u, const PhysicalMesh& mesh, const ProblemParams& params,
                            const PerturbationFamily& family, const PhysicalConfig& config) {
  if (u.size() != mesh.size()) throw std::invalid_argument("u0 does not match the mesh");
  if (!(config.c_dt > 0.0)) throw std::invalid_argument("c_dt must be positive");
  const double p = params.p();
  const bool h_zero = family.identically_zero();
  const Power pow_pm1(p - 1.0);
  auto reaction = [&](double v) {
    double r = pow_pm1(std::abs(v)) * v;
    if (!h_zero) r += family.eval(0, v);
    return r;
  };
  auto react = [&](std::vector<double>& v, double dt) {
    for (double& x : v) {
      const double k1 = reaction(x);
      const double k2 = reaction(x + 0.5 * dt * k1);
      const double k3 = reaction(x + 0.5 * dt * k2);
      const double k4 = reaction(x + dt * k3);
      x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  };

  PhysicalRun run;
  run.mesh = mesh;
  run.p = p;
  run.config = config;
  std::vector<double> requested = config.snapshot_times;
  std::sort(requested.begin(), requested.end());
  std::size_t next_request = 0;

  auto sup = [&](const std::vector<double>& v, std::size_t& arg) {
    double m = 0.0;
    arg = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > m) {
        m = std::abs(v[i]);
        arg = i;
      }
    }
    return m;
  };
  CompensatedTime t;
  std::size_t arg = 0;
  run.initial_max = sup(u, arg);
  if (!(run.initial_max > 0.0)) throw std::invalid_argument("u0 is identically zero");

  auto record = [&](double dt, double max_u, std::size_t argmax) {
    PhysicalSample smp;
    smp.t = t;
    smp.dt = dt;
    smp.max_u = max_u;
    smp.argmax_x = mesh.x(argmax);
    smp.u_at_0 = u[mesh.center()];
    for (double xp : config.probe_x) smp.probes.push_back(mesh.interpolate(u, xp));
    run.samples.push_back(std::move(smp));
  };
  const double per_decade = std::max(1, config.snapshots_per_decade);
  int next_level = 0;
  auto maybe_snapshot = [&](double amp, bool hit_request) {
    while (amp >= std::pow(10.0, next_level / per_decade)) {
      run.snapshots.push_back({t, amp, false, u});
      ++next_level;
    }
    if (hit_request) run.snapshots.push_back({t, amp, true, u});
  };

  record(0.0, run.initial_max, arg);
  while (next_request < requested.size() && t.minus(requested[next_request]) >= 0.0) {
    run.snapshots.push_back({t, 1.0, true, u});
    ++next_request;
  }
  maybe_snapshot(1.0, false);

  Diffusion diffusion(mesh);
  double max_u = run.initial_max;
  for (long step = 0;; ++step) {
    if (step >= config.max_steps) {
      run.stop = PhysicalStop::MaxSteps;
      break;
    }
    double dt = config.c_dt / pow_pm1(max_u);
    bool hit = false;
    if (next_request < requested.size()) {
      const double remaining = -t.minus(requested[next_request]);
      if (remaining <= dt) {
        dt = remaining;
        hit = true;
      }
    }
    if (!(dt >= config.dt_floor)) {
      run.stop = PhysicalStop::DtFloor;
      break;
    }
    react(u, 0.5 * dt);
    diffusion.step(u, dt);
    react(u, 0.5 * dt);
    t.add(dt);
    max_u = sup(u, arg);
    if (!std::isfinite(max_u)) {
      run.stop = PhysicalStop::NonFinite;
      run.message = "non-finite value at t=" + format_double(t.value()) + " near x=" + format_double(mesh.x(arg));
      break;
    }
    record(dt, max_u, arg);
    if (hit) ++next_request;
    const double amp = max_u / run.initial_max;
    maybe_snapshot(amp, hit);
    if (amp >= config.amplification_cap) {
      run.stop = PhysicalStop::AmplificationCap;
      break;
    }
  }
  return run;
}

BlowupEstimate estimate_T_series(std::span<const double> t_rel, std::span<const double> max_u, double p,
                                 double t_ref) {
  if (t_rel.size() != max_u.size()) throw std::invalid_argument("estimate_T: series length mismatch");
  if (t_rel.size() < 3) throw InsufficientDataError("estimate_T needs at least 3 samples");
  std::vector<double> y(max_u.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::pow(max_u[i], -(p - 1.0));
  const LineFit fit = fit_line(t_rel, y);
  BlowupEstimate e;
  e.points = y.size();
  e.slope = fit.slope;
  e.t_ref = t_ref;
  e.delta = -fit.intercept / fit.slope;
  e.T = t_ref + e.delta;
  const double var = fit.intercept_stderr * fit.intercept_stderr +
                     e.delta * e.delta * fit.slope_stderr * fit.slope_stderr + 2.0 * e.delta * fit.covariance;
  e.delta_stderr = std::sqrt(std::max(var, 0.0)) / std::abs(fit.slope);
  const double scale = *std::max_element(y.begin(), y.end());
  e.relative_residual = fit.residual_rms / scale;
  e.reliable = e.relative_residual < 1e-3;
  return e;
}

BlowupEstimate estimate_T(const PhysicalRun& run, double decade) {
  if (run.amplification() < 1e3) {
    throw InsufficientDataError("estimate_T needs amplification >= 1e3, run reached " +
                                format_double(run.amplification()));
  }
  const auto& last = run.samples.back();
  std::vector<double> t_rel, mu;
  for (auto it = run.samples.rbegin(); it != run.samples.rend(); ++it) {
    if (it->max_u * decade < last.max_u) break;
    t_rel.push_back(it->t.minus(last.t));
    mu.push_back(it->max_u);
  }
  std::reverse(t_rel.begin(), t_rel.end());
  std::reverse(mu.begin(), mu.end());
  return estimate_T_series(t_rel, mu, run.p, last.t.value());
}

double flat_blowup_time(double c, double p) { return std::pow(c, 1.0 - p) / (p - 1.0); }

namespace {

// tau = T - t with T = t_ref + delta, without forming T.
double time_to_blowup(const BlowupEstimate& T, const CompensatedTime& t) { return T.delta - t.minus(T.t_ref); }

}  // namespace

ProfileErrorSeries check_intermediate_profile(const PhysicalRun& run, const BlowupEstimate& T,
                                              const ProblemParams& params, double z_max) {
  const double p = params.p();
  const ProfileShape shape(params);
  ProfileErrorSeries out;
  std::vector<const Snapshot*> snaps;
  for (const auto& s : run.snapshots) {
    if (!s.requested) snaps.push_back(&s);
  }
  std::sort(snaps.begin(), snaps.end(), [](auto* a, auto* b) { return a->t.minus(b->t) < 0.0; });
  for (const Snapshot* s : snaps) {
    const double tau = time_to_blowup(T, s->t);
    if (!(tau > 0.0) || !(tau < std::exp(-1.0))) continue;
    const double L = -std::log(tau);
    const double rL = std::sqrt(L);
    const double xi_max = z_max * rL;
    const double rt = std::sqrt(tau);
    const double amp_scale = std::pow(tau, 1.0 / (p - 1.0));
    ProfileErrorSample e;
    e.t = s->t.value();
    e.tau = tau;
    e.amplification = s->amplification;
    const int n = 401;
    for (int k = 0; k < n; ++k) {
      const double xi = -xi_max + 2.0 * xi_max * k / (n - 1);
      const double x = xi * rt;
      if (std::abs(x) > run.mesh.half_width()) continue;
      const auto fv = shape.values(xi / rL);
      const double g = amp_scale * run.mesh.interpolate(s->u, x);
      const double dg = amp_scale * rt * run.mesh.interpolate_derivative(s->u, x);
      e.e0 = std::max(e.e0, std::abs(g - fv.f));
      e.e1 = std::max(e.e1, std::abs(dg - fv.f_prime / rL));
    }
    out.samples.push_back(e);
  }
  if (out.samples.size() < 3) throw InsufficientDataError("check_intermediate_profile needs 3 snapshots near T");
  std::vector<double> logL, e0;
  for (const auto& e : out.samples) {
    if (e.e0 > 0.0) {
      logL.push_back(-std::log(e.tau));
      e0.push_back(e.e0);
    }
  }
  if (logL.size() >= 2) out.fitted_exponent = -fit_loglog(logL, e0).slope;
  return out;
}

TOfX0 solve_t_of_x0(double x0, double T, double K0) {
  if (!(K0 > 0.0)) throw std::invalid_argument("K0 must be positive");
  const double target = x0 * x0 / (K0 * K0);
  if (!(target > 0.0) || !(target < std::exp(-1.0))) {
    throw DomainError("no root of |x0| = K0 sqrt(tau |log tau|) with tau in (0, 1/e)");
  }
  // tau |log tau| is increasing on (0, 1/e); bisect in log tau.
  double lo = -700.0, hi = -1.0;
  auto resid = [&](double lt) {
    const double tau = std::exp(lt);
    return K0 * std::sqrt(tau * -lt) - std::abs(x0);
  };
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = resid(mid);
    if (r == 0.0 || hi - lo < 1e-16) break;
    (r < 0.0 ? lo : hi) = mid;
  }
  TOfX0 out;
  out.tau = std::exp(mid);
  out.t = T - out.tau;
  out.residual = std::abs(resid(mid));
  if (!(out.residual < 1e-12)) throw ConvergenceError("t(x0) bisection did not reach residual 1e-12");
  return out;
}

double f_hat(double tau, double K0, const ProblemParams& params) {
  const double p = params.p();
  return params.kappa() * std::pow(1.0 - tau + (p - 1.0) * K0 * K0 / (4.0 * p), -1.0 / (p - 1.0));
}

double final_profile_theory(double x, double p) {
  const double ax = std::abs(x);
  return std::pow(8.0 * p * std::abs(std::log(ax)) / ((p - 1.0) * (p - 1.0) * ax * ax), 1.0 / (p - 1.0));
}

FinalProfileReport extract_final_profile(const PhysicalRun& run, const BlowupEstimate& T,
                                         const ProblemParams& params, const FinalProfileOptions& options) {
  std::vector<const Snapshot*> snaps;
  for (const auto& s : run.snapshots) snaps.push_back(&s);
  std::sort(snaps.begin(), snaps.end(), [](auto* a, auto* b) { return a->t.minus(b->t) < 0.0; });
  if (snaps.size() < 2) throw InsufficientDataError("extract_final_profile needs two late snapshots");
  const Snapshot& s1 = *snaps[snaps.size() - 2];
  const Snapshot& s2 = *snaps.back();
  const double gap = s2.t.minus(s1.t);
  const double tau2 = time_to_blowup(T, s2.t);
  const double p = params.p();

  FinalProfileReport rep;
  const int n = std::max(2, options.points_per_side);
  for (int side : {-1, 1}) {
    for (int k = 0; k < n; ++k) {
      const double ax = options.x_lo * std::pow(options.x_hi / options.x_lo, static_cast<double>(k) / (n - 1));
      const double x = side * ax;
      const double u1 = run.mesh.interpolate(s1.u, x);
      const double u2 = run.mesh.interpolate(s2.u, x);
      FinalProfilePoint pt;
      pt.x = x;
      pt.u_star = gap > 0.0 ? u2 + (u2 - u1) * tau2 / gap : u2;
      pt.theory = final_profile_theory(x, p);
      pt.ratio = pt.u_star / pt.theory;
      pt.drift = std::abs(u2 - u1) / std::abs(u2);
      if (pt.drift > 0.01) rep.extrapolation_warning = true;
      rep.points.push_back(pt);
    }
  }

  const double fK0 = eval_f(options.K0, params);
  const double expo = 1.0 / (p - 1.0);
  for (std::size_t j = 0; j < run.config.probe_x.size(); ++j) {
    const double x0 = run.config.probe_x[j];
    TOfX0 tx;
    try {
      tx = solve_t_of_x0(x0, T.T, options.K0);
    } catch (const DomainError&) {
      continue;
    }
    // The requested snapshot nearest to t(x0); tau0 taken from its actual time.
    const Snapshot* at = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : run.snapshots) {
      if (!s.requested) continue;
      const double g = std::abs(time_to_blowup(T, s.t) - tx.tau);
      if (g < best) {
        best = g;
        at = &s;
      }
    }
    if (!at || best > 1e-3 * tx.tau) continue;
    const double tau0 = time_to_blowup(T, at->t);
    VTransformReport v;
    v.x0 = x0;
    v.t_x0 = at->t.value();
    const double scale = std::pow(tau0, expo);
    const double rt = std::sqrt(tau0);
    for (int k = 0; k <= 40; ++k) {
      const double xi = -options.xi_max + 2.0 * options.xi_max * k / 40.0;
      v.eps_start = std::max(v.eps_start, std::abs(scale * run.mesh.interpolate(at->u, x0 + xi * rt) - fK0));
    }
    for (const auto& smp : run.samples) {
      const double tau = (smp.t.minus(at->t)) / tau0;
      if (tau < 0.0 || tau > options.tau_track) continue;
      v.tau_max = std::max(v.tau_max, tau);
      v.eps_track = std::max(v.eps_track, std::abs(scale * smp.probes[j] - f_hat(tau, options.K0, params)));
    }
    rep.v_checks.push_back(v);
  }
  return rep;
}

void FinalProfileReport::write_csv(std::ostream& out, const CsvMeta& meta) const {
  write_csv_header(out, {"x", "u_star", "theory", "ratio"}, meta);
  for (const auto& pt : points) write_csv_row(out, std::vector<double>{pt.x, pt.u_star, pt.theory, pt.ratio});
}

}  // namespace blowup
