#include "blowup/sources.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "blowup/errors.hpp"

namespace blowup {

double nonlinear_remainder(double q, double varphi, double p) {
  if (q == 0.0) return 0.0;
  const double r = q / varphi;
  const double vp = std::pow(varphi, p);
  if (std::abs(r) < 1e-3) {
    // sum_{k=2}^{5} binom(p, k) r^k
    double term = p * r;
    double sum = 0.0;
    for (int k = 2; k <= 5; ++k) {
      term *= (p - (k - 1)) * r / k;
      sum += term;
    }
    return vp * sum;
  }
  if (r > -0.5) return vp * (std::expm1(p * std::log1p(r)) - p * r);
  return signed_pow(varphi + q, p) - vp - p * std::pow(varphi, p - 1.0) * q;
}

SourceEvaluator::SourceEvaluator(const PhiSolution& phi)
    : phi_(&phi),
      shape_(phi.params()),
      pow_pm1_(phi.params().p() - 1.0),
      p_(phi.params().p()),
      kappa_(phi.params().kappa()),
      iota_(phi.params().iota()),
      h_zero_(phi.family().identically_zero()) {
  const double r = std::round(p_);
  if (std::abs(p_ - r) < 1e-15 && static_cast<int>(r) % 2 == 1 && r <= 9.0) {
    odd_integer_p_ = static_cast<int>(r);
  }
}

SourceEvaluator::TimeScalars SourceEvaluator::at(double s) const {
  const double ph = phi_->phi(s);
  const double dph = phi_->phi_prime(s);
  return {s, ph / kappa_, dph / kappa_, std::sqrt(s), kappa_ / (2.0 * p_ * s)};
}

SourceEvaluator::PointValues SourceEvaluator::point(const TimeScalars& t, double y) const {
  const double z = y / t.rs;
  const auto fv = shape_.values(z);
  const double theta = fv.f + t.corr;
  const double varphi = t.scale * theta;
  const double vy = t.scale * fv.f_prime / t.rs;
  const double vyy = t.scale * fv.f_second / t.s;
  const double vs = t.dscale * theta + t.scale * (-z * fv.f_prime / (2.0 * t.s) - t.corr / t.s);
  const double vpm1 = pow_pm1_(varphi);
  double H0 = 0.0;
  double H1 = 0.0;
  if (!h_zero_) {
    const PerturbationFamily& fam = phi_->family();
    H0 = fam.scaled(0, varphi, t.s);
    if (iota_ != 0.0) H1 = fam.scaled(1, varphi, t.s);
  }
  const double V = p_ * (vpm1 - 1.0 / (p_ - 1.0)) + iota_ * H1;
  const double R = -vs + vyy - 0.5 * y * vy - varphi / (p_ - 1.0) + vpm1 * varphi + H0;
  return {varphi, V, R, H0, H1};
}

void SourceEvaluator::fill(const Grid& grid, double s, ProfileSlice& out) const {
  const std::size_t n = grid.size();
  out.s = s;
  out.varphi.resize(n);
  out.V.resize(n);
  out.R.resize(n);
  out.H0.resize(h_zero_ ? 0 : n);
  out.H1.resize(h_zero_ || iota_ == 0.0 ? 0 : n);
  const TimeScalars t = at(s);
  const auto ys = grid.nodes();
  for (std::size_t i = 0; i < n; ++i) {
    const PointValues pv = point(t, ys[i]);
    out.varphi[i] = pv.varphi;
    out.V[i] = pv.V;
    out.R[i] = pv.R;
    if (!out.H0.empty()) out.H0[i] = pv.H0;
    if (!out.H1.empty()) out.H1[i] = pv.H1;
  }
}

double SourceEvaluator::B(double q, double varphi) const {
  if (odd_integer_p_ == 3) return q * q * (3.0 * varphi + q);
  if (odd_integer_p_ > 0) {
    // sum_{k=2}^{n} binom(n, k) varphi^{n-k} q^k
    const int n = odd_integer_p_;
    double binom = n * (n - 1) / 2.0;
    double qk = q * q;
    double sum = 0.0;
    for (int k = 2; k <= n; ++k) {
      sum += binom * std::pow(varphi, n - k) * qk;
      binom *= static_cast<double>(n - k) / (k + 1);
      qk *= q;
    }
    return sum;
  }
  return nonlinear_remainder(q, varphi, p_);
}

double SourceEvaluator::N(double q, double varphi, double H0, double H1, double s) const {
  if (h_zero_ || q == 0.0) return 0.0;
  return phi_->family().scaled(0, varphi + q, s) - H0 - iota_ * H1 * q;
}

ProfileSliceCache::ProfileSliceCache(const Grid& grid, const PhiSolution& phi) : grid_(grid), ev_(phi) {}

const ProfileSlice& ProfileSliceCache::at(double s) {
  for (const auto& e : entries_) {
    if (e.valid && e.s == s) return e.slice;
  }
  Entry& e = entries_[next_];
  next_ = (next_ + 1) % entries_.size();
  ev_.fill(grid_, s, e.slice);
  e.s = s;
  e.valid = true;
  return e.slice;
}

double eval_V(double y, double s, const PhiSolution& phi) {
  const SourceEvaluator ev(phi);
  return ev.point(ev.at(s), y).V;
}

double eval_B(double q, double y, double s, const PhiSolution& phi) {
  const SourceEvaluator ev(phi);
  return ev.B(q, ev.point(ev.at(s), y).varphi);
}

double eval_R(double y, double s, const PhiSolution& phi) {
  const SourceEvaluator ev(phi);
  return ev.point(ev.at(s), y).R;
}

double eval_N(double q, double y, double s, const PhiSolution& phi) {
  const SourceEvaluator ev(phi);
  const auto pv = ev.point(ev.at(s), y);
  return ev.N(q, pv.varphi, pv.H0, pv.H1, s);
}

QSourceBundle eval_sources(double q, double y, double s, const PhiSolution& phi) {
  const SourceEvaluator ev(phi);
  const auto pv = ev.point(ev.at(s), y);
  return {pv.V, ev.B(q, pv.varphi), pv.R, ev.N(q, pv.varphi, pv.H0, pv.H1, s)};
}

double eval_Q(double y, double tau, const ProblemParams& params) {
  // The profile identity -(z/2) f' - f/(p-1) + f^p = 0 removes the O(1) part, leaving
  // Q = z f'/(2 tau) + c/tau + f''/tau - c/(p-1) + (f + c)^p - f^p with c = kappa/(2 p tau).
  const double p = params.p();
  const double z = y / std::sqrt(tau);
  const auto fv = ProfileShape(params).values(z);
  const double c = params.kappa() / (2.0 * p * tau);
  const double jump = fv.f_pow_p * std::expm1(p * std::log1p(c / fv.f));
  return z * fv.f_prime / (2.0 * tau) + c / tau + fv.f_second / tau - c / (p - 1.0) + jump;
}

double eval_G(double y, double tau, const PhiSolution& phi) {
  const ProblemParams& pp = phi.params();
  const double p = pp.p();
  const double kappa = pp.kappa();
  const double ph = phi.phi(tau);
  const double dph = phi.phi_prime(tau);
  const double z = y / std::sqrt(tau);
  const double theta = eval_f(z, pp) + kappa / (2.0 * p * tau);
  double g = -dph / kappa * theta - ph / kappa * std::pow(theta, p) +
             std::pow(ph, p) * std::pow(theta / kappa, p);
  if (!phi.family().identically_zero()) g += phi.family().scaled(0, ph / kappa * theta, tau);
  return g;
}

ModeResidualSeries mode_ode_residuals(std::span<const double> s, std::span<const double> q0,
                                      std::span<const double> q1, std::span<const double> q2) {
  const std::size_t n = s.size();
  if (q0.size() != n || q1.size() != n || q2.size() != n) {
    throw std::invalid_argument("mode_ode_residuals: series length mismatch");
  }
  if (n < 5) throw InsufficientDataError("mode_ode_residuals needs at least 5 samples");
  const double ds = (s[n - 1] - s[0]) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(s[k + 1] - s[k] - ds) > 1e-6 * ds) {
      throw std::invalid_argument("mode_ode_residuals needs uniformly spaced samples");
    }
  }
  ModeResidualSeries out;
  const std::span<const double> q[3] = {q0, q1, q2};
  for (std::size_t k = 2; k + 2 < n; ++k) {
    out.s.push_back(s[k]);
    for (int m = 0; m < 3; ++m) {
      const auto& v = q[m];
      const double d = (-v[k + 2] + 8.0 * v[k + 1] - 8.0 * v[k - 1] + v[k - 2]) / (12.0 * ds);
      const double r = m < 2 ? d - (1.0 - 0.5 * m) * v[k] : d + 2.0 / s[k] * v[k];
      out.residual[m].push_back(r);
    }
  }
  for (int m = 0; m < 3; ++m) {
    out.fitted_slope[m] = std::numeric_limits<double>::quiet_NaN();
    bool fittable = out.s.size() >= 2;
    for (double r : out.residual[m]) fittable = fittable && r != 0.0 && std::isfinite(r);
    if (fittable) out.fitted_slope[m] = fit_loglog(out.s, out.residual[m]).slope;
  }
  return out;
}

}  // namespace blowup
