#include "blowup/profile.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "blowup/csv.hpp"
#include "blowup/errors.hpp"

namespace blowup {

ProfileShape::ProfileShape(const ProblemParams& params)
    : p_(params.p()),
      kappa_(params.kappa()),
      c_p_(params.c_p()),
      k_((params.p() - 1.0) / (2.0 * params.p())),
      inv_pow_(-1.0 / (params.p() - 1.0)) {}

ProfileShape::Values ProfileShape::values(double z) const {
  const double d = 1.0 + c_p_ * z * z;
  const double f = kappa_ * inv_pow_(d);
  const double fp = f / ((p_ - 1.0) * d);  // f^{p-1} = 1/((p-1) d)
  return {f, -k_ * z * fp, -k_ * fp * (1.0 - z * z / (2.0 * d)), fp};
}

double eval_f(double z, const ProblemParams& params) { return ProfileShape(params).f(z); }

double eval_f_deriv(double z, const ProblemParams& params) {
  return ProfileShape(params).values(z).f_prime;
}

double eval_f_second(double z, const ProblemParams& params) {
  return ProfileShape(params).values(z).f_second;
}

PhiSolution::PhiSolution(ProblemParams params, PerturbationFamily family,
                         std::vector<double> s_grid, std::vector<double> eta)
    : params_(params), family_(std::move(family)), s_(std::move(s_grid)), eta_(std::move(eta)) {
  const std::size_t n = s_.size();
  if (n < 3 || eta_.size() != n) throw std::invalid_argument("phi table needs >= 3 matching points");
  log_s_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s_[i] > 0.0)) throw std::invalid_argument("phi table s values must be positive");
    log_s_[i] = std::log(s_[i]);
  }
  log_step_ = (log_s_.back() - log_s_.front()) / static_cast<double>(n - 1);

  // Fritsch-Carlson (PCHIP) slopes on the uniform log grid.
  const double h = log_step_;
  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) delta[k] = (eta_[k + 1] - eta_[k]) / h;
  slope_.assign(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] > 0.0) {
      slope_[k] = 2.0 / (1.0 / delta[k - 1] + 1.0 / delta[k]);
    }
  }
  auto end_slope = [](double d0, double d1) {
    double m = (3.0 * d0 - d1) / 2.0;
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(m) > std::abs(3.0 * d0)) m = 3.0 * d0;
    return m;
  };
  slope_[0] = end_slope(delta[0], delta[1]);
  slope_[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
}

void PhiSolution::check_range(double s) const {
  const double slack = 1e-12 * s_.back();
  if (!(s >= s_.front() - slack && s <= s_.back() + slack)) {
    throw DomainError("s=" + std::to_string(s) + " outside phi table [" +
                      std::to_string(s_.front()) + ", " + std::to_string(s_.back()) + "]");
  }
}

double PhiSolution::eta(double s) const {
  check_range(s);
  const double x = std::log(s);
  const std::size_t n = s_.size();
  const double pos = (x - log_s_.front()) / log_step_;
  auto k = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(n - 2)));
  const double t = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * eta_[k] + h10 * log_step_ * slope_[k] + h01 * eta_[k + 1] +
         h11 * log_step_ * slope_[k + 1];
}

double PhiSolution::phi_from_eta(double eta) const {
  return params_.kappa() * std::pow(1.0 + eta, -1.0 / (params_.p() - 1.0));
}

double PhiSolution::phi(double s) const { return phi_from_eta(eta(s)); }

double PhiSolution::ode_rhs(double s, double phi) const {
  const double p = params_.p();
  double rhs = -phi / (p - 1.0) + signed_pow(phi, p);
  if (!family_.identically_zero()) rhs += family_.scaled(0, phi, s);
  return rhs;
}

double PhiSolution::phi_prime(double s) const {
  // -phi/(p-1) + phi^p = -phi eta / ((p-1)(1+eta)) avoids the O(1) cancellation.
  const double e = eta(s);
  const double ph = phi_from_eta(e);
  double rhs = -ph * e / ((params_.p() - 1.0) * (1.0 + e));
  if (!family_.identically_zero()) rhs += family_.scaled(0, ph, s);
  return rhs;
}

void PhiSolution::write_csv(std::ostream& out, const CsvMeta& meta) const {
  write_csv_header(out, {"s", "phi", "eta_a", "phi_prime"}, meta);
  for (std::size_t i = 0; i < s_.size(); ++i) {
    const double ph = phi_from_eta(eta_[i]);
    write_csv_row(out, {s_[i], ph, eta_[i], ode_rhs(s_[i], ph)});
  }
}

PhiSolution solve_phi_ode(const ProblemParams& params, const PerturbationFamily& family,
                          double s_min, double s_max, const PhiOdeOptions& options) {
  if (!(s_min >= 5.0)) throw std::invalid_argument("phi table requires s_min >= 5");
  if (!(s_max >= s_min + 40.0)) {
    throw std::invalid_argument("phi table requires s_max >= s_min + 40 for the seed to relax");
  }
  if (!(options.max_step > 0.0) || options.points_per_decade < 10) {
    throw std::invalid_argument("invalid phi ODE options");
  }
  const double p = params.p();
  const double kappa = params.kappa();
  const bool zero_h = family.identically_zero();

  const auto n = static_cast<std::size_t>(
                     std::ceil(std::log10(s_max / s_min) * options.points_per_decade)) + 1;
  std::vector<double> s(n);
  const double ls0 = std::log(s_min);
  const double dls = (std::log(s_max) - ls0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) s[i] = std::exp(ls0 + dls * static_cast<double>(i));
  s.front() = s_min;
  s.back() = s_max;

  auto rhs = [&](double sv, double eta) {
    if (zero_h) return eta;
    const double ph = kappa * std::pow(1.0 + eta, -1.0 / (p - 1.0));
    return eta - (p - 1.0) * (1.0 + eta) * family.scaled(0, ph, sv) / ph;
  };

  std::vector<double> eta(n, 0.0);
  if (params.perturbation_case() == PerturbationCase::ExplicitLog && !zero_h) {
    const double c0 = params.mu() * std::pow((p - 1.0) / 2.0, params.a());
    eta[n - 1] = c0 * std::pow(s_max, -params.a());
  }

  for (std::size_t k = n - 1; k > 0; --k) {
    const double span = s[k] - s[k - 1];
    const int m = std::max(1, static_cast<int>(std::ceil(span / options.max_step)));
    const double h = -span / m;
    double sv = s[k];
    double e = eta[k];
    for (int i = 0; i < m; ++i) {
      const double k1 = rhs(sv, e);
      const double k2 = rhs(sv + 0.5 * h, e + 0.5 * h * k1);
      const double k3 = rhs(sv + 0.5 * h, e + 0.5 * h * k2);
      const double k4 = rhs(sv + h, e + h * k3);
      e += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      sv = s[k] + h * (i + 1);
      if (!std::isfinite(e) || !(1.0 + e > 0.0)) {
        throw ConvergenceError("phi backward integration diverged at s=" + std::to_string(sv));
      }
    }
    eta[k - 1] = e;
  }
  return PhiSolution(params, family, std::move(s), std::move(eta));
}

PhiSolution solve_phi_ode(const ProblemParams& params, double s_min, double s_max,
                          const PhiOdeOptions& options) {
  return solve_phi_ode(params, PerturbationFamily::for_params(params), s_min, s_max, options);
}

VarphiValue eval_varphi(double y, double s, const PhiSolution& phi) {
  const ProblemParams& pp = phi.params();
  const double kappa = pp.kappa();
  const double ph = phi.phi(s);
  const double dph = phi.phi_prime(s);
  const double rs = std::sqrt(s);
  const double z = y / rs;
  const auto fv = ProfileShape(pp).values(z);
  const double corr = kappa / (2.0 * pp.p() * s);
  const double theta = fv.f + corr;
  const double scale = ph / kappa;
  return {scale * theta, scale * fv.f_prime / rs, scale * fv.f_second / s,
          dph / kappa * theta + scale * (-z * fv.f_prime / (2.0 * s) - corr / s)};
}

}  // namespace blowup
