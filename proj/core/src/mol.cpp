#include "blowup/mol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blowup/errors.hpp"

namespace blowup {

namespace {
const double kGamma = 1.0 - 1.0 / std::sqrt(2.0);
const double kDelta = 1.0 - 1.0 / (2.0 * kGamma);
}  // namespace

std::string to_string(TimeScheme scheme) {
  return scheme == TimeScheme::ExplicitRK4 ? "rk4" : "imex";
}

TimeScheme time_scheme_from_string(const std::string& name) {
  if (name == "rk4") return TimeScheme::ExplicitRK4;
  if (name == "imex") return TimeScheme::ImexARS222;
  throw std::invalid_argument("unknown time scheme '" + name + "' (expected rk4 or imex)");
}

double MolIntegrator::rk4_limit(const Grid& grid) {
  const double dy = grid.spacing();
  return std::min(0.4 * dy * dy, 2.0 * dy / (0.5 * grid.half_width()));
}

MolIntegrator::MolIntegrator(const Grid& grid, double constant, BoundaryKind boundary,
                             TimeScheme scheme, double dt)
    : grid_(grid),
      constant_(constant),
      boundary_(boundary),
      scheme_(scheme),
      dt_(dt),
      inv_dy2_(1.0 / (grid.spacing() * grid.spacing())),
      inv_2dy_(1.0 / (2.0 * grid.spacing())) {
  if (!(dt > 0.0)) throw StepSizeError("time step must be positive");
  if (scheme == TimeScheme::ExplicitRK4 && dt > rk4_limit(grid) * (1.0 + 1e-12)) {
    throw StepSizeError("dt=" + std::to_string(dt) + " exceeds the RK4 stability limit " +
                        std::to_string(rk4_limit(grid)));
  }
  const std::size_t n = grid.size();
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->assign(n, 0.0);

  if (scheme == TimeScheme::ImexARS222) {
    const double g = kGamma * dt;
    const double dy = grid.spacing();
    std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double y = grid.y(i);
      lower[i] = -g * (inv_dy2_ + y * inv_2dy_ / 2.0);
      upper[i] = -g * (inv_dy2_ - y * inv_2dy_ / 2.0);
      diag[i] = 1.0 - g * (-2.0 * inv_dy2_ + constant_);
    }
    if (boundary == BoundaryKind::Outflow) {
      const double y0 = grid.y(0);
      const double yn = grid.y(n - 1);
      diag[0] = 1.0 - g * (y0 / (2.0 * dy) + constant_);
      upper[0] = -g * (-y0 / (2.0 * dy));
      lower[n - 1] = -g * (yn / (2.0 * dy));
      diag[n - 1] = 1.0 - g * (-yn / (2.0 * dy) + constant_);
    }
    sub_ = lower;
    cprime_.assign(n, 0.0);
    inv_pivot_.assign(n, 0.0);
    double prev_c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pivot = diag[i] - (i > 0 ? lower[i] * prev_c : 0.0);
      if (!(std::abs(pivot) > 1e-300)) throw std::runtime_error("singular implicit operator");
      inv_pivot_[i] = 1.0 / pivot;
      cprime_[i] = upper[i] * inv_pivot_[i];
      prev_c = cprime_[i];
    }
  }
}

void MolIntegrator::apply_linear(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = u.size();
  const auto y = grid_.nodes();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dy2_ -
             0.5 * y[i] * (u[i + 1] - u[i - 1]) * inv_2dy_ + constant_ * u[i];
  }
  if (boundary_ == BoundaryKind::Dirichlet) {
    out[0] = 0.0;
    out[n - 1] = 0.0;
  } else {
    const double two_inv_2dy = 2.0 * inv_2dy_;
    out[0] = -0.5 * y[0] * (u[1] - u[0]) * two_inv_2dy + constant_ * u[0];
    out[n - 1] = -0.5 * y[n - 1] * (u[n - 1] - u[n - 2]) * two_inv_2dy + constant_ * u[n - 1];
  }
}

void MolIntegrator::enforce_boundary(std::span<double> u) const {
  if (boundary_ == BoundaryKind::Dirichlet) {
    u[0] = 0.0;
    u[u.size() - 1] = 0.0;
  }
}

void MolIntegrator::full_rhs(std::span<const double> u, double s, const Explicit& e, std::span<double> out) {
  e(u, s, out);
  const std::size_t n = u.size();
  const auto y = grid_.nodes();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] += (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dy2_ -
              0.5 * y[i] * (u[i + 1] - u[i - 1]) * inv_2dy_ + constant_ * u[i];
  }
  if (boundary_ == BoundaryKind::Dirichlet) {
    out[0] = 0.0;
    out[n - 1] = 0.0;
  } else {
    const double inv_dy = 2.0 * inv_2dy_;
    out[0] += -0.5 * y[0] * (u[1] - u[0]) * inv_dy + constant_ * u[0];
    out[n - 1] += -0.5 * y[n - 1] * (u[n - 1] - u[n - 2]) * inv_dy + constant_ * u[n - 1];
  }
}

void MolIntegrator::solve_implicit(std::span<double> d) const {
  const std::size_t n = d.size();
  d[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) d[i] = (d[i] - sub_[i] * d[i - 1]) * inv_pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= cprime_[i] * d[i + 1];
}

void MolIntegrator::step(std::vector<double>& u, double s, const Explicit& e) {
  const std::size_t n = u.size();
  if (n != grid_.size()) throw std::invalid_argument("field does not match integrator grid");
  enforce_boundary(u);
  const double dt = dt_;

  if (scheme_ == TimeScheme::ExplicitRK4) {
    full_rhs(u, s, e, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k1_[i];
    full_rhs(tmp_, s + 0.5 * dt, e, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + 0.5 * dt * k2_[i];
    full_rhs(tmp_, s + 0.5 * dt, e, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + dt * k3_[i];
    full_rhs(tmp_, s + dt, e, k4_);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  } else {
    // ARS(2,2,2), stiffly accurate: u_{n+1} is the last implicit stage.
    e(u, s, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = u[i] + dt * kGamma * k1_[i];
    enforce_boundary(tmp_);
    solve_implicit(tmp_);
    e(tmp_, s + kGamma * dt, k2_);
    apply_linear(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += dt * (kDelta * k1_[i] + (1.0 - kDelta) * k2_[i] + (1.0 - kGamma) * k3_[i]);
    }
    enforce_boundary(u);
    solve_implicit(u);
  }
  enforce_boundary(u);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(u[i])) throw SolverBlowUp(s + dt, grid_.y(i));
  }
}

}  // namespace blowup
