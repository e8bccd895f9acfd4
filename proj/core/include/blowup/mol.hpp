#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "blowup/field.hpp"

namespace blowup {

enum class TimeScheme { ExplicitRK4, ImexARS222 };
enum class BoundaryKind { Dirichlet, Outflow };

std::string to_string(TimeScheme scheme);
TimeScheme time_scheme_from_string(const std::string& name);

/// du/ds = A u + E(u, s) on a symmetric uniform grid, where
/// A = d^2/dy^2 - (y/2) d/dy + c with centered differences.
///
/// Dirichlet rows hold u = 0 at |y| = L. Outflow rows drop the curvature and use an
/// upwind drift, which keeps constants exact and lets the profile leave the domain.
/// The IMEX scheme is ARS(2,2,2): A implicit, E explicit, one tridiagonal factorization.
class MolIntegrator {
 public:
  using Explicit = std::function<void(std::span<const double> u, double s, std::span<double> out)>;

  MolIntegrator(const Grid& grid, double constant, BoundaryKind boundary, TimeScheme scheme, double dt);

  /// Largest stable explicit step: min(0.4 dy^2, 2 dy / (L/2)).
  static double rk4_limit(const Grid& grid);

  void step(std::vector<double>& u, double s, const Explicit& explicit_part);
  void apply_linear(std::span<const double> u, std::span<double> out) const;

  double dt() const { return dt_; }
  TimeScheme scheme() const { return scheme_; }
  const Grid& grid() const { return grid_; }

 private:
  void full_rhs(std::span<const double> u, double s, const Explicit& e, std::span<double> out);
  void solve_implicit(std::span<double> rhs) const;
  void enforce_boundary(std::span<double> u) const;

  Grid grid_;
  double constant_;
  BoundaryKind boundary_;
  TimeScheme scheme_;
  double dt_;
  double inv_dy2_;
  double inv_2dy_;
  // Thomas factors of I - gamma dt A.
  std::vector<double> sub_;
  std::vector<double> cprime_;
  std::vector<double> inv_pivot_;
  // Scratch.
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace blowup
