#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blowup/numeric.hpp"
#include "blowup/params.hpp"
#include "blowup/perturbation.hpp"

namespace blowup {

/// f(z) = kappa (1 + c_p z^2)^{-1/(p-1)} with derivatives.
class ProfileShape {
 public:
  explicit ProfileShape(const ProblemParams& params);

  struct Values {
    double f;
    double f_prime;
    double f_second;
    double f_pow_p;
  };

  double f(double z) const { return kappa_ * inv_pow_(1.0 + c_p_ * z * z); }
  Values values(double z) const;
  double p() const { return p_; }
  double kappa() const { return kappa_; }
  double c_p() const { return c_p_; }

 private:
  double p_;
  double kappa_;
  double c_p_;
  double k_;  // (p-1)/(2p)
  Power inv_pow_;
};

double eval_f(double z, const ProblemParams& params);
double eval_f_deriv(double z, const ProblemParams& params);
double eval_f_second(double z, const ProblemParams& params);

struct PhiOdeOptions {
  double max_step = 0.05;
  int points_per_decade = 2000;
};

/// Tabulated solution of phi' = -phi/(p-1) + phi^p + e^{-ps/(p-1)} h(e^{s/(p-1)} phi),
/// stored as eta(s) = (kappa/phi)^{p-1} - 1 on a logarithmic grid.
class PhiSolution {
 public:
  PhiSolution(ProblemParams params, PerturbationFamily family, std::vector<double> s_grid,
              std::vector<double> eta);

  double eta(double s) const;
  double phi(double s) const;
  double phi_prime(double s) const;
  double phi_from_eta(double eta) const;
  double ode_rhs(double s, double phi) const;

  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }
  bool in_range(double s) const { return s >= s_min() && s <= s_max(); }

  const ProblemParams& params() const { return params_; }
  const PerturbationFamily& family() const { return family_; }
  std::span<const double> s_grid() const { return s_; }
  std::span<const double> eta_table() const { return eta_; }

  /// Columns s, phi, eta_a, phi_prime.
  void write_csv(std::ostream& out,
                 const std::vector<std::pair<std::string, std::string>>& meta = {}) const;

 private:
  void check_range(double s) const;

  ProblemParams params_;
  PerturbationFamily family_;
  std::vector<double> s_;
  std::vector<double> log_s_;
  std::vector<double> eta_;
  std::vector<double> slope_;
  double log_step_ = 0.0;
};

/// Backward RK4 integration from s_max, where eta is seeded with the leading tail
/// C0 s^{-a} (explicit log case) or 0 (log-bounded case).
PhiSolution solve_phi_ode(const ProblemParams& params, const PerturbationFamily& family,
                          double s_min, double s_max, const PhiOdeOptions& options = {});
PhiSolution solve_phi_ode(const ProblemParams& params, double s_min, double s_max,
                          const PhiOdeOptions& options = {});

struct VarphiValue {
  double value;
  double dy;
  double dyy;
  double ds;
};

/// varphi(y, s) = phi(s)/kappa (f(y/sqrt s) + kappa/(2ps)) and its analytic derivatives.
VarphiValue eval_varphi(double y, double s, const PhiSolution& phi);

}  // namespace blowup
