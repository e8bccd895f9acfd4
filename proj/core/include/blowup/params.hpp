#pragma once

#include <optional>
#include <string>

namespace blowup {

enum class PerturbationCase { LogBounded, ExplicitLog };

std::string to_string(PerturbationCase c);
PerturbationCase perturbation_case_from_string(const std::string& name);

/// Scalar constants of the problem plus everything derived from them.
/// Construction validates; instances are immutable afterwards.
class ProblemParams {
 public:
  static ProblemParams make(double p, PerturbationCase perturbation_case, double a,
                            double mu, double M,
                            std::optional<double> varrho = std::nullopt);
  static ProblemParams explicit_log(double p, double a, double mu,
                                    std::optional<double> varrho = std::nullopt);
  static ProblemParams log_bounded(double p, double a, double M,
                                   std::optional<double> varrho = std::nullopt);

  double p() const { return p_; }
  PerturbationCase perturbation_case() const { return case_; }
  double a() const { return a_; }
  double mu() const { return mu_; }
  double M() const { return M_; }
  double kappa() const { return kappa_; }
  double c_p() const { return c_p_; }
  double nu() const { return nu_; }
  double varrho() const { return varrho_; }
  double iota() const { return iota_; }
  double p_prime() const { return p_prime_; }
  double a_prime() const { return a_prime_; }
  double a_bar() const { return a_bar_; }
  double beta() const { return beta_; }

 private:
  ProblemParams() = default;

  double p_ = 3.0;
  PerturbationCase case_ = PerturbationCase::ExplicitLog;
  double a_ = 1.0;
  double mu_ = 0.0;
  double M_ = 1.0;
  double kappa_ = 0.0;
  double c_p_ = 0.0;
  double nu_ = 0.0;
  double varrho_ = 0.0;
  double iota_ = 1.0;
  double p_prime_ = 2.0;
  double a_prime_ = 1.0;
  double a_bar_ = 1.0;
  double beta_ = 2.0;
};

}  // namespace blowup
