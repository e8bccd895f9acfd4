#pragma once

#include <functional>
#include <optional>

#include "blowup/numeric.hpp"
#include "blowup/params.hpp"

namespace blowup {

/// The lower-order term h and its first two derivatives.
///
/// The built-in member is h(z) = c |z|^{p-1} z / log^a(2 + z^2). For the explicit
/// log case c = mu. For the log-bounded reference instance c = M / (p + 2a/ln 2),
/// which keeps |h^{(j)}(z)| <= M(|z|^{p-j}/log^a(2+z^2) + 1) for j = 0, 1.
class PerturbationFamily {
 public:
  using Fn = std::function<double(double)>;

  static PerturbationFamily for_params(const ProblemParams& params);
  static PerturbationFamily log_power(double p, double a, double coefficient);
  static PerturbationFamily custom(double p, Fn h, Fn h_prime, std::optional<Fn> h_second = std::nullopt);

  /// h^{(j)}(z), j in {0, 1, 2}.
  double eval(int j, double z) const;

  /// e^{-(p-j)s/(p-1)} h^{(j)}(e^{s/(p-1)} w), evaluated without overflow for large s.
  double scaled(int j, double w, double s) const;

  bool identically_zero() const { return builtin_ && coefficient_ == 0.0; }
  bool has_second_derivative() const { return builtin_ || h2_.has_value(); }
  bool builtin() const { return builtin_; }
  double coefficient() const { return coefficient_; }
  double p() const { return p_; }
  double a() const { return a_; }

 private:
  PerturbationFamily() = default;
  double log_power_scaled(int j, double w, double lambda) const;

  double p_ = 3.0;
  double a_ = 1.0;
  double coefficient_ = 0.0;
  bool builtin_ = true;
  Power pow_p_{3.0};
  Power pow_pm1_{2.0};
  Power pow_pm2_{1.0};
  Power pow_neg_a_{-1.0};
  Fn h0_;
  Fn h1_;
  std::optional<Fn> h2_;
};

/// Free-function form of PerturbationFamily::eval.
double eval_h(int j, double z, const PerturbationFamily& family);

}  // namespace blowup
