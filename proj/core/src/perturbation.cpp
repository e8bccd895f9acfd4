#include "blowup/perturbation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "blowup/numeric.hpp"

namespace blowup {

namespace {

// For z = e^lambda w and E = 2 + z^2: L = log E, u = z^2/E, v = 2/E.
struct LogTerms {
  double L;
  double u;
  double v;
};

LogTerms log_terms(double lambda, double w) {
  const double t = 2.0 * (lambda + std::log(std::abs(w)));
  if (t > 0.0) {
    const double e = std::exp(-t);
    const double d = 1.0 + 2.0 * e;
    return {t + std::log1p(2.0 * e), 1.0 / d, 2.0 * e / d};
  }
  const double e = std::exp(t);
  const double d = 2.0 + e;
  return {std::log(d), e / d, 2.0 / d};
}

void check_order(int j) {
  if (j < 0 || j > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
}

}  // namespace

PerturbationFamily PerturbationFamily::for_params(const ProblemParams& params) {
  if (params.perturbation_case() == PerturbationCase::ExplicitLog) {
    return log_power(params.p(), params.a(), params.mu());
  }
  const double p = params.p();
  const double a = params.a();
  return log_power(p, a, params.M() / (p + 2.0 * a / std::numbers::ln2));
}

PerturbationFamily PerturbationFamily::log_power(double p, double a, double coefficient) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  PerturbationFamily f;
  f.p_ = p;
  f.a_ = a;
  f.coefficient_ = coefficient;
  f.builtin_ = true;
  f.pow_p_ = Power(p);
  f.pow_pm1_ = Power(p - 1.0);
  f.pow_pm2_ = Power(p - 2.0);
  f.pow_neg_a_ = Power(-a);
  return f;
}

PerturbationFamily PerturbationFamily::custom(double p, Fn h, Fn h_prime, std::optional<Fn> h_second) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!h || !h_prime) throw std::invalid_argument("custom family needs h and h'");
  PerturbationFamily f;
  f.p_ = p;
  f.a_ = 0.0;
  f.coefficient_ = std::numeric_limits<double>::quiet_NaN();
  f.builtin_ = false;
  f.h0_ = std::move(h);
  f.h1_ = std::move(h_prime);
  f.h2_ = std::move(h_second);
  return f;
}

double PerturbationFamily::log_power_scaled(int j, double w, double lambda) const {
  if (w == 0.0 || coefficient_ == 0.0) return 0.0;
  const double p = p_;
  const double a = a_;
  const LogTerms lt = log_terms(lambda, w);
  const double La = pow_neg_a_(lt.L);
  const double aw = std::abs(w);
  const double r = p - 2.0 * a * lt.u / lt.L;
  switch (j) {
    case 0:
      return coefficient_ * sign(w) * pow_p_(aw) * La;
    case 1:
      return coefficient_ * pow_pm1_(aw) * La * r;
    default: {
      const double bracket = (p - 1.0) * r - 2.0 * a * lt.u * r / lt.L -
                             2.0 * a * (2.0 * lt.u * lt.v / lt.L - 2.0 * lt.u * lt.u / (lt.L * lt.L));
      return coefficient_ * sign(w) * pow_pm2_(aw) * La * bracket;
    }
  }
}

double PerturbationFamily::eval(int j, double z) const {
  check_order(j);
  if (builtin_) return log_power_scaled(j, z, 0.0);
  if (j == 0) return h0_(z);
  if (j == 1) return h1_(z);
  if (!h2_) throw std::invalid_argument("h'' requested from a family without a second derivative");
  return (*h2_)(z);
}

double PerturbationFamily::scaled(int j, double w, double s) const {
  check_order(j);
  const double lambda = s / (p_ - 1.0);
  if (builtin_) return log_power_scaled(j, w, lambda);
  return std::exp(-(p_ - j) * lambda) * eval(j, std::exp(lambda) * w);
}

double eval_h(int j, double z, const PerturbationFamily& family) { return family.eval(j, z); }

}  // namespace blowup
