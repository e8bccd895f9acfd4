#include "blowup/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blowup/errors.hpp"

namespace blowup {

std::string to_string(PerturbationCase c) {
  return c == PerturbationCase::LogBounded ? "log_bounded" : "explicit_log";
}

PerturbationCase perturbation_case_from_string(const std::string& name) {
  if (name == "log_bounded" || name == "LogBounded") return PerturbationCase::LogBounded;
  if (name == "explicit_log" || name == "ExplicitLog") return PerturbationCase::ExplicitLog;
  throw std::invalid_argument("unknown perturbation case '" + name +
                              "' (expected log_bounded or explicit_log)");
}

SolverBlowUp::SolverBlowUp(double s, double y, const std::string& what_prefix)
    : std::runtime_error(what_prefix + " at s=" + std::to_string(s) +
                         ", y=" + std::to_string(y)),
      s_(s),
      y_(y) {}

ProblemParams ProblemParams::make(double p, PerturbationCase perturbation_case, double a,
                                  double mu, double M, std::optional<double> varrho) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must satisfy p > 1");
  const bool bounded = perturbation_case == PerturbationCase::LogBounded;
  if (bounded) {
    if (!(a > 1.0)) throw std::invalid_argument("log_bounded case requires a > 1");
    if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("log_bounded case requires M > 0");
  } else {
    if (!(a > 0.0)) throw std::invalid_argument("explicit_log case requires a > 0");
    if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");
  }
  if (!std::isfinite(a)) throw std::invalid_argument("a must be finite");

  ProblemParams r;
  r.p_ = p;
  r.case_ = perturbation_case;
  r.a_ = a;
  r.mu_ = mu;
  r.M_ = M;
  r.kappa_ = std::pow(p - 1.0, -1.0 / (p - 1.0));
  r.c_p_ = (p - 1.0) / (4.0 * p);
  r.nu_ = bounded ? std::min(a - 1.0, 0.5) : std::min(a, 0.5);
  r.varrho_ = varrho.value_or(0.9 * r.nu_);
  if (!(r.varrho_ > 0.0 && r.varrho_ < r.nu_)) {
    throw std::invalid_argument("varrho must lie in (0, nu) with nu = " + std::to_string(r.nu_));
  }
  r.iota_ = bounded ? 0.0 : 1.0;
  r.p_prime_ = std::min(p, 2.0);
  r.a_prime_ = std::min(a, 1.0);
  r.a_bar_ = bounded ? std::min(a - 1.0, 1.0) : std::min(a, 1.0);
  r.beta_ = bounded ? 1.0 : 2.0;
  return r;
}

ProblemParams ProblemParams::explicit_log(double p, double a, double mu,
                                          std::optional<double> varrho) {
  return make(p, PerturbationCase::ExplicitLog, a, mu, 1.0, varrho);
}

ProblemParams ProblemParams::log_bounded(double p, double a, double M,
                                         std::optional<double> varrho) {
  return make(p, PerturbationCase::LogBounded, a, 0.0, M, varrho);
}

}  // namespace blowup
