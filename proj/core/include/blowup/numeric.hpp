#pragma once

#include <cmath>

namespace blowup {

inline double sign(double x) { return static_cast<double>((x > 0) - (x < 0)); }

/// x^e for x >= 0. Exponents that are multiples of 1/2 with |2e| <= 16 take a
/// multiply/sqrt path, which is several times faster than std::pow.
class Power {
 public:
  explicit Power(double exponent) : e_(exponent) {
    const double twice = std::round(2.0 * exponent);
    if (std::abs(2.0 * exponent - twice) < 1e-14 && std::abs(twice) <= 16.0) {
      fast_ = true;
      twice_ = static_cast<int>(twice);
    }
  }

  double operator()(double x) const {
    if (!fast_) return std::pow(x, e_);
    const int n = twice_ < 0 ? -twice_ : twice_;
    double r = (n % 2 != 0) ? std::sqrt(x) : 1.0;
    for (int i = 0; i < n / 2; ++i) r *= x;
    return twice_ < 0 ? 1.0 / r : r;
  }

  double exponent() const { return e_; }

 private:
  double e_;
  bool fast_ = false;
  int twice_ = 0;
};

/// sign(x)|x|^e.
inline double signed_pow(double x, double e) {
  return std::copysign(std::pow(std::abs(x), e), x);
}

}  // namespace blowup
