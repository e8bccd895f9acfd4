#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blowup/csv.hpp"

namespace blowup {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double covariance = 0.0;  // cov(intercept, slope)
  double residual_rms = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Least squares of log|y| against log x. Zero values of y are rejected.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct PlaneFit {
  double c = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double residual_rms = 0.0;
};

/// Least squares y = c + b1 x1 + b2 x2.
PlaneFit fit_plane(std::span<const double> x1, std::span<const double> x2, std::span<const double> y);

std::vector<double> log_space(double lo, double hi, std::size_t n);
std::vector<double> lin_space(double lo, double hi, std::size_t n);

struct SlopeReport {
  std::string quantity;
  double s_lo = 0.0;
  double s_hi = 0.0;
  double fitted_slope = 0.0;
  double target_slope = 0.0;
  bool pass = false;
};

/// Columns quantity, s_lo, s_hi, fitted_slope, target_slope, pass.
void write_slope_reports(std::ostream& out, const std::vector<SlopeReport>& reports,
                         const CsvMeta& meta = {});

}  // namespace blowup
