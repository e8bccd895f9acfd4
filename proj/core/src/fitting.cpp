#include "blowup/fitting.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "blowup/errors.hpp"

namespace blowup {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (n < 2) throw InsufficientDataError("fit_line needs at least 2 points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("fit_line: abscissae are all equal");
  LineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / static_cast<double>(n));
  if (n > 2) {
    const double sigma2 = ss / static_cast<double>(n - 2);
    f.slope_stderr = std::sqrt(sigma2 / sxx);
    f.intercept_stderr = std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    f.covariance = -mx * sigma2 / sxx;
  }
  return f;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw std::invalid_argument("fit_loglog: abscissae must be positive");
    if (y[i] == 0.0 || !std::isfinite(y[i])) throw std::invalid_argument("fit_loglog: zero or non-finite value");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::abs(y[i]));
  }
  return fit_line(lx, ly);
}

PlaneFit fit_plane(std::span<const double> x1, std::span<const double> x2, std::span<const double> y) {
  const std::size_t n = y.size();
  if (x1.size() != n || x2.size() != n) throw std::invalid_argument("fit_plane: size mismatch");
  if (n < 3) throw InsufficientDataError("fit_plane needs at least 3 points");
  // Centered normal equations.
  double m1 = 0.0, m2 = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += x1[i];
    m2 += x2[i];
    my += y[i];
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, s1y = 0.0, s2y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x1[i] - m1;
    const double b = x2[i] - m2;
    const double c = y[i] - my;
    s11 += a * a;
    s12 += a * b;
    s22 += b * b;
    s1y += a * c;
    s2y += b * c;
  }
  const double det = s11 * s22 - s12 * s12;
  if (std::abs(det) <= 1e-14 * s11 * s22) throw InsufficientDataError("fit_plane: degenerate design");
  PlaneFit f;
  f.b1 = (s22 * s1y - s12 * s2y) / det;
  f.b2 = (s11 * s2y - s12 * s1y) / det;
  f.c = my - f.b1 * m1 - f.b2 * m2;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.c - f.b1 * x1[i] - f.b2 * x2[i];
    ss += r * r;
  }
  f.residual_rms = std::sqrt(ss / static_cast<double>(n));
  return f;
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > 0.0) || n < 2) throw std::invalid_argument("log_space needs positive bounds, n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> lin_space(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("lin_space needs n >= 2");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

void write_slope_reports(std::ostream& out, const std::vector<SlopeReport>& reports, const CsvMeta& meta) {
  write_csv_header(out, {"quantity", "s_lo", "s_hi", "fitted_slope", "target_slope", "pass"}, meta);
  for (const auto& r : reports) {
    write_csv_row(out, {r.quantity, format_double(r.s_lo), format_double(r.s_hi),
                        format_double(r.fitted_slope), format_double(r.target_slope),
                        r.pass ? "true" : "false"});
  }
}

}  // namespace blowup
