#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/perturbation.hpp"
#include "blowup/profile.hpp"

namespace blowup {

/// Nodes x_i = a sinh(xi_i) with xi uniform, symmetric about 0 and ending exactly at +-half_width.
/// Spacing is about a dxi at the origin and |x| dxi far from it.
class PhysicalMesh {
 public:
  static PhysicalMesh graded(double half_width, double a, double dxi);
  static PhysicalMesh uniform(double half_width, double dx);

  std::size_t size() const { return x_.size(); }
  double x(std::size_t i) const { return x_[i]; }
  std::span<const double> nodes() const { return x_; }
  double half_width() const { return x_.back(); }
  std::size_t center() const { return x_.size() / 2; }
  double min_spacing() const;

  /// Cubic Lagrange interpolation on the four nearest nodes; clamps to the end values outside.
  double interpolate(std::span<const double> u, double x) const;
  /// Derivative of the same local cubic.
  double interpolate_derivative(std::span<const double> u, double x) const;

 private:
  std::size_t locate(double x) const;
  std::vector<double> x_;
};

/// Sum carried as hi + lo so that increments far below ulp(t) still accumulate.
struct CompensatedTime {
  double hi = 0.0;
  double lo = 0.0;

  void add(double dt);
  double value() const { return hi + lo; }
  /// this - other without cancellation.
  double minus(const CompensatedTime& other) const { return (hi - other.hi) + (lo - other.lo); }
  double minus(double t) const { return (hi - t) + lo; }
};

/// u0(x) = T^{-1/(p-1)} phi(-log T)/kappa f(z) (1 + (d0 + d1 z)/(p - 1 + (p-1)^2 z^2/(4p))),
/// z = x / sqrt(T |log T|).
double build_u0_value(double d0, double d1, double x, double T, const PhiSolution& phi);
std::vector<double> build_constructed_u0(double d0, double d1, double T, const PhiSolution& phi,
                                          const PhysicalMesh& mesh);

struct PhysicalConfig {
  double c_dt = 0.005;               // dt = c_dt / ||u||^{p-1}
  double amplification_cap = 1e6;   // stop once max|u| / max|u0| exceeds this
  double dt_floor = 1e-300;
  long max_steps = 10'000'000;
  int snapshots_per_decade = 4;      // amplification levels 10^{k/n}
  std::vector<double> snapshot_times;  // extra snapshot times, hit exactly
  std::vector<double> probe_x;       // u(x, t) recorded every step at these points
};

struct PhysicalSample {
  CompensatedTime t;
  double dt = 0.0;
  double max_u = 0.0;
  double argmax_x = 0.0;
  double u_at_0 = 0.0;
  std::vector<double> probes;
};

struct Snapshot {
  CompensatedTime t;
  double amplification = 0.0;
  bool requested = false;  // from PhysicalConfig::snapshot_times
  std::vector<double> u;
};

enum class PhysicalStop { AmplificationCap, DtFloor, MaxSteps, NonFinite };

std::string to_string(PhysicalStop s);

struct PhysicalRun {
  PhysicalMesh mesh;
  double p = 3.0;
  double initial_max = 0.0;
  PhysicalConfig config;
  std::vector<PhysicalSample> samples;
  std::vector<Snapshot> snapshots;
  PhysicalStop stop = PhysicalStop::AmplificationCap;
  std::string message;

  double amplification() const { return samples.empty() ? 1.0 : samples.back().max_u / initial_max; }
  /// Snapshot closest to the requested time, or nullptr.
  const Snapshot* snapshot_at(double t) const;

  /// Columns t, dt, max_u, argmax_x, u_at_0.
  void write_csv(std::ostream& out, const CsvMeta& meta = {}) const;
  /// Columns x, u.
  static void write_snapshot_csv(std::ostream& out, const PhysicalMesh& mesh, const Snapshot& snap,
                                 const CsvMeta& meta = {});
};

/// u_t = u_xx + |u|^{p-1} u + h(u) on the mesh with Neumann ends. Strang splitting:
/// RK4 reaction half steps around a Richardson-extrapolated backward Euler diffusion step.
PhysicalRun evolve_physical(std::vector<double> u0, const PhysicalMesh& mesh, const ProblemParams& params,
                            const PerturbationFamily& family, const PhysicalConfig& config = {});

struct BlowupEstimate {
  double T = 0.0;          // t_ref + delta
  double t_ref = 0.0;      // time of the last sample
  double delta = 0.0;      // T - t_ref, resolved below ulp(T)
  double slope = 0.0;      // of ||u||^{-(p-1)} against t, about -(p-1)
  double delta_stderr = 0.0;
  double relative_residual = 0.0;
  bool reliable = true;
  std::size_t points = 0;
};

/// Linear fit of ||u||^{-(p-1)} against t over the last decade of amplification.
BlowupEstimate estimate_T(const PhysicalRun& run, double decade = 10.0);
/// Same fit on explicit series; t is relative to t_ref.
BlowupEstimate estimate_T_series(std::span<const double> t_rel, std::span<const double> max_u, double p,
                                 double t_ref = 0.0);

/// T for the flat solution of u' = u^p from u(0) = c.
double flat_blowup_time(double c, double p);

struct ProfileErrorSample {
  double t = 0.0;
  double tau = 0.0;  // T - t
  double amplification = 0.0;
  double e0 = 0.0;   // sup |g - f| over |z| <= z_max
  double e1 = 0.0;   // sup |g' - d/dxi f(xi/sqrt|log tau|)|
};

struct ProfileErrorSeries {
  std::vector<ProfileErrorSample> samples;
  double fitted_exponent = 0.0;  // e0 ~ |log tau|^{-exponent}
};

/// g(xi) = tau^{1/(p-1)} u(xi sqrt(tau), t) against f(xi / sqrt|log tau|) on |z| <= z_max.
ProfileErrorSeries check_intermediate_profile(const PhysicalRun& run, const BlowupEstimate& T,
                                              const ProblemParams& params, double z_max = 2.0);

struct TOfX0 {
  double t = 0.0;
  double tau = 0.0;  // T - t(x0)
  double residual = 0.0;
};

/// Root of |x0| = K0 sqrt(tau |log tau|) with tau = T - t in (0, 1/e).
TOfX0 solve_t_of_x0(double x0, double T, double K0);

/// kappa (1 - tau + (p-1) K0^2/(4p))^{-1/(p-1)}.
double f_hat(double tau, double K0, const ProblemParams& params);

/// (8p |log|x|| / ((p-1)^2 x^2))^{1/(p-1)}.
double final_profile_theory(double x, double p);

struct FinalProfilePoint {
  double x = 0.0;
  double u_star = 0.0;
  double theory = 0.0;
  double ratio = 0.0;
  double drift = 0.0;  // relative change between the last two snapshots
};

struct VTransformReport {
  double x0 = 0.0;
  double t_x0 = 0.0;
  double eps_start = 0.0;  // sup over |xi| <= xi_max of |v(x0, xi, 0) - f(K0)|
  double eps_track = 0.0;  // sup over recorded tau of |v(x0, 0, tau) - f_hat(tau)|
  double tau_max = 0.0;
};

struct FinalProfileReport {
  std::vector<FinalProfilePoint> points;
  std::vector<VTransformReport> v_checks;
  bool extrapolation_warning = false;

  /// Columns x, u_star, theory, ratio.
  void write_csv(std::ostream& out, const CsvMeta& meta = {}) const;
};

struct FinalProfileOptions {
  double x_lo = 1e-3;
  double x_hi = 1e-2;
  int points_per_side = 21;
  double K0 = 3.0;
  double xi_max = 0.5;
  double tau_track = 0.9;
};

/// u*(x) from the last two snapshots extrapolated linearly to T; v-transform checks for every
/// probe point of the run that has a requested snapshot at t(x0).
FinalProfileReport extract_final_profile(const PhysicalRun& run, const BlowupEstimate& T,
                                         const ProblemParams& params, const FinalProfileOptions& options = {});

}  // namespace blowup
