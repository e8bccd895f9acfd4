#pragma once

#include <array>
#include <span>
#include <vector>

#include "blowup/field.hpp"
#include "blowup/fitting.hpp"
#include "blowup/profile.hpp"

namespace blowup {

// Coefficients of q_s = (L + V) q + B(q) + R + N(q), L = Delta - (y/2) d/dy + 1.

double eval_V(double y, double s, const PhiSolution& phi);
double eval_B(double q, double y, double s, const PhiSolution& phi);
double eval_R(double y, double s, const PhiSolution& phi);
double eval_N(double q, double y, double s, const PhiSolution& phi);

/// |varphi + q|^{p-1}(varphi + q) - varphi^p - p varphi^{p-1} q for varphi > 0,
/// evaluated without cancellation when |q| << varphi.
double nonlinear_remainder(double q, double varphi, double p);

/// R = (phi/kappa) Q + G with theta = f(y/sqrt tau) + kappa/(2 p tau).
double eval_Q(double y, double tau, const ProblemParams& params);
double eval_G(double y, double tau, const PhiSolution& phi);

struct QSourceBundle {
  double V;
  double B;
  double R;
  double N;
};

QSourceBundle eval_sources(double q, double y, double s, const PhiSolution& phi);

/// Profile-dependent coefficients on a whole grid at one time.
struct ProfileSlice {
  double s = 0.0;
  std::vector<double> varphi;
  std::vector<double> V;
  std::vector<double> R;
  std::vector<double> H0;  // scaled h(varphi), empty when h = 0
  std::vector<double> H1;  // scaled h'(varphi), empty when iota = 0 or h = 0
};

/// Pointwise and vectorized evaluation sharing one code path.
class SourceEvaluator {
 public:
  explicit SourceEvaluator(const PhiSolution& phi);

  struct TimeScalars {
    double s;
    double scale;   // phi/kappa
    double dscale;  // phi'/kappa
    double rs;      // sqrt(s)
    double corr;    // kappa/(2ps)
  };

  struct PointValues {
    double varphi;
    double V;
    double R;
    double H0;
    double H1;
  };

  TimeScalars at(double s) const;
  PointValues point(const TimeScalars& t, double y) const;
  void fill(const Grid& grid, double s, ProfileSlice& out) const;

  double B(double q, double varphi) const;
  double N(double q, double varphi, double H0, double H1, double s) const;

  const PhiSolution& phi() const { return *phi_; }
  bool h_zero() const { return h_zero_; }
  double iota() const { return iota_; }

 private:
  const PhiSolution* phi_;
  ProfileShape shape_;
  Power pow_pm1_;
  double p_;
  double kappa_;
  double iota_;
  bool h_zero_;
  int odd_integer_p_ = 0;  // p when p is an odd integer <= 9, else 0
};

/// Small ring of recently filled slices, keyed by exact s. Stage times of a time step
/// repeat across fields and steps, so a few entries suffice.
class ProfileSliceCache {
 public:
  ProfileSliceCache(const Grid& grid, const PhiSolution& phi);

  const ProfileSlice& at(double s);
  const SourceEvaluator& evaluator() const { return ev_; }

 private:
  struct Entry {
    double s = 0.0;
    bool valid = false;
    ProfileSlice slice;
  };
  Grid grid_;
  SourceEvaluator ev_;
  std::array<Entry, 4> entries_;
  std::size_t next_ = 0;
};

struct ModeResidualSeries {
  std::vector<double> s;
  std::array<std::vector<double>, 3> residual;
  std::array<double, 3> fitted_slope{};  // log-log slope of |r_m|, NaN if not fittable
};

/// r_m = q_m' - (1 - m/2) q_m for m = 0, 1 and r_2 = q_2' + (2/s) q_2, with five-point
/// centered differences on a uniform s series.
ModeResidualSeries mode_ode_residuals(std::span<const double> s, std::span<const double> q0,
                                      std::span<const double> q1, std::span<const double> q2);

}  // namespace blowup
