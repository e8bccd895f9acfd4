#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/field.hpp"
#include "blowup/hermite.hpp"
#include "blowup/membership.hpp"
#include "blowup/mol.hpp"
#include "blowup/profile.hpp"
#include "blowup/sources.hpp"

namespace blowup {

/// Which terms of the q equation are active; tests switch some off.
struct SourceMask {
  bool V = true;
  bool B = true;
  bool R = true;
  bool N = true;
};

struct SolverConfig {
  double half_width = 0.0;  // 0 means 3 K sqrt(s_end)
  double dy = 0.05;
  double dt = 0.0;          // 0 means rk4_limit for RK4, 0.01 for IMEX
  TimeScheme scheme = TimeScheme::ExplicitRK4;
  double K = 5.0;
  double A = 20.0;
  double record_every = 0.1;
  bool stop_on_exit = true;
  int quadrature_order = 200;
  bool store_fields = false;
  SourceMask sources;

  Grid make_grid(double s_end) const;
  /// Step actually used: the requested one, shrunk so record_every is a whole number of steps.
  double effective_dt(const Grid& grid) const;
};

/// q(y, s0) = phi(s0)/kappa (f(z)^p (d0 + d1 z) - kappa/(2 p s0)), z = y/sqrt(s0).
WeightedField make_initial_data(double d0, double d1, double s0, const PhiSolution& phi,
                                const Grid& grid);
double initial_data_value(double d0, double d1, double y, double s0, const PhiSolution& phi);

struct TrajectorySample {
  double s = 0.0;
  NormReport norms;
  double signed_q[3] = {0.0, 0.0, 0.0};
  double grad_sup = 0.0;
  MembershipReport membership;
};

enum class Termination { Horizon, Exit, SolverBlowUp };

std::string to_string(Termination t);

struct ExitInfo {
  bool exited = false;
  double s_exit = 0.0;
  Constraint constraint = Constraint::None;
  double q0 = 0.0;  // modes interpolated to s_exit
  double q1 = 0.0;
  bool at_start = false;
};

struct TrajectoryRecord {
  double d0 = 0.0;
  double d1 = 0.0;
  double s0 = 0.0;
  double s_end = 0.0;
  SolverConfig config;
  double dt_used = 0.0;
  Grid grid;
  std::vector<TrajectorySample> samples;
  std::vector<WeightedField> fields;  // parallel to samples when config.store_fields
  Termination termination = Termination::Horizon;
  ExitInfo exit;
  std::string blowup_message;

  /// Last time at which the trajectory was known to be in the shrinking set.
  double in_set_until() const;
  SpectralDecomposition decomposition(std::size_t k) const;

  /// Columns s, q0, q1, q2, norm_qminus_weighted, norm_qe, norm_q, norm_grad_q, in_VA, exit_flag.
  void write_csv(std::ostream& out, const CsvMeta& meta = {}) const;
};

/// One step of the q equation with the configured scheme; throws SolverBlowUp on non-finite values.
class QStepper {
 public:
  QStepper(const Grid& grid, const PhiSolution& phi, TimeScheme scheme, double dt,
           SourceMask mask = {});
  QStepper(const QStepper&) = delete;
  QStepper& operator=(const QStepper&) = delete;

  void step(std::vector<double>& q, double s);
  double dt() const { return mol_.dt(); }

 private:
  void explicit_part(std::span<const double> q, double s, std::span<double> out);

  const PhiSolution* phi_;
  SourceMask mask_;
  ProfileSliceCache cache_;
  MolIntegrator mol_;
  MolIntegrator::Explicit fn_;
};

/// Single RK4 step of size dt from s.
WeightedField step_q(const WeightedField& q, double dt, const PhiSolution& phi, SourceMask mask = {});

TrajectoryRecord evolve(double d0, double d1, double s0, double s_end, const PhiSolution& phi,
                        const SolverConfig& config);
/// Same, from arbitrary initial data.
TrajectoryRecord evolve_field(const WeightedField& q0, double s_end, const PhiSolution& phi,
                              const SolverConfig& config);

struct WTrajectory {
  Grid grid;
  double dt_used = 0.0;
  std::vector<double> s;
  std::vector<WeightedField> fields;
};

/// Full self-similar unknown: w_s = (Delta - y/2 d/dy - 1/(p-1)) w + |w|^{p-1} w + H(w, s),
/// with the outflow boundary. Fields are recorded every config.record_every.
WTrajectory evolve_w(const WeightedField& w0, double s_end, const PhiSolution& phi,
                     const SolverConfig& config);

ModeResidualSeries mode_ode_residuals(const TrajectoryRecord& traj);

}  // namespace blowup
