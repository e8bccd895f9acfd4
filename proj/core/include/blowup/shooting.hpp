#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/membership.hpp"
#include "blowup/profile.hpp"
#include "blowup/selfsim.hpp"

namespace blowup {

struct Rectangle {
  double d0_lo = 0.0;
  double d0_hi = 0.0;
  double d1_lo = 0.0;
  double d1_hi = 0.0;

  std::pair<double, double> center() const { return {0.5 * (d0_lo + d0_hi), 0.5 * (d1_lo + d1_hi)}; }
  double diameter() const;
  bool contains(double d0, double d1) const;
  bool contains(const Rectangle& inner) const;
  /// Quadrants in the order (lo,lo), (hi,lo), (hi,hi), (lo,hi).
  std::array<Rectangle, 4> split() const;
  /// Point at loop parameter u in [0, 4): counter-clockwise from (d0_lo, d1_lo).
  std::pair<double, double> loop_point(double u) const;
};

/// (q0, q1)(s0) = M (d0, d1) + b, measured from three probes of the initial data.
struct AffineModeMap {
  double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;
  double b0 = 0.0, b1 = 0.0;

  std::pair<double, double> apply(double d0, double d1) const;
  std::pair<double, double> solve(double q0, double q1) const;  // inverse map
  double det() const { return a00 * a11 - a01 * a10; }
};

struct InitialRectangle {
  Rectangle rect;
  AffineModeMap map;
  double bound = 0.0;  // A / s0^{1+nu}
  double s0 = 0.0;
};

/// Preimage of [-A/s0^{1+nu}, A/s0^{1+nu}]^2 under the mode map. The map is diagonal up to
/// quadrature error by parity; the rectangle spans the preimages of the four box corners.
/// Throws DomainError when |det| is negligible.
InitialRectangle initial_rectangle(double s0, const ShrinkingSetParams& ssp, const PhiSolution& phi,
                                   const SolverConfig& config);
AffineModeMap measure_mode_map(double s0, const PhiSolution& phi, const SolverConfig& config,
                               const Grid& grid);

struct PhiSample {
  double d0 = 0.0;
  double d1 = 0.0;
  bool exited = false;
  double s_exit = 0.0;  // NaN when not exited
  Constraint constraint = Constraint::None;
  double x = 0.0;  // Phi on the unit-square boundary
  double y = 0.0;
  bool anomalous = false;  // exit through a constraint other than q0, q1
  double in_set_until = 0.0;
};

/// Phi = (s*^{1+nu}/A)(q0, q1)(s*) pushed radially onto the boundary of [-1, 1]^2.
std::pair<double, double> clamp_to_unit_square(double x, double y);

class BoundaryMap {
 public:
  virtual ~BoundaryMap() = default;
  virtual PhiSample eval(double d0, double d1) const = 0;
  virtual double s0() const = 0;
  virtual double horizon() const = 0;
};

class SelfSimilarMap final : public BoundaryMap {
 public:
  SelfSimilarMap(const PhiSolution& phi, double s0, double horizon, SolverConfig config);
  PhiSample eval(double d0, double d1) const override;
  double s0() const override { return s0_; }
  double horizon() const override { return horizon_; }
  const SolverConfig& config() const { return config_; }

 private:
  const PhiSolution* phi_;
  double s0_;
  double horizon_;
  SolverConfig config_;
  Grid grid_;
};

/// Dynamics replaced by q0' = q0, q1' = q1/2 from (q0, q1)(s0) = map(d0, d1); the exit time solves
/// |c| e^{lambda t} = A/(s0+t)^{1+nu} in closed form up to a scalar root.
class LinearTestDouble final : public BoundaryMap {
 public:
  LinearTestDouble(AffineModeMap map, double s0, ShrinkingSetParams ssp, double horizon);
  PhiSample eval(double d0, double d1) const override;
  double s0() const override { return s0_; }
  double horizon() const override { return horizon_; }
  std::pair<double, double> zero() const;

 private:
  AffineModeMap map_;
  double s0_;
  ShrinkingSetParams ssp_;
  double horizon_;
};

PhiSample map_Phi(double d0, double d1, const BoundaryMap& map);

/// Thread-safe memo of Phi evaluations keyed by the exact (d0, d1).
class PhiCache {
 public:
  explicit PhiCache(const BoundaryMap& map, int jobs = 1);

  PhiSample get(double d0, double d1);
  /// Evaluates all missing points, in parallel when jobs > 1.
  std::vector<PhiSample> get_many(const std::vector<std::pair<double, double>>& points);
  std::vector<PhiSample> all() const;
  const BoundaryMap& map() const { return *map_; }

 private:
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  Key key(double d0, double d1) const;

  const BoundaryMap* map_;
  int jobs_;
  mutable std::mutex mutex_;
  std::map<Key, PhiSample> store_;
  std::vector<Key> order_;
};

struct WindingOptions {
  int samples_per_edge = 4;
  int max_refinements = 44;  // halvings of a loop segment
};

struct WindingResult {
  int winding = 0;
  bool ok = false;
  bool no_exit = false;       // a boundary probe stayed in the set up to the horizon
  PhiSample no_exit_sample;
  bool undersampled = false;  // an angle jump above pi/2 survived all refinements
  int samples = 0;
};

WindingResult winding_number(const Rectangle& rect, PhiCache& cache, const WindingOptions& options = {});

enum class ShootTermination { Diameter, Horizon, SearchFailure, Undersampled, NoExitOnStart };

std::string to_string(ShootTermination t);

struct ShootStep {
  Rectangle rect;
  int winding = 0;
  int candidates = 0;  // children with nonzero winding
};

struct ShootOptions {
  double tol_d = 0.0;  // 0 means 1e-8/s0
  int max_levels = 60;
  int jobs = 1;
  WindingOptions winding;
};

struct ShootingResult {
  double d0 = 0.0;
  double d1 = 0.0;
  double best_in_set_until = 0.0;
  ShootTermination termination = ShootTermination::Diameter;
  std::vector<ShootStep> history;
  std::vector<PhiSample> probes;
  std::string diagnostic;

  /// Text manifest: key=value lines followed by the rectangle history.
  void write_manifest(std::ostream& out, const CsvMeta& meta = {}) const;
  /// Columns d0, d1, s_exit, exit_constraint, phi_x, phi_y.
  void write_probes_csv(std::ostream& out, const CsvMeta& meta = {}) const;
};

ShootingResult shoot(const Rectangle& start, const BoundaryMap& map, const ShootOptions& options = {});

}  // namespace blowup
