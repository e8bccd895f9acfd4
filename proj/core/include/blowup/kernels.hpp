#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/field.hpp"
#include "blowup/hermite.hpp"
#include "blowup/profile.hpp"

namespace blowup {

/// Kernel of e^{tL}: e^t / sqrt(4 pi (1 - e^{-t})) exp(-(y e^{-t/2} - x)^2 / (4 (1 - e^{-t}))).
double mehler_kernel(double t, double y, double x);

/// (e^{tL} f)(y) = e^t E[f(y e^{-t/2} + sqrt(1 - e^{-t}) Y)] with Y distributed as rho.
double apply_semigroup(double t, const std::function<double(double)>& f, double y,
                       const QuadratureRule& rule);

struct SemigroupResult {
  WeightedField field;
  /// Set when quadrature samples leave the grid while the field is not negligible there.
  bool window_warning = false;
};

SemigroupResult apply_semigroup(double t, const WeightedField& f, const QuadratureRule& rule);

struct PropagationOptions {
  double dt = 0.0;  // 0 picks MolIntegrator::rk4_limit
  bool include_potential = true;
};

/// theta(s) = K(s, sigma) psi for d_s theta = (L + V) theta, Dirichlet at |y| = L, RK4.
WeightedField propagate_K(double sigma, double s, const WeightedField& psi, const PhiSolution& phi,
                          const PropagationOptions& options = {});

/// Several initial data at once; V is evaluated once per stage for the whole batch.
std::vector<WeightedField> propagate_K_batch(double sigma, double s,
                                             std::span<const WeightedField> psi,
                                             const PhiSolution& phi,
                                             const PropagationOptions& options = {});

enum class KernelProbe { Mode0, Mode1, Mode2, MinusBump, TailBump, Zero };

std::string to_string(KernelProbe probe);

/// Probe data at time sigma: the three modes, chi^2 h_3 in the q_minus slot, a smooth
/// bump supported in K sqrt(sigma) < |y| < 2K sqrt(sigma), or zero.
WeightedField make_kernel_probe(KernelProbe probe, const Grid& grid, double sigma, double K);

enum class KernelComponent { Theta2, ThetaMinus, ThetaE };

std::string to_string(KernelComponent c);

struct KernelCheckReport {
  KernelProbe probe;
  double sigma;
  double s;
  KernelComponent component;
  double measured;
  double fixed_part;   // term without a free constant
  double bound_shape;  // factor multiplied by the fitted constant
  double fitted_C;
  bool pass;
};

struct KernelCheckOptions {
  double K = 5.0;
  double dy = 0.05;
  int samples = 4;
  int quadrature_order = 200;
};

/// Evolves every probe over [sigma, sigma + lambda], decomposes at `samples` equally spaced
/// times and fits one constant per kernel inequality over all probes.
std::vector<KernelCheckReport> verify_kernel_bounds(double sigma, double lambda,
                                                    std::span<const KernelProbe> probes,
                                                    const PhiSolution& phi,
                                                    const KernelCheckOptions& options = {});

/// Columns probe, sigma, s, component, measured, bound_shape_value, fitted_C, pass.
void write_kernel_reports(std::ostream& out, const std::vector<KernelCheckReport>& reports,
                          const CsvMeta& meta = {});

}  // namespace blowup
