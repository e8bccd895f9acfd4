#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "blowup/field.hpp"

namespace blowup {

/// h_m(y) = sum_k m!/(k!(m-2k)!) (-1)^k y^{m-2k}.
double hermite_poly(int m, double y);

/// ||h_m||^2 in L^2_rho, equal to 2^m m!.
double hermite_norm_sq(int m);

/// Gauss-Hermite rule for integrals against rho(y) = (4 pi)^{-1/2} e^{-y^2/4}.
class QuadratureRule {
 public:
  static QuadratureRule gauss_hermite(int order = 200);

  int order() const { return static_cast<int>(nodes_->size()); }
  int exact_degree() const { return 2 * order() - 1; }
  std::span<const double> nodes() const { return *nodes_; }
  std::span<const double> weights() const { return *weights_; }

  double integrate(const std::function<double(double)>& g) const;

 private:
  QuadratureRule() = default;
  std::shared_ptr<const std::vector<double>> nodes_;
  std::shared_ptr<const std::vector<double>> weights_;
};

using RealFn = std::function<double(double)>;

/// <g1, g2>_rho. When polynomial_degree >= 0 the rule must integrate that degree exactly.
double inner_product_rho(const RealFn& g1, const RealFn& g2, const QuadratureRule& rule,
                         int polynomial_degree = -1);
double inner_product_rho(const WeightedField& g1, const RealFn& g2, const QuadratureRule& rule);
double inner_product_rho(const WeightedField& g1, const WeightedField& g2, const QuadratureRule& rule);

/// k_m = h_m / ||h_m||^2 for m in {0, 1, 2}.
RealFn normalized_dual(int m);

/// Smooth step: 1 on [0, 1], 0 on [2, inf).
double cutoff_profile(double r);
double cutoff_chi(double y, double s, double K);

struct SpectralDecomposition {
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  WeightedField q_minus;
  WeightedField q_e;
  double s = 0.0;
  double K = 0.0;

  double mode(int m) const { return m == 0 ? q0 : (m == 1 ? q1 : q2); }
  /// q = q0 h0 + q1 h1 + q2 h2 + q_minus + q_e on the grid.
  WeightedField reconstruct() const;
};

/// Splits q into the modes of chi q, the remainder q_minus and the tail (1 - chi) q.
/// The grid must reach 2 K sqrt(s).
SpectralDecomposition decompose(const WeightedField& q, double K, const QuadratureRule& rule);

/// Same split for an analytic function: modes by direct quadrature, fields sampled on grid.
SpectralDecomposition decompose_function(const RealFn& g, const Grid& grid, double s, double K,
                                         const QuadratureRule& rule);

struct NormReport {
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double qminus_weighted = 0.0;
  double qe_sup = 0.0;
  double q_sup = 0.0;
};

NormReport weighted_norms(const SpectralDecomposition& dec);

/// Mode coefficients <chi q, k_m> for fields on a fixed grid, with interpolation
/// stencils to the quadrature nodes computed once.
class ModeProjector {
 public:
  ModeProjector(const Grid& grid, const QuadratureRule& rule);

  std::array<double, 3> project(std::span<const double> values, double s, double K) const;

  /// Norms of the decomposition without materializing q_minus and q_e.
  NormReport norms(std::span<const double> values, double s, double K) const;

  const Grid& grid() const { return grid_; }

 private:
  struct Node {
    CubicStencil stencil;
    double y;
    double weight;
  };
  Grid grid_;
  std::vector<Node> nodes_;
};

}  // namespace blowup
