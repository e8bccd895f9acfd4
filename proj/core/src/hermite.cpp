#include "blowup/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {

double hermite_poly(int m, double y) {
  if (m < 0) throw std::invalid_argument("hermite index must be >= 0");
  double coeff = 1.0;
  double sum = 0.0;
  for (int k = 0; 2 * k <= m; ++k) {
    sum += coeff * std::pow(y, m - 2 * k);
    coeff *= -static_cast<double>((m - 2 * k) * (m - 2 * k - 1)) / (k + 1);
  }
  return sum;
}

double hermite_norm_sq(int m) {
  double r = 1.0;
  for (int i = 1; i <= m; ++i) r *= 2.0 * i;
  return r;
}

namespace {

// Orthonormal Hermite recurrence (weight e^{-t^2}) without the Gaussian factor.
// Returns p_n(z) and sets deriv to p_n'(z).
double hermite_orthonormal(int n, double z, double& deriv) {
  double p1 = std::pow(std::numbers::pi, -0.25);
  double p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
  }
  deriv = std::sqrt(2.0 * n) * p2;
  return p1;
}

// Roots are bracketed by a sign scan on [0, sqrt(2n+1) + 1], then polished by Newton.
// Asymptotic initial guesses with plain Newton jump between roots once n is in the hundreds.
void gauss_hermite_raw(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double top = std::sqrt(2.0 * n + 1.0) + 1.0;
  const int cells = 100 * n;
  const double h = top / cells;
  std::vector<double> roots;
  double d = 0.0;
  double prev_z = n % 2 == 1 ? h * 0.5 : 0.0;
  double prev_v = hermite_orthonormal(n, prev_z, d);
  if (n % 2 == 1) roots.push_back(0.0);
  for (int c = 1; c <= cells && static_cast<int>(roots.size()) < (n + 1) / 2; ++c) {
    const double z = c * h;
    const double v = hermite_orthonormal(n, z, d);
    if ((v < 0.0) != (prev_v < 0.0)) {
      double lo = prev_z;
      double hi = z;
      double flo = prev_v;
      for (int it = 0; it < 60 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = hermite_orthonormal(n, mid, d);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double r = 0.5 * (lo + hi);
      for (int it = 0; it < 3; ++it) {
        const double f = hermite_orthonormal(n, r, d);
        const double next = r - f / d;
        if (next <= lo || next >= hi) break;
        r = next;
      }
      roots.push_back(r);
    }
    prev_z = z;
    prev_v = v;
  }
  if (static_cast<int>(roots.size()) != (n + 1) / 2) {
    throw ConvergenceError("Gauss-Hermite root scan found " + std::to_string(roots.size()) + " of " +
                           std::to_string((n + 1) / 2) + " roots");
  }
  // roots ascend from 0; x descends from the largest root like the classic routine.
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    const double z = roots[m - 1 - i];
    hermite_orthonormal(n, z, d);
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (d * d);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

QuadratureRule QuadratureRule::gauss_hermite(int order) {
  if (order < 1 || order > 400) throw std::invalid_argument("quadrature order must be in [1, 400]");
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  std::vector<double> t;
  std::vector<double> w;
  gauss_hermite_raw(order, t, w);
  // y = 2t turns e^{-t^2} dt / sqrt(pi) into rho(y) dy.
  auto nodes = std::make_shared<std::vector<double>>(order);
  auto weights = std::make_shared<std::vector<double>>(order);
  for (int i = 0; i < order; ++i) {
    (*nodes)[i] = 2.0 * t[order - 1 - i];
    (*weights)[i] = w[order - 1 - i] / std::sqrt(std::numbers::pi);
  }
  QuadratureRule rule;
  rule.nodes_ = std::move(nodes);
  rule.weights_ = std::move(weights);
  cache.emplace(order, rule);
  return rule;
}

double QuadratureRule::integrate(const std::function<double(double)>& g) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes_->size(); ++i) sum += (*weights_)[i] * g((*nodes_)[i]);
  return sum;
}

double inner_product_rho(const RealFn& g1, const RealFn& g2, const QuadratureRule& rule,
                         int polynomial_degree) {
  if (polynomial_degree > rule.exact_degree()) {
    throw std::invalid_argument("quadrature order " + std::to_string(rule.order()) +
                                " integrates degree <= " + std::to_string(rule.exact_degree()) +
                                ", requested " + std::to_string(polynomial_degree));
  }
  return rule.integrate([&](double y) { return g1(y) * g2(y); });
}

double inner_product_rho(const WeightedField& g1, const RealFn& g2, const QuadratureRule& rule) {
  return rule.integrate([&](double y) { return interpolate(g1, y) * g2(y); });
}

double inner_product_rho(const WeightedField& g1, const WeightedField& g2, const QuadratureRule& rule) {
  return rule.integrate([&](double y) { return interpolate(g1, y) * interpolate(g2, y); });
}

RealFn normalized_dual(int m) {
  if (m < 0 || m > 2) throw std::invalid_argument("normalized_dual defined for m in {0,1,2}");
  switch (m) {
    case 0:
      return [](double) { return 1.0; };
    case 1:
      return [](double y) { return y / 2.0; };
    default:
      return [](double y) { return (y * y - 2.0) / 8.0; };
  }
}

double cutoff_profile(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - r));
  const double b = std::exp(-1.0 / (r - 1.0));
  return a / (a + b);
}

double cutoff_chi(double y, double s, double K) {
  if (!(s > 0.0) || !(K > 0.0)) throw std::invalid_argument("cutoff needs s > 0 and K > 0");
  return cutoff_profile(std::abs(y) / (K * std::sqrt(s)));
}

namespace {

inline double h_mode(int m, double y) { return m == 0 ? 1.0 : (m == 1 ? y : y * y - 2.0); }
constexpr double kDualNorm[3] = {1.0, 0.5, 0.125};

void check_grid_reach(const Grid& grid, double s, double K) {
  const double need = 2.0 * K * std::sqrt(s);
  if (grid.half_width() < need * (1.0 - 1e-12)) {
    throw DomainError("grid half-width " + std::to_string(grid.half_width()) +
                      " does not reach 2K sqrt(s) = " + std::to_string(need));
  }
}

SpectralDecomposition assemble(const Grid& grid, std::span<const double> q, double s, double K,
                               const std::array<double, 3>& modes) {
  SpectralDecomposition dec;
  dec.q0 = modes[0];
  dec.q1 = modes[1];
  dec.q2 = modes[2];
  dec.s = s;
  dec.K = K;
  dec.q_minus = WeightedField::zeros(grid, s);
  dec.q_e = WeightedField::zeros(grid, s);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = grid.y(i);
    const double chi = cutoff_chi(y, s, K);
    dec.q_minus.values[i] = chi * q[i] - (dec.q0 + dec.q1 * y + dec.q2 * (y * y - 2.0));
    dec.q_e.values[i] = (1.0 - chi) * q[i];
  }
  return dec;
}

}  // namespace

WeightedField SpectralDecomposition::reconstruct() const {
  WeightedField out = WeightedField::zeros(q_minus.grid, s);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double y = out.grid.y(i);
    out.values[i] = q0 + q1 * y + q2 * (y * y - 2.0) + q_minus.values[i] + q_e.values[i];
  }
  return out;
}

ModeProjector::ModeProjector(const Grid& grid, const QuadratureRule& rule) : grid_(grid) {
  const auto y = rule.nodes();
  const auto w = rule.weights();
  for (std::size_t j = 0; j < y.size(); ++j) {
    CubicStencil st = cubic_stencil(grid, y[j]);
    if (st.inside && w[j] > 0.0) nodes_.push_back({st, y[j], w[j]});
  }
}

std::array<double, 3> ModeProjector::project(std::span<const double> values, double s, double K) const {
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  const double inner = K * std::sqrt(s);
  for (const Node& nd : nodes_) {
    const double* v = values.data() + nd.stencil.base;
    double q = nd.stencil.w[0] * v[0] + nd.stencil.w[1] * v[1] + nd.stencil.w[2] * v[2] +
               nd.stencil.w[3] * v[3];
    if (std::abs(nd.y) > inner) q *= cutoff_profile(std::abs(nd.y) / inner);
    const double wq = nd.weight * q;
    for (int m = 0; m < 3; ++m) acc[m] += wq * h_mode(m, nd.y) * kDualNorm[m];
  }
  return acc;
}

NormReport ModeProjector::norms(std::span<const double> values, double s, double K) const {
  const auto modes = project(values, s, K);
  NormReport r;
  r.q0 = std::abs(modes[0]);
  r.q1 = std::abs(modes[1]);
  r.q2 = std::abs(modes[2]);
  const double inner = K * std::sqrt(s);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const double y = grid_.y(i);
    const double ay = std::abs(y);
    const double chi = ay > inner ? cutoff_profile(ay / inner) : 1.0;
    const double q = values[i];
    const double qm = chi * q - (modes[0] + modes[1] * y + modes[2] * (y * y - 2.0));
    r.qminus_weighted = std::max(r.qminus_weighted, std::abs(qm) / (1.0 + ay * ay * ay));
    r.qe_sup = std::max(r.qe_sup, std::abs((1.0 - chi) * q));
    r.q_sup = std::max(r.q_sup, std::abs(q));
  }
  return r;
}

SpectralDecomposition decompose(const WeightedField& q, double K, const QuadratureRule& rule) {
  const double s = q.s;
  if (!(s > 0.0)) throw DomainError("decompose needs s > 0");
  check_grid_reach(q.grid, s, K);
  const ModeProjector proj(q.grid, rule);
  return assemble(q.grid, q.values, s, K, proj.project(q.values, s, K));
}

SpectralDecomposition decompose_function(const RealFn& g, const Grid& grid, double s, double K,
                                         const QuadratureRule& rule) {
  if (!(s > 0.0)) throw DomainError("decompose needs s > 0");
  check_grid_reach(grid, s, K);
  std::array<double, 3> modes{};
  for (int m = 0; m < 3; ++m) {
    modes[m] = rule.integrate([&](double y) {
      return cutoff_chi(y, s, K) * g(y) * h_mode(m, y) * kDualNorm[m];
    });
  }
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = g(grid.y(i));
  return assemble(grid, values, s, K, modes);
}

NormReport weighted_norms(const SpectralDecomposition& dec) {
  NormReport r;
  r.q0 = std::abs(dec.q0);
  r.q1 = std::abs(dec.q1);
  r.q2 = std::abs(dec.q2);
  const Grid& grid = dec.q_minus.grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = grid.y(i);
    const double ay = std::abs(y);
    const double qm = dec.q_minus.values[i];
    r.qminus_weighted = std::max(r.qminus_weighted, std::abs(qm) / (1.0 + ay * ay * ay));
    r.qe_sup = std::max(r.qe_sup, std::abs(dec.q_e.values[i]));
    const double q = dec.q0 + dec.q1 * y + dec.q2 * (y * y - 2.0) + qm + dec.q_e.values[i];
    r.q_sup = std::max(r.q_sup, std::abs(q));
  }
  return r;
}

}  // namespace blowup
