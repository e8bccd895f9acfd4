#include "blowup/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "blowup/errors.hpp"
#include "blowup/mol.hpp"
#include "blowup/sources.hpp"

namespace blowup {

double mehler_kernel(double t, double y, double x) {
  if (!(t > 0.0)) throw DomainError("mehler kernel needs t > 0");
  const double v = -std::expm1(-t);
  const double d = y * std::exp(-0.5 * t) - x;
  return std::exp(t) / std::sqrt(4.0 * std::numbers::pi * v) * std::exp(-d * d / (4.0 * v));
}

double apply_semigroup(double t, const std::function<double(double)>& f, double y,
                       const QuadratureRule& rule) {
  if (!(t > 0.0)) throw DomainError("semigroup needs t > 0");
  const double shrink = std::exp(-0.5 * t);
  const double spread = std::sqrt(-std::expm1(-t));
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) sum += weights[j] * f(y * shrink + spread * nodes[j]);
  return std::exp(t) * sum;
}

SemigroupResult apply_semigroup(double t, const WeightedField& f, const QuadratureRule& rule) {
  if (!(t > 0.0)) throw DomainError("semigroup needs t > 0");
  const double shrink = std::exp(-0.5 * t);
  const double spread = std::sqrt(-std::expm1(-t));
  const double growth = std::exp(t);
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  const Grid& grid = f.grid;
  const double L = grid.half_width();

  SemigroupResult out{WeightedField::zeros(grid, f.s + t), false};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double y = grid.y(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double x = y * shrink + spread * nodes[j];
      if (std::abs(x) > L) {
        if (weights[j] > 1e-12) out.window_warning = true;
        continue;
      }
      sum += weights[j] * interpolate(f, x);
    }
    out.field.values[i] = growth * sum;
  }
  if (out.window_warning) {
    // Only a concern when the field has not decayed at the grid edge.
    const double sup = f.sup_norm();
    const std::size_t edge = std::max<std::size_t>(2, grid.size() / 20);
    double edge_max = 0.0;
    for (std::size_t i = 0; i < edge; ++i) {
      edge_max = std::max({edge_max, std::abs(f.values[i]), std::abs(f.values[grid.size() - 1 - i])});
    }
    out.window_warning = edge_max > 1e-8 * sup;
  }
  return out;
}

std::vector<WeightedField> propagate_K_batch(double sigma, double s, std::span<const WeightedField> psi,
                                             const PhiSolution& phi, const PropagationOptions& options) {
  if (!(s >= sigma)) throw DomainError("propagate_K needs s >= sigma");
  std::vector<WeightedField> out(psi.begin(), psi.end());
  if (out.empty()) return out;
  const Grid grid = out.front().grid;
  for (const auto& f : out) {
    if (!f.grid.same_as(grid)) throw std::invalid_argument("propagate_K batch needs a common grid");
  }
  for (auto& f : out) f.s = s;
  if (s == sigma) return out;

  const double limit = MolIntegrator::rk4_limit(grid);
  if (options.dt > 0.0 && options.dt > limit * (1.0 + 1e-12)) {
    throw StepSizeError("propagate_K: dt=" + std::to_string(options.dt) +
                        " violates the stability limit " + std::to_string(limit));
  }
  const double dt_max = options.dt > 0.0 ? options.dt : limit;
  const auto steps = static_cast<long>(std::ceil((s - sigma) / dt_max - 1e-9));
  const double dt = (s - sigma) / static_cast<double>(steps);

  MolIntegrator mol(grid, 1.0, BoundaryKind::Dirichlet, TimeScheme::ExplicitRK4, dt);
  ProfileSliceCache cache(grid, phi);
  MolIntegrator::Explicit explicit_part;
  if (options.include_potential) {
    explicit_part = [&cache](std::span<const double> u, double sv, std::span<double> r) {
      const auto& V = cache.at(sv).V;
      for (std::size_t i = 0; i < u.size(); ++i) r[i] = V[i] * u[i];
    };
  } else {
    explicit_part = [](std::span<const double>, double, std::span<double> r) {
      std::fill(r.begin(), r.end(), 0.0);
    };
  }
  for (long k = 0; k < steps; ++k) {
    const double sk = sigma + dt * static_cast<double>(k);
    for (auto& f : out) mol.step(f.values, sk, explicit_part);
  }
  return out;
}

WeightedField propagate_K(double sigma, double s, const WeightedField& psi, const PhiSolution& phi,
                          const PropagationOptions& options) {
  return propagate_K_batch(sigma, s, std::span<const WeightedField>(&psi, 1), phi, options).front();
}

std::string to_string(KernelProbe probe) {
  switch (probe) {
    case KernelProbe::Mode0: return "h0";
    case KernelProbe::Mode1: return "h1";
    case KernelProbe::Mode2: return "h2";
    case KernelProbe::MinusBump: return "minus_bump";
    case KernelProbe::TailBump: return "tail_bump";
    case KernelProbe::Zero: return "zero";
  }
  return "unknown";
}

std::string to_string(KernelComponent c) {
  switch (c) {
    case KernelComponent::Theta2: return "theta2";
    case KernelComponent::ThetaMinus: return "theta_minus_weighted";
    case KernelComponent::ThetaE: return "theta_e";
  }
  return "unknown";
}

WeightedField make_kernel_probe(KernelProbe probe, const Grid& grid, double sigma, double K) {
  const double R = K * std::sqrt(sigma);
  switch (probe) {
    case KernelProbe::Mode0: return WeightedField::sample(grid, sigma, [](double) { return 1.0; });
    case KernelProbe::Mode1: return WeightedField::sample(grid, sigma, [](double y) { return y; });
    case KernelProbe::Mode2: return WeightedField::sample(grid, sigma, [](double y) { return y * y - 2.0; });
    case KernelProbe::MinusBump:
      return WeightedField::sample(grid, sigma, [=](double y) {
        return cutoff_chi(y, sigma, K) * (y * y * y - 6.0 * y);
      });
    case KernelProbe::TailBump:
      return WeightedField::sample(grid, sigma, [=](double y) {
        const double r = (std::abs(y) - 1.5 * R) / (0.5 * R);
        if (std::abs(r) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - r * r));
      });
    case KernelProbe::Zero: return WeightedField::zeros(grid, sigma);
  }
  throw std::invalid_argument("unknown probe");
}

std::vector<KernelCheckReport> verify_kernel_bounds(double sigma, double lambda,
                                                    std::span<const KernelProbe> probes,
                                                    const PhiSolution& phi,
                                                    const KernelCheckOptions& options) {
  if (!(lambda > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("need sigma > 0, lambda > 0");
  if (options.samples < 1) throw std::invalid_argument("need at least one sample time");
  const double K = options.K;
  const double p = phi.params().p();
  const Grid grid = Grid::symmetric(3.0 * K * std::sqrt(sigma + lambda), options.dy);
  const QuadratureRule rule = QuadratureRule::gauss_hermite(options.quadrature_order);

  std::vector<WeightedField> fields;
  std::vector<NormReport> initial;
  for (KernelProbe pr : probes) {
    fields.push_back(make_kernel_probe(pr, grid, sigma, K));
    initial.push_back(weighted_norms(decompose(fields.back(), K, rule)));
  }

  struct Row {
    std::size_t probe;
    double s;
    KernelComponent comp;
    double measured, fixed, shape;
  };
  std::vector<Row> rows;
  double prev = sigma;
  for (int k = 1; k <= options.samples; ++k) {
    const double sk = sigma + lambda * k / options.samples;
    fields = propagate_K_batch(prev, sk, fields, phi);
    prev = sk;
    const double t = sk - sigma;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const NormReport th = weighted_norms(decompose(fields[i], K, rule));
      const NormReport& ps = initial[i];
      const double modes = ps.q0 + ps.q1 + ps.q2;
      rows.push_back({i, sk, KernelComponent::Theta2, th.q2, (sigma / sk) * (sigma / sk) * ps.q2,
                      t / sk * (modes + ps.qminus_weighted) + t * std::exp(-sk / 2.0) * ps.qe_sup});
      rows.push_back({i, sk, KernelComponent::ThetaMinus, th.qminus_weighted, 0.0,
                      std::exp(t) * (t * t + 1.0) / sk * (ps.q0 + ps.q1 + std::sqrt(sk) * ps.q2) +
                          std::exp(-t / 2.0) * ps.qminus_weighted +
                          std::exp(-t * t) / std::pow(sk, 1.5) * ps.qe_sup});
      rows.push_back({i, sk, KernelComponent::ThetaE, th.qe_sup, 0.0,
                      std::exp(t) * (ps.q0 + std::sqrt(sk) * ps.q1 + sk * ps.q2 +
                                     std::pow(sk, 1.5) * ps.qminus_weighted) +
                          std::exp(-t / p) * ps.qe_sup});
    }
  }

  double fitted[3] = {0.0, 0.0, 0.0};
  for (const Row& r : rows) {
    const double excess = r.measured - r.fixed;
    double& C = fitted[static_cast<int>(r.comp)];
    if (excess <= 0.0) continue;
    if (r.shape > 0.0) {
      C = std::max(C, excess / r.shape);
    } else if (excess > 1e-12 * (1.0 + r.fixed)) {
      C = std::numeric_limits<double>::infinity();
    }
  }

  std::vector<KernelCheckReport> reports;
  for (const Row& r : rows) {
    const double C = fitted[static_cast<int>(r.comp)];
    const bool ok = std::isfinite(C) && std::isfinite(r.measured) &&
                    r.measured <= (r.fixed + C * r.shape) * (1.0 + 1e-9) + 1e-300;
    reports.push_back({probes[r.probe], sigma, r.s, r.comp, r.measured, r.fixed, r.shape, C, ok});
  }
  return reports;
}

void write_kernel_reports(std::ostream& out, const std::vector<KernelCheckReport>& reports,
                          const CsvMeta& meta) {
  write_csv_header(out, {"probe", "sigma", "s", "component", "measured", "bound_shape_value", "fitted_C", "pass"},
                   meta);
  for (const auto& r : reports) {
    write_csv_row(out, {to_string(r.probe), format_double(r.sigma), format_double(r.s), to_string(r.component),
                        format_double(r.measured), format_double(r.fixed_part + r.fitted_C * r.bound_shape),
                        format_double(r.fitted_C), r.pass ? "true" : "false"});
  }
}

}  // namespace blowup
