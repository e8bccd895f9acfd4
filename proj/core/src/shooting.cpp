#include "blowup/shooting.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "blowup/errors.hpp"

namespace blowup {

double Rectangle::diameter() const { return std::hypot(d0_hi - d0_lo, d1_hi - d1_lo); }

bool Rectangle::contains(double d0, double d1) const {
  return d0 >= d0_lo && d0 <= d0_hi && d1 >= d1_lo && d1 <= d1_hi;
}

bool Rectangle::contains(const Rectangle& inner) const {
  return inner.d0_lo >= d0_lo && inner.d0_hi <= d0_hi && inner.d1_lo >= d1_lo && inner.d1_hi <= d1_hi;
}

std::array<Rectangle, 4> Rectangle::split() const {
  const auto [c0, c1] = center();
  return {{{d0_lo, c0, d1_lo, c1}, {c0, d0_hi, d1_lo, c1}, {c0, d0_hi, c1, d1_hi}, {d0_lo, c0, c1, d1_hi}}};
}

std::pair<double, double> Rectangle::loop_point(double u) const {
  const int edge = std::clamp(static_cast<int>(std::floor(u)), 0, 3);
  const double t = u - edge;
  switch (edge) {
    case 0: return {d0_lo * (1.0 - t) + d0_hi * t, d1_lo};
    case 1: return {d0_hi, d1_lo * (1.0 - t) + d1_hi * t};
    case 2: return {d0_hi * (1.0 - t) + d0_lo * t, d1_hi};
    default: return {d0_lo, d1_hi * (1.0 - t) + d1_lo * t};
  }
}

std::pair<double, double> AffineModeMap::apply(double d0, double d1) const {
  return {a00 * d0 + a01 * d1 + b0, a10 * d0 + a11 * d1 + b1};
}

std::pair<double, double> AffineModeMap::solve(double q0, double q1) const {
  const double D = det();
  const double r0 = q0 - b0;
  const double r1 = q1 - b1;
  return {(a11 * r0 - a01 * r1) / D, (a00 * r1 - a10 * r0) / D};
}

AffineModeMap measure_mode_map(double s0, const PhiSolution& phi, const SolverConfig& config, const Grid& grid) {
  const ModeProjector proj(grid, QuadratureRule::gauss_hermite(config.quadrature_order));
  auto modes = [&](double d0, double d1) {
    const WeightedField q = make_initial_data(d0, d1, s0, phi, grid);
    return proj.project(q.values, s0, config.K);
  };
  const auto base = modes(0.0, 0.0);
  const auto e0 = modes(1.0, 0.0);
  const auto e1 = modes(0.0, 1.0);
  AffineModeMap m;
  m.b0 = base[0];
  m.b1 = base[1];
  m.a00 = e0[0] - base[0];
  m.a10 = e0[1] - base[1];
  m.a01 = e1[0] - base[0];
  m.a11 = e1[1] - base[1];
  return m;
}

InitialRectangle initial_rectangle(double s0, const ShrinkingSetParams& ssp, const PhiSolution& phi,
                                   const SolverConfig& config) {
  if (!phi.in_range(s0)) throw DomainError("s0 outside the phi table");
  const Grid grid = config.make_grid(s0);
  InitialRectangle out;
  out.s0 = s0;
  out.map = measure_mode_map(s0, phi, config, grid);
  const double scale = std::abs(out.map.a00 * out.map.a11) + std::abs(out.map.a01 * out.map.a10);
  if (!(std::abs(out.map.det()) > 1e-12 * scale) || !(scale > 1e-300)) {
    throw DomainError("mode map (d0, d1) -> (q0, q1) is degenerate at s0 = " + std::to_string(s0));
  }
  out.bound = ssp.A * std::pow(s0, -(1.0 + ssp.nu));
  double lo0 = std::numeric_limits<double>::infinity(), hi0 = -lo0, lo1 = lo0, hi1 = -lo0;
  for (double x : {-out.bound, out.bound}) {
    for (double y : {-out.bound, out.bound}) {
      const auto [d0, d1] = out.map.solve(x, y);
      lo0 = std::min(lo0, d0);
      hi0 = std::max(hi0, d0);
      lo1 = std::min(lo1, d1);
      hi1 = std::max(hi1, d1);
    }
  }
  out.rect = {lo0, hi0, lo1, hi1};
  return out;
}

std::pair<double, double> clamp_to_unit_square(double x, double y) {
  const double m = std::max(std::abs(x), std::abs(y));
  if (!(m > 0.0)) return {0.0, 0.0};
  return {x / m, y / m};
}

SelfSimilarMap::SelfSimilarMap(const PhiSolution& phi, double s0, double horizon, SolverConfig config)
    : phi_(&phi), s0_(s0), horizon_(horizon), config_(std::move(config)) {
  config_.stop_on_exit = true;
  config_.store_fields = false;
  grid_ = config_.make_grid(horizon_);
}

PhiSample SelfSimilarMap::eval(double d0, double d1) const {
  const TrajectoryRecord rec =
      evolve_field(make_initial_data(d0, d1, s0_, *phi_, grid_), horizon_, *phi_, config_);
  PhiSample out;
  out.d0 = d0;
  out.d1 = d1;
  out.in_set_until = rec.in_set_until();
  out.s_exit = std::numeric_limits<double>::quiet_NaN();
  if (rec.termination == Termination::SolverBlowUp) {
    out.exited = true;
    out.anomalous = true;
    out.s_exit = out.in_set_until;
    return out;
  }
  if (!rec.exit.exited) return out;
  out.exited = true;
  out.s_exit = rec.exit.s_exit;
  out.constraint = rec.exit.constraint;
  out.anomalous = out.constraint != Constraint::Mode0 && out.constraint != Constraint::Mode1;
  const double scale = std::pow(out.s_exit, 1.0 + phi_->params().nu()) / config_.A;
  std::tie(out.x, out.y) = clamp_to_unit_square(scale * rec.exit.q0, scale * rec.exit.q1);
  return out;
}

LinearTestDouble::LinearTestDouble(AffineModeMap map, double s0, ShrinkingSetParams ssp, double horizon)
    : map_(map), s0_(s0), ssp_(ssp), horizon_(horizon) {}

std::pair<double, double> LinearTestDouble::zero() const { return map_.solve(0.0, 0.0); }

PhiSample LinearTestDouble::eval(double d0, double d1) const {
  const auto [c0, c1] = map_.apply(d0, d1);
  const double e = 1.0 + ssp_.nu;
  const double logA = std::log(ssp_.A);
  const double span = horizon_ - s0_;
  const double rate[2] = {1.0, 0.5};
  const double c[2] = {c0, c1};
  double t_exit[2];
  for (int m = 0; m < 2; ++m) {
    t_exit[m] = std::numeric_limits<double>::infinity();
    if (c[m] == 0.0) continue;
    const double lc = std::log(std::abs(c[m]));
    auto g = [&](double t) { return lc + rate[m] * t + e * std::log(s0_ + t) - logA; };
    if (g(0.0) >= -1e-9) {
      t_exit[m] = 0.0;
      continue;
    }
    if (g(span) < 0.0) continue;
    double lo = 0.0, hi = span;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    t_exit[m] = 0.5 * (lo + hi);
  }
  PhiSample out;
  out.d0 = d0;
  out.d1 = d1;
  const double t = std::min(t_exit[0], t_exit[1]);
  if (!std::isfinite(t)) {
    out.s_exit = std::numeric_limits<double>::quiet_NaN();
    out.in_set_until = horizon_;
    return out;
  }
  out.exited = true;
  out.s_exit = s0_ + t;
  out.in_set_until = out.s_exit;
  out.constraint = t_exit[0] <= t_exit[1] ? Constraint::Mode0 : Constraint::Mode1;
  double v[2];
  for (int m = 0; m < 2; ++m) {
    v[m] = c[m] == 0.0 ? 0.0
                       : std::copysign(std::exp(std::log(std::abs(c[m])) + rate[m] * t + e * std::log(out.s_exit) - logA),
                                       c[m]);
  }
  std::tie(out.x, out.y) = clamp_to_unit_square(v[0], v[1]);
  return out;
}

PhiSample map_Phi(double d0, double d1, const BoundaryMap& map) { return map.eval(d0, d1); }

PhiCache::PhiCache(const BoundaryMap& map, int jobs) : map_(&map), jobs_(std::max(1, jobs)) {}

PhiCache::Key PhiCache::key(double d0, double d1) const {
  // +0.0 and -0.0 share a key.
  return {std::bit_cast<std::uint64_t>(d0 + 0.0), std::bit_cast<std::uint64_t>(d1 + 0.0)};
}

PhiSample PhiCache::get(double d0, double d1) { return get_many({{d0, d1}}).front(); }

std::vector<PhiSample> PhiCache::get_many(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::size_t> missing;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<Key> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Key k = key(points[i].first, points[i].second);
      if (store_.count(k) || std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
      seen.push_back(k);
      missing.push_back(i);
    }
  }
  std::vector<PhiSample> fresh(missing.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t j = begin; j < missing.size(); j += stride) {
      fresh[j] = map_->eval(points[missing[j]].first, points[missing[j]].second);
    }
  };
  const auto threads = static_cast<std::size_t>(std::min<std::size_t>(jobs_, missing.size()));
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  std::vector<PhiSample> out;
  std::lock_guard<std::mutex> lock(mutex_);
  for (std::size_t j = 0; j < missing.size(); ++j) {
    const Key k = key(points[missing[j]].first, points[missing[j]].second);
    if (store_.emplace(k, fresh[j]).second) order_.push_back(k);
  }
  for (const auto& pt : points) out.push_back(store_.at(key(pt.first, pt.second)));
  return out;
}

std::vector<PhiSample> PhiCache::all() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<PhiSample> out;
  for (const Key& k : order_) out.push_back(store_.at(k));
  return out;
}

namespace {

double wrap_angle(double d) {
  while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
  while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
  return d;
}

}  // namespace

WindingResult winding_number(const Rectangle& rect, PhiCache& cache, const WindingOptions& options) {
  if (options.samples_per_edge < 1) throw std::invalid_argument("need at least one sample per edge");
  const int n = options.samples_per_edge;
  std::vector<double> us;
  for (int e = 0; e < 4; ++e) {
    for (int k = 0; k < n; ++k) us.push_back(e + static_cast<double>(k) / n);
  }
  const double min_len = 1.0 / (n * std::ldexp(1.0, options.max_refinements));
  WindingResult res;
  for (;;) {
    std::vector<std::pair<double, double>> pts;
    for (double u : us) pts.push_back(rect.loop_point(u));
    const auto samples = cache.get_many(pts);
    res.samples = static_cast<int>(samples.size());
    for (const auto& smp : samples) {
      if (!smp.exited && (!res.no_exit || smp.in_set_until > res.no_exit_sample.in_set_until)) {
        res.no_exit = true;
        res.no_exit_sample = smp;
      }
    }
    if (res.no_exit) return res;

    std::vector<double> theta(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) theta[i] = std::atan2(samples[i].y, samples[i].x);
    std::vector<double> refined;
    bool any_gap = false;
    double total = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
      const std::size_t j = (i + 1) % us.size();
      const double d = wrap_angle(theta[j] - theta[i]);
      total += d;
      refined.push_back(us[i]);
      if (std::abs(d) > 0.5 * std::numbers::pi) {
        const double u_next = j == 0 ? 4.0 : us[j];
        if (u_next - us[i] < min_len) {
          res.undersampled = true;
          continue;
        }
        any_gap = true;
        refined.push_back(0.5 * (us[i] + u_next));
      }
    }
    if (!any_gap) {
      res.winding = static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
      res.ok = !res.undersampled;
      return res;
    }
    us = std::move(refined);
  }
}

std::string to_string(ShootTermination t) {
  switch (t) {
    case ShootTermination::Diameter: return "diameter";
    case ShootTermination::Horizon: return "horizon";
    case ShootTermination::SearchFailure: return "search_failure";
    case ShootTermination::Undersampled: return "undersampled";
    case ShootTermination::NoExitOnStart: return "no_exit_on_start";
  }
  return "unknown";
}

ShootingResult shoot(const Rectangle& start, const BoundaryMap& map, const ShootOptions& options) {
  const double tol_d = options.tol_d > 0.0 ? options.tol_d : 1e-8 / map.s0();
  PhiCache cache(map, options.jobs);
  ShootingResult res;

  auto finish = [&](ShootTermination why) {
    res.termination = why;
    res.probes = cache.all();
    const PhiSample* best = nullptr;
    for (const auto& p : res.probes) {
      if (!best || p.in_set_until >= best->in_set_until) best = &p;
    }
    if (best) {
      res.d0 = best->d0;
      res.d1 = best->d1;
      res.best_in_set_until = best->in_set_until;
    }
    return res;
  };

  WindingResult w = winding_number(start, cache, options.winding);
  res.history.push_back({start, w.winding, 1});
  if (w.no_exit) return finish(ShootTermination::NoExitOnStart);
  if (w.undersampled) {
    res.diagnostic = "start rectangle boundary undersampled";
    return finish(ShootTermination::Undersampled);
  }
  if (w.winding == 0) {
    res.diagnostic = "start rectangle has winding 0";
    return finish(ShootTermination::SearchFailure);
  }

  Rectangle rect = start;
  for (int level = 0; level < options.max_levels && rect.diameter() > tol_d; ++level) {
    const auto children = rect.split();
    std::vector<int> windings;
    std::vector<bool> undersampled;
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < children.size(); ++c) {
      const WindingResult wc = winding_number(children[c], cache, options.winding);
      if (wc.no_exit) return finish(ShootTermination::Horizon);
      windings.push_back(wc.winding);
      undersampled.push_back(wc.undersampled);
      if (wc.ok && wc.winding != 0) candidates.push_back(c);
    }
    if (candidates.empty()) {
      res.diagnostic = "level " + std::to_string(level) + ": child windings";
      for (std::size_t c = 0; c < windings.size(); ++c) {
        res.diagnostic += " " + std::to_string(windings[c]) + (undersampled[c] ? "(undersampled)" : "");
      }
      return finish(ShootTermination::SearchFailure);
    }
    std::size_t chosen = candidates.front();
    if (candidates.size() > 1) {
      double best = -1.0;
      for (std::size_t c : candidates) {
        const auto [x, y] = children[c].center();
        const PhiSample smp = cache.get(x, y);
        if (!smp.exited) return finish(ShootTermination::Horizon);
        if (smp.in_set_until > best) {
          best = smp.in_set_until;
          chosen = c;
        }
      }
    }
    rect = children[chosen];
    res.history.push_back({rect, windings[chosen], static_cast<int>(candidates.size())});
  }
  const auto [x, y] = rect.center();
  if (!cache.get(x, y).exited) return finish(ShootTermination::Horizon);
  return finish(ShootTermination::Diameter);
}

void ShootingResult::write_manifest(std::ostream& out, const CsvMeta& meta) const {
  for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
  out << "d0=" << format_double(d0) << '\n'
      << "d1=" << format_double(d1) << '\n'
      << "best_in_set_until=" << format_double(best_in_set_until) << '\n'
      << "termination=" << to_string(termination) << '\n'
      << "levels=" << history.size() << '\n'
      << "probes=" << probes.size() << '\n'
      << "diagnostic=" << diagnostic << '\n'
      << "history=level,d0_lo,d0_hi,d1_lo,d1_hi,winding,candidates\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    out << i << ',' << format_double(h.rect.d0_lo) << ',' << format_double(h.rect.d0_hi) << ','
        << format_double(h.rect.d1_lo) << ',' << format_double(h.rect.d1_hi) << ',' << h.winding << ','
        << h.candidates << '\n';
  }
}

void ShootingResult::write_probes_csv(std::ostream& out, const CsvMeta& meta) const {
  write_csv_header(out, {"d0", "d1", "s_exit", "exit_constraint", "phi_x", "phi_y"}, meta);
  for (const auto& p : probes) {
    write_csv_row(out, {format_double(p.d0), format_double(p.d1), format_double(p.s_exit),
                        p.exited ? to_string(p.constraint) : std::string("no_exit"), format_double(p.x),
                        format_double(p.y)});
  }
}

}  // namespace blowup
