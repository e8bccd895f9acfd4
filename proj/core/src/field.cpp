#include "blowup/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blowup {

Grid Grid::symmetric(double half_width, double dy) {
  if (!(dy > 0.0) || !(half_width > 0.0)) throw std::invalid_argument("grid needs dy > 0 and L > 0");
  const auto m = static_cast<long>(std::ceil(half_width / dy - 1e-9));
  if (m < 2) throw std::invalid_argument("grid needs at least 5 nodes");
  auto nodes = std::make_shared<std::vector<double>>(static_cast<std::size_t>(2 * m + 1));
  for (long i = -m; i <= m; ++i) (*nodes)[static_cast<std::size_t>(i + m)] = static_cast<double>(i) * dy;
  Grid g;
  g.nodes_ = std::move(nodes);
  g.dy_ = dy;
  return g;
}

bool Grid::same_as(const Grid& other) const {
  return nodes_ == other.nodes_ || (dy_ == other.dy_ && size() == other.size());
}

WeightedField WeightedField::sample(const Grid& grid, double s,
                                    const std::function<double(double)>& g) {
  WeightedField f{grid, std::vector<double>(grid.size()), s};
  for (std::size_t i = 0; i < grid.size(); ++i) f.values[i] = g(grid.y(i));
  return f;
}

WeightedField WeightedField::zeros(const Grid& grid, double s) {
  return {grid, std::vector<double>(grid.size(), 0.0), s};
}

double WeightedField::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

CubicStencil cubic_stencil(const Grid& grid, double y) {
  CubicStencil st;
  const double y0 = grid.y(0);
  const double dy = grid.spacing();
  const std::size_t n = grid.size();
  if (!(y >= y0 && y <= grid.y(n - 1))) return st;
  const double pos = (y - y0) / dy;
  const auto cell = static_cast<long>(std::floor(pos));
  const long base = std::clamp(cell - 1, 0L, static_cast<long>(n) - 4);
  const double u = pos - static_cast<double>(base);
  st.base = static_cast<std::size_t>(base);
  st.w[0] = -(u - 1) * (u - 2) * (u - 3) / 6.0;
  st.w[1] = u * (u - 2) * (u - 3) / 2.0;
  st.w[2] = -u * (u - 1) * (u - 3) / 2.0;
  st.w[3] = u * (u - 1) * (u - 2) / 6.0;
  st.inside = true;
  return st;
}

double interpolate(const Grid& grid, std::span<const double> values, double y) {
  const CubicStencil st = cubic_stencil(grid, y);
  if (!st.inside) return 0.0;
  const double* v = values.data() + st.base;
  return st.w[0] * v[0] + st.w[1] * v[1] + st.w[2] * v[2] + st.w[3] * v[3];
}

double interpolate(const WeightedField& field, double y) {
  return interpolate(field.grid, field.values, y);
}

}  // namespace blowup
