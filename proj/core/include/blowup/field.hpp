#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace blowup {

/// Uniform grid y_i = (i - M) dy, i = 0..2M, symmetric about 0 bit-for-bit.
class Grid {
 public:
  Grid() = default;  // empty

  /// Smallest symmetric grid with spacing dy covering [-half_width, half_width].
  static Grid symmetric(double half_width, double dy);

  std::size_t size() const { return nodes_ ? nodes_->size() : 0; }
  double spacing() const { return dy_; }
  double half_width() const { return nodes_ ? nodes_->back() : 0.0; }
  std::size_t center() const { return size() / 2; }
  double y(std::size_t i) const { return (*nodes_)[i]; }
  std::span<const double> nodes() const {
    return nodes_ ? std::span<const double>(*nodes_) : std::span<const double>();
  }

  bool same_as(const Grid& other) const;

 private:
  std::shared_ptr<const std::vector<double>> nodes_;
  double dy_ = 0.0;
};

struct WeightedField {
  Grid grid;
  std::vector<double> values;
  double s = 0.0;

  static WeightedField sample(const Grid& grid, double s, const std::function<double(double)>& g);
  static WeightedField zeros(const Grid& grid, double s);
  double sup_norm() const;
};

/// Four-point Lagrange stencil on a uniform grid.
struct CubicStencil {
  std::size_t base = 0;
  double w[4] = {0, 0, 0, 0};
  bool inside = false;
};

CubicStencil cubic_stencil(const Grid& grid, double y);

/// Cubic interpolation; zero outside the grid.
double interpolate(const WeightedField& field, double y);
double interpolate(const Grid& grid, std::span<const double> values, double y);

}  // namespace blowup
