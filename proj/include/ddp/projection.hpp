#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ddp/distributions.hpp"

namespace ddp {

/// Interlaced support and cut points x_1 <= y_1 <= x_2 <= ... <= y_{m-1} <= x_m.
struct ProjectionParam {
  std::vector<double> xs;
  std::vector<double> ys;

  [[nodiscard]] std::size_t size() const noexcept { return xs.size(); }
  friend bool operator==(const ProjectionParam&, const ProjectionParam&) = default;
};

/// Throws std::invalid_argument unless `xi` is a finite, interlaced grid.
void validate_xi(const ProjectionParam& xi);

/// Evenly spaced grid on [z - w, z + w]; m = 1 gives the single point z.
ProjectionParam xi_lin(std::size_t m, double w, double z);

/// Cell representative pr(x|xi): the x_i whose cell (y_{i-1}, y_i] holds x.
double cell_representative(const ProjectionParam& xi, double x);
/// Index of the cell holding x.
std::size_t cell_index(const ProjectionParam& xi, double x);

/// Projection onto xi of a distribution given by its CDF `F` with total mass
/// `mass` (F(+inf)). Cell weights are F(y_i) - F(y_{i-1}); negatives down to
/// -1e-9 are clipped to zero, larger ones throw std::runtime_error.
FiniteDist project_cdf(const std::function<double(double)>& F, const ProjectionParam& xi, double mass = 1.0);

FiniteDist project(const Distribution& dist, const ProjectionParam& xi);

struct XiStats {
  double delta;  ///< largest gap between neighbouring support points
  double z;      ///< midpoint of [x_1, x_m]
  double w;      ///< half-width of [x_1, x_m]
};

XiStats xi_stats(const ProjectionParam& xi);

}  // namespace ddp
