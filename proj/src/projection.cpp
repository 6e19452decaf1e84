#include "ddp/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ddp {

namespace {

constexpr double clip_tol = 1e-9;

}  // namespace

void validate_xi(const ProjectionParam& xi) {
  const std::size_t m = xi.xs.size();
  if (m == 0) {
    throw std::invalid_argument("projection parameter needs at least one support point");
  }
  if (xi.ys.size() != m - 1) {
    throw std::invalid_argument("projection parameter needs m-1 cut points");
  }
  for (double v : xi.xs) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("nonfinite support point");
    }
  }
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double y = xi.ys[i];
    if (!std::isfinite(y) || !(xi.xs[i] <= y && y <= xi.xs[i + 1])) {
      throw std::invalid_argument("projection parameter is not interlaced at index " + std::to_string(i));
    }
  }
}

ProjectionParam xi_lin(std::size_t m, double w, double z) {
  if (m == 0) {
    throw std::invalid_argument("xi_lin needs m >= 1");
  }
  if (!(w > 0.0) || !std::isfinite(w) || !std::isfinite(z)) {
    throw std::invalid_argument("xi_lin needs finite w > 0 and finite z");
  }
  ProjectionParam xi;
  if (m == 1) {
    xi.xs = {z};
    return xi;
  }
  const auto md = static_cast<double>(m);
  xi.xs.resize(m);
  xi.ys.resize(m - 1);
  for (std::size_t i = 1; i <= m; ++i) {
    const auto id = static_cast<double>(i);
    xi.xs[i - 1] = z + ((2.0 * id - 1.0 - md) / (md - 1.0)) * w;
    if (i < m) {
      xi.ys[i - 1] = z + ((2.0 * id - md) / (md - 1.0)) * w;
    }
  }
  validate_xi(xi);
  return xi;
}

std::size_t cell_index(const ProjectionParam& xi, double x) {
  // first cut point with x <= y_i
  const auto it = std::lower_bound(xi.ys.begin(), xi.ys.end(), x);
  return static_cast<std::size_t>(it - xi.ys.begin());
}

double cell_representative(const ProjectionParam& xi, double x) { return xi.xs[cell_index(xi, x)]; }

FiniteDist project_cdf(const std::function<double(double)>& F, const ProjectionParam& xi, double mass) {
  validate_xi(xi);
  const std::size_t m = xi.size();
  std::vector<double> weights(m);
  double prev = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double cur = i + 1 < m ? F(xi.ys[i]) : mass;
    double o = cur - prev;
    if (o < 0.0) {
      if (o < -clip_tol) {
        throw std::runtime_error("projection produced a negative cell weight " + std::to_string(o));
      }
      o = 0.0;
    }
    weights[i] = std::min(o, 1.0);
    prev = cur;
  }
  return FiniteDist::from_particles(xi.xs, weights);
}

FiniteDist project(const Distribution& dist, const ProjectionParam& xi) {
  return project_cdf([&](double y) { return cdf(dist, y); }, xi, 1.0);
}

XiStats xi_stats(const ProjectionParam& xi) {
  validate_xi(xi);
  double delta = 0.0;
  for (std::size_t i = 1; i < xi.xs.size(); ++i) {
    delta = std::max(delta, std::abs(xi.xs[i] - xi.xs[i - 1]));
  }
  const double lo = xi.xs.front();
  const double hi = xi.xs.back();
  if (xi.xs.size() == 1) {
    return {0.0, lo, 0.0};
  }
  return {delta, (hi + lo) / 2.0, (hi - lo) / 2.0};
}

}  // namespace ddp
