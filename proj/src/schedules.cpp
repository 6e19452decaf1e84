#include "ddp/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddp {

namespace {

std::size_t checked_ceil(double v) {
  if (!(v <= max_schedule_size)) {
    throw std::overflow_error("schedule size exceeds " + std::to_string(max_schedule_size));
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(v)));
}

ProjectionParam box_grid(double x_min, double x_max, std::size_t m) {
  if (x_min == x_max) {
    return ProjectionParam{{x_min}, {}};
  }
  return xi_lin(m, (x_max - x_min) / 2.0, (x_max + x_min) / 2.0);
}

}  // namespace

std::string to_string(Algo algo) {
  switch (algo) {
    case Algo::ppa:
      return "ppa";
    case Algo::adp:
      return "adp";
    case Algo::qsp:
      return "qsp";
    case Algo::qdp:
      return "qdp";
  }
  return "?";
}

Algo parse_algo(const std::string& name) {
  if (name == "ppa") return Algo::ppa;
  if (name == "adp") return Algo::adp;
  if (name == "qsp") return Algo::qsp;
  if (name == "qdp") return Algo::qdp;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

ScheduleConfig resolve_schedule(ScheduleConfig cfg, double gamma) {
  if (!cfg.theta) {
    cfg.theta = (gamma + 1.0) / 2.0;
  }
  if (!(*cfg.theta > 0.0 && *cfg.theta < 1.0)) {
    throw std::invalid_argument("theta must lie in (0,1)");
  }
  if (cfg.constant_m < 1) {
    throw std::invalid_argument("constant m must be at least 1");
  }
  if (!(cfg.spline_fraction > 0.0)) {
    throw std::invalid_argument("spline fraction must be positive");
  }
  if (!(cfg.ppa_w0 > 0.0) || !(cfg.ppa_growth >= 1.0) || !std::isfinite(cfg.ppa_z)) {
    throw std::invalid_argument("PPA needs w0 > 0, growth >= 1 and a finite centre");
  }
  return cfg;
}

SizeStep size_schedule(const ScheduleConfig& cfg, std::size_t k) {
  if (k < 1) {
    throw std::invalid_argument("iteration index must be at least 1");
  }
  SizeStep step{};
  if (cfg.size_mode == SizeMode::constant) {
    step.m = cfg.constant_m;
    step.m_prime = checked_ceil(cfg.spline_fraction * static_cast<double>(cfg.constant_m));
  } else {
    if (!cfg.theta || !(*cfg.theta > 0.0 && *cfg.theta < 1.0)) {
      throw std::invalid_argument("exponential schedule needs theta in (0,1)");
    }
    const double growth = std::pow(1.0 / *cfg.theta, static_cast<double>(k));
    step.m = checked_ceil(growth);
    step.m_prime = checked_ceil(cfg.spline_fraction * growth);
  }
  step.eps_u = std::min(0.5, 1.0 / (2.0 * static_cast<double>(step.m)));
  return step;
}

std::pair<double, double> box_levels(double eps_u) {
  if (!(eps_u > 0.0 && eps_u <= 0.5)) {
    throw std::invalid_argument("eps_u must lie in (0, 1/2]");
  }
  const double root = std::sqrt(1.0 - eps_u);
  return {eps_u / (1.0 + root), root};
}

std::pair<double, double> quantile_box(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, double eps_u) {
  require_matching(mdp, eta);
  const auto [lo, hi] = box_levels(eps_u);
  const auto reach = branches(mdp, s);
  if (reach.empty()) {
    throw std::invalid_argument("state " + std::to_string(s) + " has no reachable transition");
  }
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  for (const auto& b : reach) {
    const auto& reward = mdp.rewards[s][b.action][b.next];
    const auto& next = eta[b.next];
    // same `r + gamma * z` rounding as materialize_bellman_finite
    const double shift_lo = mdp.gamma * next.quantile(lo);
    const double shift_hi = mdp.gamma * next.quantile(hi);
    x_min = std::min(x_min, quantile(reward, lo) + shift_lo);
    x_max = std::max(x_max, quantile(reward, hi) + shift_hi);
  }
  if (x_max < x_min) {
    x_max = x_min;
  }
  return {x_min, x_max};
}

ProjectionParam ppa_params(const ScheduleConfig& cfg, std::size_t k) {
  if (cfg.algo != Algo::ppa) {
    throw std::invalid_argument("ppa_params needs a PPA schedule");
  }
  const auto step = size_schedule(cfg, k);
  const double width = cfg.ppa_w0 * std::pow(cfg.ppa_growth, static_cast<double>(k));
  return xi_lin(step.m, width, cfg.ppa_z);
}

ProjectionParam adp_params(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, std::size_t k,
                           const ScheduleConfig& cfg) {
  if (cfg.algo != Algo::adp) {
    throw std::invalid_argument("adp_params needs an ADP schedule");
  }
  const auto step = size_schedule(cfg, k);
  const auto [x_min, x_max] = quantile_box(mdp, s, eta, step.eps_u);
  return box_grid(x_min, x_max, step.m);
}

QuantileSpline::QuantileSpline(std::vector<double> probs, std::vector<double> values) {
  if (probs.size() != values.size() || probs.empty()) {
    throw std::invalid_argument("spline needs matching, nonempty anchor lists");
  }
  for (std::size_t l = 0; l < probs.size(); ++l) {
    const double p = std::clamp(probs[l], 0.0, 1.0);
    if (!probs_.empty()) {
      if (p < probs_.back() || values[l] < values_.back()) {
        throw std::invalid_argument("spline anchors must be nondecreasing");
      }
      if (p == probs_.back()) {
        continue;
      }
    }
    probs_.push_back(p);
    values_.push_back(values[l]);
  }
}

double QuantileSpline::operator()(double u) const {
  if (u <= probs_.front()) {
    return values_.front();
  }
  if (u >= probs_.back()) {
    return values_.back();
  }
  const auto it = std::upper_bound(probs_.begin(), probs_.end(), u);
  const auto j = static_cast<std::size_t>(it - probs_.begin());
  const double p0 = probs_[j - 1];
  const double p1 = probs_[j];
  const double t = (u - p0) / (p1 - p0);
  return values_[j - 1] + t * (values_[j] - values_[j - 1]);
}

ProjectionParam qsp_params(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, std::size_t k,
                           const ScheduleConfig& cfg) {
  if (cfg.algo != Algo::qsp) {
    throw std::invalid_argument("qsp_params needs a QSP schedule");
  }
  const auto step = size_schedule(cfg, k);
  const std::size_t m = step.m;
  if (m < 2) {
    throw std::invalid_argument("QSP needs M(k) >= 2");
  }
  const auto [x_min, x_max] = quantile_box(mdp, s, eta, step.eps_u);
  if (x_min == x_max) {
    return box_grid(x_min, x_max, m);
  }

  const std::size_t mp = step.m_prime;
  const double span = x_max - x_min;
  std::vector<double> probs(mp + 2);
  std::vector<double> values(mp + 2);
  for (std::size_t l = 0; l <= mp + 1; ++l) {
    values[l] = l == mp + 1 ? x_max : x_min + span * static_cast<double>(l) / static_cast<double>(mp + 1);
  }
  probs[0] = 0.0;
  probs[mp + 1] = 1.0;
  for (std::size_t l = 1; l <= mp; ++l) {
    probs[l] = std::clamp(bellman_cdf(mdp, s, eta, values[l]), 0.0, 1.0);
  }
  const QuantileSpline spline(std::move(probs), std::move(values));

  ProjectionParam xi;
  xi.xs.resize(m);
  xi.ys.resize(m - 1);
  const auto md = static_cast<double>(m);
  for (std::size_t i = 1; i <= m; ++i) {
    const auto id = static_cast<double>(i);
    xi.xs[i - 1] = spline((id - 1.0) / (md - 1.0));
    if (i < m) {
      xi.ys[i - 1] = spline((2.0 * id - 1.0) / (2.0 * md - 2.0));
    }
  }
  validate_xi(xi);
  return xi;
}

FiniteDist qdp_update(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, std::size_t m) {
  if (m < 1) {
    throw std::invalid_argument("QDP needs m >= 1");
  }
  const FiniteDist target = materialize_bellman_finite(mdp, s, eta);
  std::vector<double> points(m);
  const std::vector<double> weights(m, 1.0);
  const auto md = static_cast<double>(m);
  for (std::size_t i = 1; i <= m; ++i) {
    points[i - 1] = target.quantile((2.0 * static_cast<double>(i) - 1.0) / (2.0 * md));
  }
  return FiniteDist::from_particles(points, weights);
}

}  // namespace ddp
