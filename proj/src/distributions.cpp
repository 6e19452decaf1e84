#include "ddp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ddp {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_probability(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("quantile level must lie in (0,1)");
  }
}

double cauchy_cdf(const Cauchy& c, double x) {
  const double z = (x - c.mu) / c.scale;
  // atan(-1/z)/pi keeps relative accuracy deep in the lower tail
  if (z < -1.0) {
    return std::atan(-1.0 / z) / std::numbers::pi;
  }
  return 0.5 + std::atan(z) / std::numbers::pi;
}

double cauchy_ccdf(const Cauchy& c, double x) {
  const double z = (x - c.mu) / c.scale;
  if (z > 1.0) {
    return std::atan(1.0 / z) / std::numbers::pi;
  }
  return 0.5 - std::atan(z) / std::numbers::pi;
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteDist

FiniteDist FiniteDist::from_particles(std::span<const double> points, std::span<const double> weights) {
  if (points.empty()) {
    throw std::invalid_argument("finite distribution needs at least one particle");
  }
  if (points.size() != weights.size()) {
    throw std::invalid_argument("points and weights differ in length");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("nonfinite particle entry");
    }
    if (weights[i] < 0.0) {
      throw std::invalid_argument("negative particle weight");
    }
  }

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!std::is_sorted(points.begin(), points.end())) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  }

  FiniteDist out;
  out.points_.reserve(points.size());
  out.weights_.reserve(points.size());
  for (std::size_t idx : order) {
    if (!out.points_.empty() && out.points_.back() == points[idx]) {
      out.weights_.back() += weights[idx];
    } else {
      out.points_.push_back(points[idx]);
      out.weights_.push_back(weights[idx]);
    }
  }

  const double total = std::accumulate(out.weights_.begin(), out.weights_.end(), 0.0);
  if (!(total > 0.0)) {
    throw std::invalid_argument("particle weights sum to zero");
  }
  out.input_mass_ = total;
  out.cumulative_.resize(out.weights_.size());
  double running = 0.0;
  for (std::size_t i = 0; i < out.weights_.size(); ++i) {
    out.weights_[i] /= total;
    running += out.weights_[i];
    out.cumulative_[i] = std::min(running, 1.0);
  }
  out.cumulative_.back() = 1.0;
  return out;
}

FiniteDist FiniteDist::point_mass(double x) {
  const double one = 1.0;
  return from_particles(std::span<const double>(&x, 1), std::span<const double>(&one, 1));
}

FiniteDist finite_from_particles(std::span<const double> points, std::span<const double> weights) {
  return FiniteDist::from_particles(points, weights);
}

double FiniteDist::cdf(double x) const noexcept {
  const auto it = std::upper_bound(points_.begin(), points_.end(), x);
  if (it == points_.begin()) {
    return 0.0;
  }
  return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double FiniteDist::cdf_left(double x) const noexcept {
  const auto it = std::lower_bound(points_.begin(), points_.end(), x);
  if (it == points_.begin()) {
    return 0.0;
  }
  return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double FiniteDist::quantile(double u) const {
  require_probability(u);
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) {
    --it;
  }
  return points_[static_cast<std::size_t>(it - cumulative_.begin())];
}

// ---------------------------------------------------------------------------
// Distribution factories

Distribution Distribution::dirac(double point) {
  if (!std::isfinite(point)) {
    throw std::invalid_argument("dirac point must be finite");
  }
  return Distribution(Dirac{point});
}

Distribution Distribution::finite(FiniteDist dist) { return Distribution(std::move(dist)); }

Distribution Distribution::normal(double mu, double sigma2) {
  if (!std::isfinite(mu) || !std::isfinite(sigma2) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("normal requires finite mu and sigma2 > 0");
  }
  return Distribution(Normal{mu, sigma2});
}

Distribution Distribution::cauchy(double mu, double scale) {
  if (!std::isfinite(mu) || !std::isfinite(scale) || !(scale > 0.0)) {
    throw std::invalid_argument("cauchy requires finite mu and scale > 0");
  }
  return Distribution(Cauchy{mu, scale});
}

Distribution Distribution::uniform(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) {
    throw std::invalid_argument("uniform requires finite a < b");
  }
  return Distribution(Uniform{a, b});
}

Distribution Distribution::exponential(double rate) {
  if (!std::isfinite(rate) || !(rate > 0.0)) {
    throw std::invalid_argument("exponential requires rate > 0");
  }
  return Distribution(Exponential{rate});
}

std::string Distribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Dirac& d) { os << "dirac(" << d.point << ")"; },
                 [&](const FiniteDist& f) { os << "finite(" << f.size() << " atoms)"; },
                 [&](const Normal& n) { os << "normal(" << n.mu << ", " << n.sigma2 << ")"; },
                 [&](const Cauchy& c) { os << "cauchy(" << c.mu << ", " << c.scale << ")"; },
                 [&](const Uniform& u) { os << "uniform(" << u.a << ", " << u.b << ")"; },
                 [&](const Exponential& e) { os << "exponential(" << e.rate << ")"; },
             },
             value_);
  return os.str();
}

// ---------------------------------------------------------------------------
// Standard normal numerics

namespace normal_math {

double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double phi_pdf(double z) {
  constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

namespace {

// Wichura (1988), Algorithm AS 241, PPND16.
double as241(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
              4.5921953931549871457e+4) *
                 r +
             1.3731693765509461125e+4) *
                r +
            1.9715909503065514427e+3) *
               r +
           1.3314166789178437745e+2) *
              r +
          3.3871328727963666080e+0));
    const double den =
        ((((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
              2.1213794301586595867e+4) *
                 r +
             5.3941960214247511077e+3) *
                r +
            6.8718700749205790830e+2) *
               r +
           4.2313330701600911252e+1) *
              r +
          1.0));
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value = 0.0;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
             1.27045825245236838258e+0) *
                r +
            3.64784832476320460504e+0) *
               r +
           5.76949722146069140550e+0) *
              r +
          4.63033784615654529590e+0) *
             r +
         1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e+0) *
              r +
          2.05319162663775882187e+0) *
             r +
         1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e+0) *
              r +
          5.46378491116411436990e+0) *
             r +
         6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

}  // namespace

double phi_quantile(double p) {
  require_probability(p);
  // work in the lower tail so the Newton residual keeps relative precision
  if (p > 0.5) {
    return -phi_quantile(1.0 - p);
  }
  double x = as241(p);
  const double density = phi_pdf(x);
  if (density > 0.0) {
    x -= (phi_cdf(x) - p) / density;
  }
  return x;
}

}  // namespace normal_math

// ---------------------------------------------------------------------------
// Evaluation

double cdf(const Distribution& dist, double x) {
  return std::visit(
      overloaded{
          [&](const Dirac& d) { return x >= d.point ? 1.0 : 0.0; },
          [&](const FiniteDist& f) { return f.cdf(x); },
          [&](const Normal& n) { return normal_math::phi_cdf((x - n.mu) / std::sqrt(n.sigma2)); },
          [&](const Cauchy& c) { return cauchy_cdf(c, x); },
          [&](const Uniform& u) { return std::clamp((x - u.a) / (u.b - u.a), 0.0, 1.0); },
          [&](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.rate * x); },
      },
      dist.variant());
}

double cdf_left(const Distribution& dist, double x) {
  return std::visit(overloaded{
                        [&](const Dirac& d) { return x > d.point ? 1.0 : 0.0; },
                        [&](const FiniteDist& f) { return f.cdf_left(x); },
                        [&](const auto&) { return cdf(dist, x); },
                    },
                    dist.variant());
}

double ccdf(const Distribution& dist, double x) {
  return std::visit(
      overloaded{
          [&](const Normal& n) { return normal_math::phi_cdf(-(x - n.mu) / std::sqrt(n.sigma2)); },
          [&](const Cauchy& c) { return cauchy_ccdf(c, x); },
          [&](const Uniform& u) { return std::clamp((u.b - x) / (u.b - u.a), 0.0, 1.0); },
          [&](const Exponential& e) { return x <= 0.0 ? 1.0 : std::exp(-e.rate * x); },
          [&](const auto&) { return 1.0 - cdf(dist, x); },
      },
      dist.variant());
}

double quantile(const Distribution& dist, double u) {
  require_probability(u);
  return std::visit(overloaded{
                        [&](const Dirac& d) { return d.point; },
                        [&](const FiniteDist& f) { return f.quantile(u); },
                        [&](const Normal& n) { return n.mu + std::sqrt(n.sigma2) * normal_math::phi_quantile(u); },
                        [&](const Cauchy& c) {
                          // mu + s tan(pi (u - 1/2)), written through the nearer tail
                          if (u < 0.5) {
                            return c.mu - c.scale / std::tan(std::numbers::pi * u);
                          }
                          return c.mu + c.scale / std::tan(std::numbers::pi * (1.0 - u));
                        },
                        [&](const Uniform& un) { return un.a + u * (un.b - un.a); },
                        [&](const Exponential& e) { return -std::log1p(-u) / e.rate; },
                    },
                    dist.variant());
}

double upper_quantile(const Distribution& dist, double q) {
  require_probability(q);
  return std::visit(overloaded{
                        [&](const Normal& n) { return n.mu - std::sqrt(n.sigma2) * normal_math::phi_quantile(q); },
                        [&](const Cauchy& c) { return c.mu + c.scale / std::tan(std::numbers::pi * q); },
                        [&](const Uniform& un) { return un.b - q * (un.b - un.a); },
                        [&](const Exponential& e) { return -std::log(q) / e.rate; },
                        [&](const auto&) { return quantile(dist, 1.0 - q); },
                    },
                    dist.variant());
}

double pdf(const Distribution& dist, double x) {
  return std::visit(overloaded{
                        [&](const Normal& n) {
                          const double s = std::sqrt(n.sigma2);
                          return normal_math::phi_pdf((x - n.mu) / s) / s;
                        },
                        [&](const Cauchy& c) {
                          const double z = (x - c.mu) / c.scale;
                          return 1.0 / (std::numbers::pi * c.scale * (1.0 + z * z));
                        },
                        [&](const Uniform& u) { return (x >= u.a && x <= u.b) ? 1.0 / (u.b - u.a) : 0.0; },
                        [&](const Exponential& e) { return x < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * x); },
                        [&](const auto&) -> double {
                          throw std::invalid_argument("discrete distribution has no density");
                        },
                    },
                    dist.variant());
}

double sample(const Distribution& dist, Philox& rng) {
  if (const auto* d = std::get_if<Dirac>(&dist.variant())) {
    return d->point;
  }
  return quantile(dist, rng.uniform());
}

double density_estimate(const Distribution& dist, double delta, double x) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("density_estimate requires delta > 0");
  }
  return (cdf(dist, x + delta) - cdf(dist, x - delta)) / (2.0 * delta);
}

Moment moment_order(const Distribution& dist, double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("moment order must be positive");
  }
  if (dist.kind() == DistKind::cauchy) {
    return beta < 1.0 ? Moment::finite : Moment::infinite;
  }
  return Moment::finite;
}

std::pair<double, double> support(const Distribution& dist) {
  return std::visit(overloaded{
                        [](const Dirac& d) { return std::pair{d.point, d.point}; },
                        [](const FiniteDist& f) { return std::pair{f.front(), f.back()}; },
                        [](const Uniform& u) { return std::pair{u.a, u.b}; },
                        [](const Exponential&) { return std::pair{0.0, inf}; },
                        [](const auto&) { return std::pair{-inf, inf}; },
                    },
                    dist.variant());
}

double shifted_cdf(const Distribution& dist, double shift, double x) {
  return std::visit(overloaded{
                        [&](const Dirac& d) { return d.point + shift <= x ? 1.0 : 0.0; },
                        [&](const FiniteDist& f) {
                          const auto& pts = f.points();
                          const auto it = std::partition_point(pts.begin(), pts.end(),
                                                               [&](double r) { return r + shift <= x; });
                          if (it == pts.begin()) {
                            return 0.0;
                          }
                          return f.cumulative()[static_cast<std::size_t>(it - pts.begin()) - 1];
                        },
                        [&](const auto&) { return cdf(dist, x - shift); },
                    },
                    dist.variant());
}

}  // namespace ddp
