#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ddp/rng.hpp"

namespace ddp {

/// Finitely supported distribution sum_i p_i delta_{x_i} with strictly
/// increasing support points. Zero-weight atoms are kept.
class FiniteDist {
 public:
  /// Sorts, merges exactly equal points (summing weights) and normalizes.
  /// Throws std::invalid_argument on empty input, length mismatch, negative or
  /// nonfinite entries, or zero total weight.
  static FiniteDist from_particles(std::span<const double> points, std::span<const double> weights);
  static FiniteDist point_mass(double x);

  [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  /// cumulative()[i] = p_1 + ... + p_{i+1}; the last entry is exactly 1.
  [[nodiscard]] const std::vector<double>& cumulative() const noexcept { return cumulative_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  /// Total weight before normalization.
  [[nodiscard]] double input_mass() const noexcept { return input_mass_; }

  [[nodiscard]] double cdf(double x) const noexcept;
  /// P(X < x)
  [[nodiscard]] double cdf_left(double x) const noexcept;
  /// Smallest support point whose cumulative weight is >= u.
  [[nodiscard]] double quantile(double u) const;
  [[nodiscard]] double front() const noexcept { return points_.front(); }
  [[nodiscard]] double back() const noexcept { return points_.back(); }

  friend bool operator==(const FiniteDist&, const FiniteDist&) = default;

 private:
  FiniteDist() = default;

  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double input_mass_ = 1.0;
};

FiniteDist finite_from_particles(std::span<const double> points, std::span<const double> weights);

struct Dirac {
  double point = 0.0;
  friend bool operator==(const Dirac&, const Dirac&) = default;
};
struct Normal {
  double mu = 0.0;
  double sigma2 = 1.0;
  friend bool operator==(const Normal&, const Normal&) = default;
};
struct Cauchy {
  double mu = 0.0;
  double scale = 1.0;
  friend bool operator==(const Cauchy&, const Cauchy&) = default;
};
struct Uniform {
  double a = 0.0;
  double b = 1.0;
  friend bool operator==(const Uniform&, const Uniform&) = default;
};
struct Exponential {
  double rate = 1.0;
  friend bool operator==(const Exponential&, const Exponential&) = default;
};

enum class DistKind { dirac, finite, normal, cauchy, uniform, exponential };

/// Reward or return distribution. Constructed only through the validating
/// factories, so every instance satisfies its family's parameter ranges.
class Distribution {
 public:
  using Variant = std::variant<Dirac, FiniteDist, Normal, Cauchy, Uniform, Exponential>;

  static Distribution dirac(double point);
  static Distribution finite(FiniteDist dist);
  static Distribution normal(double mu, double sigma2);
  static Distribution cauchy(double mu, double scale);
  static Distribution uniform(double a, double b);
  static Distribution exponential(double rate);

  [[nodiscard]] const Variant& variant() const noexcept { return value_; }
  [[nodiscard]] DistKind kind() const noexcept { return static_cast<DistKind>(value_.index()); }
  /// Dirac or finite.
  [[nodiscard]] bool is_discrete() const noexcept {
    return kind() == DistKind::dirac || kind() == DistKind::finite;
  }
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  explicit Distribution(Variant v) : value_(std::move(v)) {}
  Variant value_;
};

double cdf(const Distribution& dist, double x);
/// P(X < x); equals cdf for continuous families.
double cdf_left(const Distribution& dist, double x);
/// 1 - cdf(x), evaluated without cancellation in the upper tail.
double ccdf(const Distribution& dist, double x);
/// Left-continuous generalized inverse; throws unless 0 < u < 1.
double quantile(const Distribution& dist, double u);
/// quantile(1 - q), accurate for tiny q.
double upper_quantile(const Distribution& dist, double q);
/// Density of a continuous family; throws for discrete ones.
double pdf(const Distribution& dist, double x);
/// Inverse-transform sample.
double sample(const Distribution& dist, Philox& rng);
/// (F(x + delta) - F(x - delta)) / (2 delta)
double density_estimate(const Distribution& dist, double delta, double x);

enum class Moment { finite, infinite };
/// Whether E|X|^beta is finite.
Moment moment_order(const Distribution& dist, double beta);

/// Closed support hull [lo, hi]; entries may be infinite.
std::pair<double, double> support(const Distribution& dist);

/// P(X + shift <= x). Discrete families compare `atom + shift` directly so the
/// result agrees bit-for-bit with materialized atoms.
double shifted_cdf(const Distribution& dist, double shift, double x);

namespace normal_math {
/// Standard normal CDF.
double phi_cdf(double z);
/// Standard normal density.
double phi_pdf(double z);
/// Standard normal quantile: Wichura AS241 followed by one Newton step.
double phi_quantile(double p);
}  // namespace normal_math

}  // namespace ddp
