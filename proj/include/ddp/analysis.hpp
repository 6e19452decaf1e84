#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddp/distributions.hpp"
#include "ddp/mdp.hpp"
#include "ddp/schedules.hpp"

namespace ddp {

/// Li_{-r}(z) = sum_{k>=1} k^r z^k for r > 0 and 0 < z < 1.
double polylog_neg(double r, double z);

/// Decay pattern of per-iteration projection errors PE(k).
struct ApePattern {
  enum class Kind { constant, polynomial, exponential };
  Kind kind = Kind::constant;
  double D = 1.0;
  double r = 1.0;      ///< polynomial: PE(k) <= D k^{-r}
  double theta = 0.5;  ///< exponential: PE(k) <= D theta^k

  static ApePattern constant(double D) { return {Kind::constant, D, 1.0, 0.5}; }
  static ApePattern polynomial(double D, double r) { return {Kind::polynomial, D, r, 0.5}; }
  static ApePattern exponential(double D, double theta) { return {Kind::exponential, D, 1.0, theta}; }
};

/// Closed-form bound on APE(n) = sum_k gamma_c^{n-k} PE(k).
double ape_bound(const ApePattern& pattern, double gamma_c, std::size_t n);

/// Error bound e(n) for QDP with size function M from `schedule`, span
/// v_max - v_min and discount gamma.
double qdp_error(double gamma, double span, const ScheduleConfig& schedule, std::size_t n);
/// time(n) = sum_{k<=n} M(k) log M(k).
double qdp_time(const ScheduleConfig& schedule, std::size_t n);
/// n(T) = max{n : time(n) <= T}, searched up to n_max.
std::size_t qdp_iterations_within(const ScheduleConfig& schedule, double T, std::size_t n_max);
/// span * (1 / (2 m (1 - gamma)) + gamma^n), valid for constant M = m.
double qdp_constant_bound(double gamma, double span, std::size_t m, std::size_t n);

struct TradeoffPoint {
  double T;
  std::size_t n;
  double e;
};

/// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

std::vector<TradeoffPoint> qdp_curve(double gamma, double span, const ScheduleConfig& schedule,
                                     const std::vector<double>& Ts, std::size_t n_max);

/// Tail information of a reward (or return) law around a centre z.
struct MomentInfo {
  enum class Kind { polynomial, exponential, bounded };
  Kind kind = Kind::bounded;
  double alpha = 0.0;   ///< polynomial order
  double lambda = 0.0;  ///< exponential rate
  /// E|X - z|^alpha (polynomial) or E exp(lambda |X - z|) (exponential).
  double moment = 0.0;

  static MomentInfo polynomial(double alpha, double moment) { return {Kind::polynomial, alpha, 0.0, moment}; }
  static MomentInfo exponential(double lambda, double moment) { return {Kind::exponential, 0.0, lambda, moment}; }
  static MomentInfo bounded() { return {}; }
};

enum class TailFlavor { w_beta, l_beta };

/// Closed-form majorant of tail_{w_beta}(mu, z, w) or tail_{l_beta}(mu, z, w).
double tail_bound(const MomentInfo& info, double w, double beta, TailFlavor flavor);

/// Quadrature of the tail term: int_0^inf x^{beta-1} P(|X-z| > w+x) dx for
/// w_beta, int_0^inf P(|X-z| > w+x)^beta dx for l_beta. +infinity when the
/// integral diverges for a Cauchy law.
double tail_integral(const Distribution& dist, double z, double w, double beta, TailFlavor flavor);

/// Schedule inputs and value range shared by the bound calculators.
struct AnalysisConfig {
  double gamma = 0.5;
  double c = 1.0;
  double v_min = 0.0;
  double v_max = 1.0;
  /// P(z, alpha), E(z, lambda) or the bounded flag for the reward laws.
  MomentInfo moments;
};

/// PPA shape at iteration k: M(k) points on [z - W(k), z + W(k)].
struct PpaShape {
  std::size_t M;
  double W;
  double z;
};

/// 4 max{delta(k)^e, T(k)} with delta(k) = 2 W(k) / (M(k) - 1).
double pe_bound(const AnalysisConfig& acfg, const PpaShape& shape, double beta, TailFlavor flavor);

/// Quantile range implied by an absolute alpha-moment D = E|X|^alpha.
std::pair<double, double> moment_quantile_bound(double alpha, double D, double u);

/// Exponents for finite alpha: beta = alpha/(alpha+1), M(k) ~ (1/theta)^{m_exp k},
/// eps_u(k) ~ theta^{eps_exp k}.
struct AdpExponents {
  double beta;
  double m_exponent;
  double eps_exponent;
};
AdpExponents recommended_adp_exponents(double alpha);

/// Exact return laws for a deterministic cycle whose i-th step pays an
/// independent reward from `cycle_rewards[i]`. All entries must be
/// normal/dirac or all cauchy/dirac. Entry i of the result is the law seen
/// from cycle position i.
std::vector<Distribution> circular_reference(const std::vector<Distribution>& cycle_rewards, double gamma);

/// Per-state exact return laws when `mdp` has one action and deterministic
/// transitions forming a single cycle with location-scale rewards.
std::optional<std::vector<Distribution>> auto_circular(const MdpSpec& mdp);

}  // namespace ddp
