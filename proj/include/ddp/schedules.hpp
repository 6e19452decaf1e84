#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "ddp/bellman.hpp"
#include "ddp/mdp.hpp"
#include "ddp/projection.hpp"

namespace ddp {

enum class Algo { ppa, adp, qsp, qdp };
enum class SizeMode { exponential, constant };

std::string to_string(Algo algo);
/// Parses "ppa", "adp", "qsp" or "qdp"; throws std::invalid_argument.
Algo parse_algo(const std::string& name);

struct ScheduleConfig {
  Algo algo = Algo::adp;
  /// Growth base of M(k) = ceil((1/theta)^k). Unset means (gamma + 1) / 2.
  std::optional<double> theta;
  SizeMode size_mode = SizeMode::exponential;
  std::size_t constant_m = 50;
  /// M'(k) = ceil(spline_fraction * (1/theta)^k), or ceil(fraction * m) in constant mode.
  double spline_fraction = 0.25;
  /// PPA window W(k) = ppa_w0 * ppa_growth^k centred at ppa_z.
  double ppa_w0 = 10.0;
  double ppa_growth = 1.0;
  double ppa_z = 0.0;
};

/// Copy of `cfg` with theta filled in from gamma; validates all ranges.
ScheduleConfig resolve_schedule(ScheduleConfig cfg, double gamma);

struct SizeStep {
  std::size_t m;
  std::size_t m_prime;
  double eps_u;
};

/// Largest M(k) a schedule may request.
inline constexpr double max_schedule_size = 1e8;

/// Sizes for iteration k >= 1. Requires a resolved theta in exponential mode.
SizeStep size_schedule(const ScheduleConfig& cfg, std::size_t k);

/// Quantile levels (1 - sqrt(1 - eps), sqrt(1 - eps)).
std::pair<double, double> box_levels(double eps_u);

/// Interval carrying at least 1 - 2 eps_u of T_s eta.
std::pair<double, double> quantile_box(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, double eps_u);

ProjectionParam ppa_params(const ScheduleConfig& cfg, std::size_t k);
ProjectionParam adp_params(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, std::size_t k,
                           const ScheduleConfig& cfg);
ProjectionParam qsp_params(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, std::size_t k,
                           const ScheduleConfig& cfg);

/// Uniform-weight distribution on the exact quantiles of T_s eta at (2i-1)/(2m).
FiniteDist qdp_update(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, std::size_t m);

/// Monotone piecewise-linear inverse-CDF spline through (p_l, z_l) anchors.
class QuantileSpline {
 public:
  /// Drops any anchor whose probability repeats an earlier one.
  QuantileSpline(std::vector<double> probs, std::vector<double> values);
  /// Clamps to the first/last anchor outside their probability range.
  [[nodiscard]] double operator()(double u) const;
  [[nodiscard]] const std::vector<double>& probs() const noexcept { return probs_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> probs_;
  std::vector<double> values_;
};

}  // namespace ddp
