#pragma once

#include <string>
#include <vector>

#include "ddp/bellman.hpp"
#include "ddp/distributions.hpp"

namespace ddp {

/// Nonnegative distance that may be +infinity.
struct ExtendedValue {
  double value = 0.0;
  /// Reason for an infinite value; empty otherwise.
  std::string note;

  [[nodiscard]] bool is_infinite() const noexcept;
  static ExtendedValue infinite(std::string why);
};

/// Kolmogorov-Smirnov distance sup_x |F_mu(x) - F_nu(x)|.
double ks(const Distribution& mu, const Distribution& nu);

/// Wasserstein distance w_beta: the beta-th root of int |F_mu^{-1} - F_nu^{-1}|^beta du
/// for beta >= 1 and the raw integral for beta < 1. beta may be +infinity.
ExtendedValue wasserstein(const Distribution& mu, const Distribution& nu, double beta);

/// Cramer-type distance (int |F_mu - F_nu|^beta dx)^{1/beta} for beta >= 1.
ExtendedValue lp_cdf_distance(const Distribution& mu, const Distribution& nu, double beta);

enum class MetricKind { ks, wasserstein, cdf_lp };

struct MetricSpec {
  MetricKind kind = MetricKind::ks;
  double beta = 1.0;

  /// Accepts "ks", "w1", "l2", "wbeta:<b>" and "lbeta:<b>".
  static MetricSpec parse(const std::string& name);
  /// Canonical name, e.g. "w1" or "lbeta:3".
  [[nodiscard]] std::string name() const;
  /// Homogeneity order c: min(1, beta) for w_beta, 1/beta for l_beta.
  [[nodiscard]] double homogeneity() const;
};

std::vector<MetricSpec> parse_metric_list(const std::string& csv);

ExtendedValue evaluate(const MetricSpec& metric, const Distribution& mu, const Distribution& nu);

/// Maximum of the componentwise metric; any infinite component makes it infinite.
ExtendedValue max_over_states(const MetricSpec& metric, const std::vector<Distribution>& eta,
                              const std::vector<Distribution>& eta_star);

std::vector<Distribution> as_distributions(const ReturnApprox& eta);

struct HolderParams {
  double M = 1.0;
  double rho = 1.0;
  double C = 1.0;
  double tau = 1.0;
};

/// a^{-a} M^{1-a} w^{a (1 v beta)} with a = rho / (rho + beta).
double ks_from_wasserstein_bound(double w_val, double beta, const HolderParams& hp);

/// ks / delta + C delta^tau.
double density_sup_bound(double ks_val, double delta, const HolderParams& hp);

}  // namespace ddp
