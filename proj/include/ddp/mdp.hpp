#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ddp/distributions.hpp"
#include "ddp/rng.hpp"

namespace ddp {

/// Finite MDP with a fixed policy. Indexing is [s][a][s'] throughout.
struct MdpSpec {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  double gamma = 0.5;
  std::vector<std::vector<double>> policy;
  std::vector<std::vector<std::vector<double>>> transition;
  std::vector<std::vector<std::vector<Distribution>>> rewards;

  [[nodiscard]] std::size_t num_states() const noexcept { return states.size(); }
  [[nodiscard]] std::size_t num_actions() const noexcept { return actions.size(); }
  /// Dense index of a state label; throws std::out_of_range.
  [[nodiscard]] std::size_t state_index(const std::string& label) const;
};

/// One reachable (a, s') pair from a state together with pi(a|s) p(s'|s,a).
struct Branch {
  std::size_t action;
  std::size_t next;
  double weight;
};

/// Branches with positive weight, in (a, s') lexicographic order.
std::vector<Branch> branches(const MdpSpec& mdp, std::size_t s);

struct ValidationReport {
  std::vector<std::string> violations;
  /// Non-fatal findings, e.g. finite rewards whose input weights did not sum to 1.
  std::vector<std::string> warnings;
  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const MdpSpec& mdp);

/// Throws std::invalid_argument listing the first violation.
void require_valid(const MdpSpec& mdp);

/// True when every reachable reward from `s` is dirac or finite.
bool has_finite_rewards(const MdpSpec& mdp, std::size_t s);
bool has_finite_rewards(const MdpSpec& mdp);

/// Discounted reward sum of one simulated trajectory of length `horizon`
/// started in `s`.
double sample_truncated_return(const MdpSpec& mdp, std::size_t s, int horizon, Philox& rng);

}  // namespace ddp
