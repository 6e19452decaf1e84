#include "ddp/mdp.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ddp {

namespace {

constexpr double stochastic_tol = 1e-9;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::size_t draw_index(const std::vector<double>& probs, double u) {
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) {
      continue;
    }
    last_positive = i;
    running += probs[i];
    if (u < running) {
      return i;
    }
  }
  return last_positive;
}

}  // namespace

std::size_t MdpSpec::state_index(const std::string& label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) {
      return i;
    }
  }
  throw std::out_of_range("unknown state '" + label + "'");
}

std::vector<Branch> branches(const MdpSpec& mdp, std::size_t s) {
  if (s >= mdp.num_states()) {
    throw std::out_of_range("state index out of range");
  }
  std::vector<Branch> out;
  for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
    const double pa = mdp.policy[s][a];
    if (pa <= 0.0) {
      continue;
    }
    for (std::size_t t = 0; t < mdp.num_states(); ++t) {
      const double w = pa * mdp.transition[s][a][t];
      if (w > 0.0) {
        out.push_back({a, t, w});
      }
    }
  }
  return out;
}

ValidationReport validate(const MdpSpec& mdp) {
  ValidationReport rep;
  auto& v = rep.violations;
  const std::size_t ns = mdp.num_states();
  const std::size_t na = mdp.num_actions();
  if (ns == 0) {
    v.emplace_back("no states");
  }
  if (na == 0) {
    v.emplace_back("no actions");
  }
  if (!(mdp.gamma > 0.0 && mdp.gamma < 1.0)) {
    v.push_back("gamma outside (0,1): " + fmt(mdp.gamma));
  }
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = i + 1; j < ns; ++j) {
      if (mdp.states[i] == mdp.states[j]) {
        v.push_back("duplicate state label '" + mdp.states[i] + "'");
      }
    }
  }
  if (!v.empty() && (ns == 0 || na == 0)) {
    return rep;
  }

  if (mdp.policy.size() != ns) {
    v.push_back("policy has " + std::to_string(mdp.policy.size()) + " rows, expected " + std::to_string(ns));
  } else {
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& row = mdp.policy[s];
      if (row.size() != na) {
        v.push_back("policy row " + std::to_string(s) + " has " + std::to_string(row.size()) + " entries");
        continue;
      }
      double sum = 0.0;
      bool bad_entry = false;
      for (std::size_t a = 0; a < na; ++a) {
        if (!std::isfinite(row[a]) || row[a] < 0.0) {
          v.push_back("policy entry (" + std::to_string(s) + "," + std::to_string(a) + ") is negative or nonfinite");
          bad_entry = true;
        }
        sum += row[a];
      }
      if (!bad_entry && std::abs(sum - 1.0) > stochastic_tol) {
        v.push_back("policy row " + std::to_string(s) + " sums to " + fmt(sum));
      }
    }
  }

  const bool shape_ok = mdp.transition.size() == ns && mdp.rewards.size() == ns;
  if (!shape_ok) {
    v.emplace_back("transition/rewards must have one entry per state");
    return rep;
  }
  for (std::size_t s = 0; s < ns; ++s) {
    if (mdp.transition[s].size() != na || mdp.rewards[s].size() != na) {
      v.push_back("transition/rewards for state " + std::to_string(s) + " must have one entry per action");
      continue;
    }
    for (std::size_t a = 0; a < na; ++a) {
      const auto& slice = mdp.transition[s][a];
      if (slice.size() != ns || mdp.rewards[s][a].size() != ns) {
        v.push_back("transition/rewards slice (" + std::to_string(s) + "," + std::to_string(a) +
                    ") must have one entry per state");
        continue;
      }
      double sum = 0.0;
      bool bad_entry = false;
      for (std::size_t t = 0; t < ns; ++t) {
        if (!std::isfinite(slice[t]) || slice[t] < 0.0) {
          v.push_back("transition entry (" + std::to_string(s) + "," + std::to_string(a) + "," +
                      std::to_string(t) + ") is negative or nonfinite");
          bad_entry = true;
        }
        sum += slice[t];
        if (const auto* f = std::get_if<FiniteDist>(&mdp.rewards[s][a][t].variant())) {
          if (std::abs(f->input_mass() - 1.0) > 1e-6) {
            rep.warnings.push_back("reward (" + std::to_string(s) + "," + std::to_string(a) + "," +
                                   std::to_string(t) + ") weights summed to " + fmt(f->input_mass()) +
                                   " before normalization");
          }
        }
      }
      if (!bad_entry && std::abs(sum - 1.0) > stochastic_tol) {
        v.push_back("transition slice (" + std::to_string(s) + "," + std::to_string(a) + ") sums to " + fmt(sum));
      }
    }
  }
  return rep;
}

void require_valid(const MdpSpec& mdp) {
  const auto rep = validate(mdp);
  if (!rep.ok()) {
    throw std::invalid_argument("invalid MDP: " + rep.violations.front());
  }
}

bool has_finite_rewards(const MdpSpec& mdp, std::size_t s) {
  for (const auto& b : branches(mdp, s)) {
    if (!mdp.rewards[s][b.action][b.next].is_discrete()) {
      return false;
    }
  }
  return true;
}

bool has_finite_rewards(const MdpSpec& mdp) {
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    if (!has_finite_rewards(mdp, s)) {
      return false;
    }
  }
  return true;
}

double sample_truncated_return(const MdpSpec& mdp, std::size_t s, int horizon, Philox& rng) {
  if (s >= mdp.num_states()) {
    throw std::out_of_range("unknown state index " + std::to_string(s));
  }
  if (horizon < 1) {
    throw std::invalid_argument("horizon must be at least 1");
  }
  double total = 0.0;
  double discount = 1.0;
  std::size_t state = s;
  for (int t = 0; t < horizon; ++t) {
    const std::size_t a = draw_index(mdp.policy[state], rng.uniform());
    const std::size_t next = draw_index(mdp.transition[state][a], rng.uniform());
    total += discount * sample(mdp.rewards[state][a][next], rng);
    discount *= mdp.gamma;
    state = next;
  }
  return total;
}

}  // namespace ddp
