#include "ddp/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ddp {

namespace {

// One mixture component: weight * F_reward(x - shift).
struct Term {
  const Distribution* reward;
  double shift;
  double weight;
};

std::vector<Term> mixture_terms(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta) {
  std::vector<Term> terms;
  for (const auto& b : branches(mdp, s)) {
    const auto& next = eta[b.next];
    const auto& z = next.points();
    const auto& w = next.weights();
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (w[i] > 0.0) {
        terms.push_back({&mdp.rewards[s][b.action][b.next], mdp.gamma * z[i], b.weight * w[i]});
      }
    }
  }
  return terms;
}

double mixture_cdf(const std::vector<Term>& terms, double x) {
  double acc = 0.0;
  for (const auto& t : terms) {
    acc += t.weight * shifted_cdf(*t.reward, t.shift, x);
  }
  return acc;
}

}  // namespace

ReturnApprox constant_approx(std::size_t num_states, double x) {
  return ReturnApprox(num_states, FiniteDist::point_mass(x));
}

void require_matching(const MdpSpec& mdp, const ReturnApprox& eta) {
  if (eta.size() != mdp.num_states()) {
    throw std::invalid_argument("return approximation has " + std::to_string(eta.size()) + " states, MDP has " +
                                std::to_string(mdp.num_states()));
  }
}

double bellman_cdf(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, double x) {
  require_matching(mdp, eta);
  return mixture_cdf(mixture_terms(mdp, s, eta), x);
}

FiniteDist materialize_bellman_finite(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta,
                                      std::size_t atom_cap) {
  require_matching(mdp, eta);
  std::vector<double> points;
  std::vector<double> weights;
  for (const auto& b : branches(mdp, s)) {
    const auto& reward = mdp.rewards[s][b.action][b.next];
    if (!reward.is_discrete()) {
      throw std::invalid_argument("materialization requires finitely supported rewards; state " +
                                  std::to_string(s) + " reaches " + reward.describe());
    }
    const FiniteDist r = std::holds_alternative<Dirac>(reward.variant())
                             ? FiniteDist::point_mass(std::get<Dirac>(reward.variant()).point)
                             : std::get<FiniteDist>(reward.variant());
    const auto& next = eta[b.next];
    if (points.size() + r.size() * next.size() > atom_cap) {
      throw std::length_error("materialized distribution exceeds " + std::to_string(atom_cap) + " atoms");
    }
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double shift = mdp.gamma * next.points()[i];
      const double wz = b.weight * next.weights()[i];
      if (!(wz > 0.0)) {
        continue;
      }
      for (std::size_t l = 0; l < r.size(); ++l) {
        points.push_back(r.points()[l] + shift);
        weights.push_back(wz * r.weights()[l]);
      }
    }
  }
  if (points.empty()) {
    throw std::invalid_argument("state " + std::to_string(s) + " has no reachable transition");
  }
  return FiniteDist::from_particles(points, weights);
}

FiniteDist project_bellman(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, const ProjectionParam& xi) {
  require_matching(mdp, eta);
  validate_xi(xi);
  const auto terms = mixture_terms(mdp, s, eta);
  double mass = 0.0;
  for (const auto& t : terms) {
    mass += t.weight;
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    throw std::runtime_error("Bellman mixture for state " + std::to_string(s) + " has mass " + std::to_string(mass));
  }
  return project_cdf([&](double y) { return mixture_cdf(terms, y); }, xi, mass);
}

ReturnApprox apply_bellman_finite(const MdpSpec& mdp, const ReturnApprox& eta) {
  ReturnApprox out;
  out.reserve(mdp.num_states());
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    out.push_back(materialize_bellman_finite(mdp, s, eta));
  }
  return out;
}

}  // namespace ddp
