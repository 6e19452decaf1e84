#pragma once

#include <cstddef>
#include <vector>

#include "ddp/distributions.hpp"
#include "ddp/mdp.hpp"
#include "ddp/projection.hpp"

namespace ddp {

/// One finitely supported approximation per state.
using ReturnApprox = std::vector<FiniteDist>;

/// Every state at dirac(x).
ReturnApprox constant_approx(std::size_t num_states, double x = 0.0);

/// Throws std::invalid_argument unless `eta` has one entry per state.
void require_matching(const MdpSpec& mdp, const ReturnApprox& eta);

/// Largest atom count `materialize_bellman_finite` will produce.
inline constexpr std::size_t materialize_atom_cap = 10'000'000;

/// CDF of T_s eta at x: sum over branches and atoms of
/// pi p w F_{s a s'}(x - gamma z).
double bellman_cdf(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, double x);

/// Exact T_s eta with atoms r + gamma z. Requires dirac/finite rewards on every
/// reachable branch.
FiniteDist materialize_bellman_finite(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta,
                                      std::size_t atom_cap = materialize_atom_cap);

/// Pi(T_s eta, xi) computed from differences of the mixture CDF.
FiniteDist project_bellman(const MdpSpec& mdp, std::size_t s, const ReturnApprox& eta, const ProjectionParam& xi);

/// Materialized T eta for every state.
ReturnApprox apply_bellman_finite(const MdpSpec& mdp, const ReturnApprox& eta);

}  // namespace ddp
