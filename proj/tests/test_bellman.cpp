#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ddp/bellman.hpp"
#include "ddp/io.hpp"
#include "ddp/metrics.hpp"
#include "support/oracles.hpp"

using namespace ddp;

namespace {

double phi(double x) { return oracle::normal_cdf(0.0, 1.0, x); }

FiniteDist two_point() {
  return FiniteDist::from_particles(std::vector<double>{0, 2}, std::vector<double>{0.5, 0.5});
}

}  // namespace

TEST(BellmanCdf, SingleTerm) {
  const auto m = oracle::self_loop(Distribution::normal(0.0, 1.0), 0.5);
  const ReturnApprox eta = constant_approx(1);
  for (double x = -4; x <= 4; x += 0.37) EXPECT_NEAR(bellman_cdf(m, 0, eta, x), phi(x), 1e-14);
}

TEST(BellmanCdf, TwoTermMixture) {
  const auto m = oracle::self_loop(Distribution::normal(0.0, 1.0), 0.5);
  const ReturnApprox eta{two_point()};
  for (double x = -4; x <= 5; x += 0.29) {
    EXPECT_NEAR(bellman_cdf(m, 0, eta, x), 0.5 * phi(x) + 0.5 * phi(x - 1.0), 1e-14);
  }
}

TEST(BellmanCdf, UpperLimit) {
  const auto m = oracle::self_loop(Distribution::normal(0.0, 1.0), 0.5);
  const ReturnApprox eta{two_point()};
  const double x = upper_quantile(Distribution::normal(0.0, 1.0), 1e-12) + 1e3;
  EXPECT_GE(bellman_cdf(m, 0, eta, x), 1.0 - 1e-9);
}

TEST(BellmanCdf, RejectsMismatch) {
  const auto m = oracle::self_loop(Distribution::normal(0.0, 1.0), 0.5);
  EXPECT_THROW(bellman_cdf(m, 0, constant_approx(2), 0.0), std::invalid_argument);
}

TEST(BellmanCdf, MonotoneAndMatchesDirectSum) {
  Philox rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    MdpSpec m = oracle::random_finite_mdp(rng, 3, 3, 4);
    // swap in some continuous rewards
    m.rewards[0][0][0] = Distribution::normal(0.5, 1.5);
    const auto eta = oracle::random_approx(rng, m.num_states(), 6, -5, 5);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      std::vector<double> xs(60);
      for (auto& x : xs) x = oracle::uniform_real(rng, -12, 12);
      std::sort(xs.begin(), xs.end());
      double prev = 0.0;
      for (double x : xs) {
        const double v = bellman_cdf(m, s, eta, x);
        EXPECT_GE(v, prev - 1e-15);
        EXPECT_NEAR(v, oracle::mixture_cdf(m, s, eta, x), 1e-13);
        prev = v;
      }
    }
  }
}

TEST(Materialize, Examples) {
  const auto a = materialize_bellman_finite(oracle::self_loop(Distribution::dirac(1.0), 0.5), 0, constant_approx(1));
  EXPECT_EQ(a.points(), (std::vector<double>{1}));
  EXPECT_EQ(a.weights(), (std::vector<double>{1}));

  const auto reward = FiniteDist::from_particles(std::vector<double>{0, 1}, std::vector<double>{0.5, 0.5});
  const auto b = materialize_bellman_finite(oracle::self_loop(Distribution::finite(reward), 0.5), 0, {two_point()});
  EXPECT_EQ(b.points(), (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(b.weights(), (std::vector<double>{0.25, 0.5, 0.25}));
}

TEST(Materialize, RejectsContinuousRewards) {
  const auto m = oracle::self_loop(Distribution::normal(0.0, 1.0), 0.5);
  EXPECT_THROW(materialize_bellman_finite(m, 0, constant_approx(1)), std::invalid_argument);
}

TEST(Materialize, AtomCap) {
  const auto reward = FiniteDist::from_particles(std::vector<double>{0, 1, 2}, std::vector<double>{1, 1, 1});
  const auto m = oracle::self_loop(Distribution::finite(reward), 0.5);
  const ReturnApprox eta{FiniteDist::from_particles(std::vector<double>{0, 10, 20, 30}, std::vector<double>{1, 1, 1, 1})};
  EXPECT_THROW(materialize_bellman_finite(m, 0, eta, 11), std::length_error);
  EXPECT_EQ(materialize_bellman_finite(m, 0, eta, 12).size(), 12U);
}

TEST(Materialize, MatchesEnumerationAndCdf) {
  Philox rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const MdpSpec m = oracle::random_finite_mdp(rng, 4, 4, 5);
    const auto eta = oracle::random_approx(rng, m.num_states(), 6, -5, 5);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      const auto f = materialize_bellman_finite(m, s, eta);
      const auto atoms = oracle::bellman_atoms(m, s, eta);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.points()[i];
        EXPECT_NEAR(f.cdf(x), oracle::atoms_cdf(atoms, x), 1e-12);
        EXPECT_NEAR(f.cdf(x), bellman_cdf(m, s, eta, x), 1e-12);
      }
    }
  }
}

TEST(ProjectBellman, MiddleCell) {
  const auto m = oracle::self_loop(Distribution::dirac(1.0), 0.5);
  const auto p = project_bellman(m, 0, constant_approx(1), {{0, 1, 2}, {0.5, 1.5}});
  EXPECT_EQ(p.points(), (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(p.weights(), (std::vector<double>{0, 1, 0}));
}

TEST(ProjectBellman, CircularNormalFirstStep) {
  const auto m = io::load_mdp(std::string(DDP_CONFIG_DIR) + "/mdp_i.json");
  const auto p = project_bellman(m, 0, constant_approx(3), xi_lin(3, 10.0, 0.0));
  // reward normal(-3, 1); cut points at -5 and 5
  const double lo = oracle::normal_cdf(-3.0, 1.0, -5.0);
  const double hi = 1.0 - oracle::normal_cdf(-3.0, 1.0, 5.0);
  ASSERT_EQ(p.size(), 3U);
  EXPECT_NEAR(p.weights()[0], lo, 1e-14);
  EXPECT_NEAR(p.weights()[0], 0.02275, 1e-5);
  EXPECT_NEAR(p.weights()[1], 1.0 - lo - hi, 1e-14);
  EXPECT_NEAR(p.weights()[2], hi, 1e-16);
  EXPECT_LT(p.weights()[2], 1e-15);  // P(N(-3,1) > 5) = 6.2e-16
}

TEST(ProjectBellman, RejectsInvalidXi) {
  const auto m = oracle::self_loop(Distribution::dirac(1.0), 0.5);
  EXPECT_THROW(project_bellman(m, 0, constant_approx(1), {{0, 1}, {2}}), std::invalid_argument);
}

TEST(ProjectBellman, EqualsProjectOfMaterialized) {
  Philox rng(43);
  int instances = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const MdpSpec m = oracle::random_finite_mdp(rng, 4, 4, 5);
    const auto eta = oracle::random_approx(rng, m.num_states(), 6, -5, 5);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      const auto mat = materialize_bellman_finite(m, s, eta);
      const auto xi = xi_lin(static_cast<std::size_t>(oracle::uniform_int(rng, 1, 30)), oracle::uniform_real(rng, 0.5, 8),
                             oracle::uniform_real(rng, -2, 2));
      const auto a = project_bellman(m, s, eta, xi);
      const auto b = project(Distribution::finite(mat), xi);
      ASSERT_EQ(a.points(), b.points());
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.weights()[i], b.weights()[i], 1e-12);
      ++instances;
    }
  }
  EXPECT_GE(instances, 100);
}

TEST(ProjectBellman, WeightsBeforeClippingSumToOne) {
  Philox rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    MdpSpec m = oracle::random_finite_mdp(rng, 3, 2, 3);
    m.rewards[0][0][0] = Distribution::cauchy(0.0, 2.0);
    const auto eta = oracle::random_approx(rng, m.num_states(), 5, -5, 5);
    const auto xi = xi_lin(40, 6.0, 0.0);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      double raw = 0.0;
      double prev = 0.0;
      for (double y : xi.ys) {
        const double F = bellman_cdf(m, s, eta, y);
        EXPECT_GE(F - prev, -1e-9);
        raw += F - prev;
        prev = F;
      }
      raw += 1.0 - prev;
      EXPECT_NEAR(raw, 1.0, 1e-9);
      const auto p = project_bellman(m, s, eta, xi);
      for (double w : p.weights()) EXPECT_GE(w, 0.0);
    }
  }
}

TEST(Contraction, WassersteinOne) {
  Philox rng(45);
  const MetricSpec w1{MetricKind::wasserstein, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    const MdpSpec m = oracle::random_finite_mdp(rng, 4, 3, 4);
    const auto a = oracle::random_approx(rng, m.num_states(), 6, -6, 6);
    const auto b = oracle::random_approx(rng, m.num_states(), 6, -6, 6);
    const double before = max_over_states(w1, as_distributions(a), as_distributions(b)).value;
    const double after =
        max_over_states(w1, as_distributions(apply_bellman_finite(m, a)), as_distributions(apply_bellman_finite(m, b)))
            .value;
    EXPECT_LE(after, m.gamma * before + 1e-9);
  }
}
