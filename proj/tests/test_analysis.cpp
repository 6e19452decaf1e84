#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ddp/analysis.hpp"
#include "ddp/bellman.hpp"
#include "ddp/io.hpp"
#include "ddp/metrics.hpp"
#include "ddp/projection.hpp"
#include "support/oracles.hpp"

using namespace ddp;

namespace {

MdpSpec load(const std::string& name) { return io::load_mdp(std::string(DDP_CONFIG_DIR) + "/" + name); }

ScheduleConfig constant_m(std::size_t m) {
  ScheduleConfig c;
  c.algo = Algo::qdp;
  c.size_mode = SizeMode::constant;
  c.constant_m = m;
  return c;
}

ScheduleConfig exp_m(double theta) {
  ScheduleConfig c;
  c.algo = Algo::qdp;
  c.theta = theta;
  return c;
}

/// Quantile discretization of a continuous law with n equal atoms.
FiniteDist quantile_atoms(const Distribution& d, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = quantile(d, (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  return FiniteDist::from_particles(x, std::vector<double>(n, 1.0));
}

}  // namespace

TEST(Polylog, ClosedForms) {
  EXPECT_NEAR(polylog_neg(1.0, 0.5), 2.0, 1e-13);
  EXPECT_NEAR(polylog_neg(2.0, 0.5), 6.0, 1e-13);
  for (double z = 0.05; z < 0.96; z += 0.05) {
    EXPECT_NEAR(polylog_neg(1.0, z) / (z / ((1 - z) * (1 - z))), 1.0, 1e-12) << z;
    EXPECT_NEAR(polylog_neg(3.0, z) / (z * (1 + 4 * z + z * z) / std::pow(1 - z, 4)), 1.0, 1e-12) << z;
  }
  // mpmath.polylog
  EXPECT_NEAR(polylog_neg(0.5, 0.3), 0.498314387036833, 1e-13);
  EXPECT_NEAR(polylog_neg(2.5, 0.9) / 8753.94876967801, 1.0, 1e-12);
}

TEST(Polylog, RejectsBadArguments) {
  EXPECT_THROW(polylog_neg(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(polylog_neg(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(polylog_neg(0.0, 0.5), std::invalid_argument);
}

TEST(ApeBound, Examples) {
  EXPECT_NEAR(ape_bound(ApePattern::constant(1.0), 0.7, 12), 10.0 / 3.0, 1e-14);
  EXPECT_NEAR(ape_bound(ApePattern::exponential(1.0, 0.7), 0.7, 5), 5.0 * std::pow(0.7, 5), 1e-15);
  EXPECT_THROW(ape_bound(ApePattern::exponential(1.0, 1.0), 0.7, 5), std::invalid_argument);
  EXPECT_THROW(ape_bound(ApePattern::constant(1.0), 1.0, 5), std::invalid_argument);
}

TEST(ApeBound, DominatesDirectSum) {
  Philox rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    const double gc = oracle::uniform_real(rng, 0.05, 0.95);
    const double D = oracle::uniform_real(rng, 0.1, 10);
    const auto n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 80));
    std::vector<ApePattern> patterns{ApePattern::constant(D),
                                     ApePattern::polynomial(D, oracle::uniform_real(rng, 0.2, 4)),
                                     ApePattern::exponential(D, oracle::uniform_real(rng, 0.05, 0.95)),
                                     ApePattern::exponential(D, gc)};
    for (const auto& p : patterns) {
      double sum = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const auto kd = static_cast<double>(k);
        double pe = D;
        if (p.kind == ApePattern::Kind::polynomial) pe = D * std::pow(kd, -p.r);
        if (p.kind == ApePattern::Kind::exponential) pe = D * std::pow(p.theta, kd);
        sum += std::pow(gc, static_cast<double>(n - k)) * pe;
      }
      EXPECT_LE(sum, ape_bound(p, gc, n) * (1 + 1e-12)) << static_cast<int>(p.kind);
    }
  }
}

TEST(Qdp, ConstantScheduleRecursionAndPlateauBound) {
  for (std::size_t m : {50U, 200U, 2000U}) {
    for (std::size_t n : {0U, 1U, 10U, 70U}) {
      const auto cfg = constant_m(m);
      double direct = std::pow(0.7, static_cast<double>(n)) * 2.0;
      for (std::size_t k = 1; k <= n; ++k) direct += std::pow(0.7, static_cast<double>(n - k)) * 2.0 / (2.0 * m);
      EXPECT_NEAR(qdp_error(0.7, 2.0, cfg, n), direct, 1e-13);
      EXPECT_LE(qdp_error(0.7, 2.0, cfg, n), qdp_constant_bound(0.7, 2.0, m, n) + 1e-15);
      EXPECT_NEAR(qdp_time(cfg, n), static_cast<double>(n) * m * std::log(static_cast<double>(m)), 1e-6);
    }
  }
  EXPECT_NEAR(qdp_constant_bound(0.7, 1.0, 50, 0), 1.0 / 30.0 + 1.0, 1e-15);
}

TEST(Qdp, ExponentialScheduleDecaysAtRateTheta) {
  const auto cfg = exp_m(0.85);
  double prev = qdp_error(0.7, 1.0, cfg, 20);
  for (std::size_t n = 21; n < 70; ++n) {
    const double e = qdp_error(0.7, 1.0, cfg, n);
    EXPECT_LT(e, prev);
    prev = e;
  }
  const double ratio = qdp_error(0.7, 1.0, cfg, 69) / qdp_error(0.7, 1.0, cfg, 68);
  EXPECT_NEAR(ratio, 0.85, 0.01);
}

TEST(Qdp, IterationsWithinBudget) {
  const auto cfg = exp_m(0.8);
  const auto Ts = log_grid(1.0, qdp_time(cfg, 40), 300);
  std::size_t prev = 0;
  for (double T : Ts) {
    const std::size_t n = qdp_iterations_within(cfg, T, 40);
    EXPECT_GE(n, prev);
    EXPECT_LE(qdp_time(cfg, n), T * (1 + 1e-12));
    if (n < 40) EXPECT_GT(qdp_time(cfg, n + 1), T);
    prev = n;
  }
  EXPECT_EQ(qdp_iterations_within(cfg, 0.0, 40), 0U);
}

TEST(Qdp, CurveAndGrid) {
  const auto g = log_grid(1.0, 1000.0, 4);
  ASSERT_EQ(g.size(), 4U);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_NEAR(g[1], 10.0, 1e-12);
  EXPECT_DOUBLE_EQ(g[3], 1000.0);
  EXPECT_THROW(log_grid(0.0, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(qdp_curve(0.7, 1.0, constant_m(50), {}, 10), std::invalid_argument);
  const auto curve = qdp_curve(0.7, 1.0, constant_m(50), g, 70);
  ASSERT_EQ(curve.size(), 4U);
  for (const auto& p : curve) EXPECT_EQ(p.e, qdp_error(0.7, 1.0, constant_m(50), p.n));
}

TEST(TailBound, Examples) {
  EXPECT_EQ(tail_bound(MomentInfo::bounded(), 1.0, 1.0, TailFlavor::w_beta), 0.0);
  EXPECT_NEAR(tail_bound(MomentInfo::polynomial(2.0, 1.0), 10.0, 1.0, TailFlavor::w_beta), 0.1, 1e-14);
  EXPECT_THROW(tail_bound(MomentInfo::polynomial(1.0, 1.0), 10.0, 1.0, TailFlavor::w_beta), std::invalid_argument);
  EXPECT_THROW(tail_bound(MomentInfo::polynomial(0.4, 1.0), 10.0, 2.0, TailFlavor::l_beta), std::invalid_argument);
  EXPECT_THROW(tail_bound(MomentInfo::exponential(0.0, 1.0), 1.0, 1.0, TailFlavor::w_beta), std::invalid_argument);
}

TEST(TailBound, DominatesQuadrature) {
  const auto n = Distribution::normal(0.0, 1.0);
  EXPECT_LE(tail_integral(n, 0.0, 3.0, 1.0, TailFlavor::w_beta),
            tail_bound(MomentInfo::polynomial(2.0, 1.0), 3.0, 1.0, TailFlavor::w_beta));
  // Laplace-type reward: E exp(|X| / 2) for exponential(1) is 2
  const auto e = Distribution::exponential(1.0);
  for (double w : {0.5, 2.0, 5.0}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      EXPECT_LE(tail_integral(e, 0.0, w, beta, TailFlavor::w_beta),
                tail_bound(MomentInfo::exponential(0.5, 2.0), w, beta, TailFlavor::w_beta));
      if (beta >= 1.0) {
        EXPECT_LE(tail_integral(e, 0.0, w, beta, TailFlavor::l_beta),
                  tail_bound(MomentInfo::exponential(0.5, 2.0), w, beta, TailFlavor::l_beta));
      }
    }
    // E|X|^3 = 6 for exponential(1)
    EXPECT_LE(tail_integral(e, 0.0, w, 2.0, TailFlavor::w_beta),
              tail_bound(MomentInfo::polynomial(3.0, 6.0), w, 2.0, TailFlavor::w_beta));
    EXPECT_LE(tail_integral(e, 0.0, w, 1.0, TailFlavor::l_beta),
              tail_bound(MomentInfo::polynomial(3.0, 6.0), w, 1.0, TailFlavor::l_beta));
  }
}

TEST(TailIntegral, ClosedForms) {
  // exponential(1), z = 0: int_0^inf P(X > w + x) dx = e^{-w}
  EXPECT_NEAR(tail_integral(Distribution::exponential(1.0), 0.0, 2.0, 1.0, TailFlavor::w_beta), std::exp(-2.0), 1e-9);
  // l_2: int e^{-2(w+x)} dx = e^{-2w} / 2
  EXPECT_NEAR(tail_integral(Distribution::exponential(1.0), 0.0, 1.0, 2.0, TailFlavor::l_beta), std::exp(-2.0) / 2.0,
              1e-9);
  EXPECT_EQ(tail_integral(Distribution::uniform(-1.0, 1.0), 0.0, 1.0, 1.0, TailFlavor::w_beta), 0.0);
}

TEST(TailIntegral, CauchyTails) {
  const auto c = Distribution::cauchy(0.0, 1.0);
  EXPECT_TRUE(std::isinf(tail_integral(c, 0.0, 1.0, 1.0, TailFlavor::w_beta)));
  EXPECT_TRUE(std::isinf(tail_integral(c, 0.0, 1.0, 1.0, TailFlavor::l_beta)));
  // l_2: P(|X| > t) = 1 - 2 atan(t) / pi, so int_w^inf (2 atan(1/t) / pi)^2 dt
  const double want = oracle::simpson(
      [](double u) {
        // t = w / u, dt = w / u^2 du on (0, 1]
        if (u == 0.0) return 4.0 / (3.0 * std::numbers::pi * std::numbers::pi);
        const double t = 3.0 / u;
        const double p = 2.0 * std::atan(1.0 / t) / std::numbers::pi;
        return p * p * 3.0 / (u * u);
      },
      0.0, 1.0, 2000);
  EXPECT_NEAR(tail_integral(c, 0.0, 3.0, 2.0, TailFlavor::l_beta), want, 1e-8);
  // w_{1/2}: (1/beta) int_0^inf P(|X| > w + u^2) du
  const double half = 2.0 * oracle::simpson(
                                 [](double v) {
                                   // u = v / (1 - v)
                                   if (v >= 1.0) return 2.0 / std::numbers::pi;
                                   const double u = v / (1.0 - v);
                                   const double p = 2.0 * std::atan(1.0 / (1.0 + u * u)) / std::numbers::pi;
                                   return p / ((1.0 - v) * (1.0 - v));
                                 },
                                 0.0, 1.0, 20000);
  EXPECT_NEAR(tail_integral(c, 0.0, 1.0, 0.5, TailFlavor::w_beta), half, 1e-6);
}

TEST(PeBound, BoundedCaseAndMonotonicity) {
  AnalysisConfig acfg;
  acfg.gamma = 0.5;
  acfg.v_min = -2.0;
  acfg.v_max = 2.0;
  const double b1 = pe_bound(acfg, {11, 4.0, 0.0}, 1.0, TailFlavor::w_beta);
  EXPECT_NEAR(b1, 4.0 * 0.8, 1e-14);
  // doubling the cell count halves delta
  EXPECT_NEAR(pe_bound(acfg, {21, 4.0, 0.0}, 1.0, TailFlavor::w_beta), b1 / 2.0, 1e-14);
  EXPECT_THROW(pe_bound(acfg, {11, 1.0, 0.0}, 1.0, TailFlavor::w_beta), std::invalid_argument);

  acfg.moments = MomentInfo::polynomial(3.0, 2.0);
  double prev = INFINITY;
  for (std::size_t M = 2; M < 400; M += 13) {
    const double b = pe_bound(acfg, {M, 10.0, 0.0}, 1.0, TailFlavor::w_beta);
    EXPECT_LE(b, prev);
    prev = b;
  }
  // with a negligible grid term the bound is the tail term, nonincreasing in W
  prev = INFINITY;
  for (double W = 1.0; W < 100.0; W *= 1.3) {
    const double b = pe_bound(acfg, {std::size_t{1} << 50, W, 0.0}, 2.0, TailFlavor::l_beta);
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(PeBound, DominatesMeasuredProjectionError) {
  Philox rng(72);
  const MetricSpec w1{MetricKind::wasserstein, 1.0};
  for (int trial = 0; trial < 100; ++trial) {
    MdpSpec m = oracle::random_finite_mdp(rng, 3, 2, 4);
    double rmin = INFINITY;
    double rmax = -INFINITY;
    for (const auto& by_a : m.rewards) {
      for (const auto& row : by_a) {
        for (const auto& r : row) {
          const auto [lo, hi] = support(r);
          rmin = std::min(rmin, lo);
          rmax = std::max(rmax, hi);
        }
      }
    }
    AnalysisConfig acfg;
    acfg.gamma = m.gamma;
    acfg.v_min = rmin / (1 - m.gamma);
    acfg.v_max = rmax / (1 - m.gamma);
    const double W = std::max(std::abs(acfg.v_min), std::abs(acfg.v_max)) + 0.5;
    const auto M = static_cast<std::size_t>(oracle::uniform_int(rng, 2, 60));
    // eta supported in [v_min, v_max] keeps T eta there too
    ReturnApprox eta;
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      auto f = oracle::random_finite(rng, 5, acfg.v_min, acfg.v_max);
      eta.push_back(f);
    }
    const double bound = pe_bound(acfg, {M, W, 0.0}, 1.0, TailFlavor::w_beta);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
      const auto target = Distribution::finite(materialize_bellman_finite(m, s, eta));
      const auto projected = Distribution::finite(project(target, xi_lin(M, W, 0.0)));
      EXPECT_LE(evaluate(w1, projected, target).value, bound);
    }
  }
}

TEST(MomentQuantileBound, ExamplesAndValidity) {
  EXPECT_NEAR(moment_quantile_bound(2.0, 1.0, 0.75).second, 2.0, 1e-15);
  const auto z = moment_quantile_bound(3.0, 0.0, 0.3);
  EXPECT_EQ(z.first, 0.0);
  EXPECT_EQ(z.second, 0.0);
  EXPECT_THROW(moment_quantile_bound(2.0, 1.0, 1.0), std::invalid_argument);
  const auto n = Distribution::normal(0.0, 1.0);
  for (double u = 0.001; u < 1.0; u += 0.001) {
    const auto [lo, hi] = moment_quantile_bound(2.0, 1.0, u);
    EXPECT_GE(quantile(n, u), lo);
    EXPECT_LE(quantile(n, u), hi);
  }
  // empirical law: its own absolute moment bounds its quantiles
  Philox rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = oracle::random_finite(rng, 10, -5, 8);
    double D = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) D += f.weights()[i] * std::pow(std::abs(f.points()[i]), 1.5);
    for (double u : {0.01, 0.2, 0.5, 0.9, 0.99}) {
      const auto [lo, hi] = moment_quantile_bound(1.5, D, u);
      EXPECT_GE(f.quantile(u), lo - 1e-12);
      EXPECT_LE(f.quantile(u), hi + 1e-12);
    }
  }
}

TEST(AdpExponents, FiniteAlpha) {
  const auto e = recommended_adp_exponents(2.0);
  EXPECT_NEAR(e.beta, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(e.m_exponent, 2.25, 1e-15);
  EXPECT_NEAR(e.eps_exponent, 1.5, 1e-15);
  EXPECT_THROW(recommended_adp_exponents(0.0), std::invalid_argument);
}

TEST(CircularReference, NormalCycle) {
  const auto laws = circular_reference(
      {Distribution::normal(-3.0, 1.0), Distribution::normal(5.0, 2.0), Distribution::normal(0.0, 0.5)}, 0.7);
  ASSERT_EQ(laws.size(), 3U);
  const std::vector<std::pair<double, double>> want{{0.761, 2.380}, {5.373, 2.816}, {0.533, 1.666}};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& n = std::get<Normal>(laws[i].variant());
    EXPECT_NEAR(n.mu, want[i].first, 5e-4) << i;
    EXPECT_NEAR(n.sigma2, want[i].second, 5e-4) << i;
  }
}

TEST(CircularReference, CauchyCycle) {
  const auto laws = circular_reference(
      {Distribution::cauchy(-3.0, 0.5), Distribution::cauchy(5.0, 0.1), Distribution::cauchy(0.0, 5.0)}, 0.7);
  const std::vector<std::pair<double, double>> want{{0.761, 4.597}, {5.373, 5.852}, {0.533, 8.218}};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = std::get<Cauchy>(laws[i].variant());
    EXPECT_NEAR(c.mu, want[i].first, 5e-4) << i;
    EXPECT_NEAR(c.scale, want[i].second, 5e-4) << i;
  }
}

TEST(CircularReference, ZeroRewardsAndErrors) {
  const auto laws = circular_reference({Distribution::dirac(0.0), Distribution::dirac(0.0)}, 0.5);
  for (const auto& d : laws) EXPECT_EQ(d, Distribution::dirac(0.0));
  EXPECT_THROW(circular_reference({Distribution::uniform(0.0, 1.0)}, 0.5), std::invalid_argument);
  EXPECT_THROW(circular_reference({Distribution::normal(0.0, 1.0), Distribution::cauchy(0.0, 1.0)}, 0.5),
               std::invalid_argument);
  EXPECT_THROW(circular_reference({}, 0.5), std::invalid_argument);
}

TEST(CircularReference, SingleSelfLoop) {
  // X = R + g X with R ~ N(1, 1): N(1 / (1 - g), 1 / (1 - g^2))
  const auto laws = circular_reference({Distribution::normal(1.0, 1.0)}, 0.5);
  const auto& n = std::get<Normal>(laws[0].variant());
  EXPECT_NEAR(n.mu, 2.0, 1e-15);
  EXPECT_NEAR(n.sigma2, 4.0 / 3.0, 1e-15);
}

TEST(CircularReference, IsBellmanFixedPoint) {
  const MdpSpec m = load("mdp_i.json");
  const auto truth = *auto_circular(m);
  ReturnApprox disc;
  for (const auto& d : truth) disc.push_back(quantile_atoms(d, 4000));
  for (std::size_t s = 0; s < 3; ++s) {
    double worst = 0.0;
    for (double x = -10; x <= 15; x += 0.01) {
      worst = std::max(worst, std::abs(bellman_cdf(m, s, disc, x) - cdf(truth[s], x)));
    }
    EXPECT_LE(worst, 2e-3) << s;
  }
}

TEST(AutoCircular, DetectsCycleAndRejectsOthers) {
  const MdpSpec m = load("mdp_ii.json");
  const auto laws = auto_circular(m);
  ASSERT_TRUE(laws.has_value());
  EXPECT_NEAR(std::get<Cauchy>((*laws)[2].variant()).scale, 8.218, 5e-4);

  // relabelled cycle 0 -> 2 -> 1 -> 0
  const auto perm = oracle::cycle_mdp({Distribution::normal(1.0, 1.0), Distribution::normal(2.0, 1.0),
                                       Distribution::normal(3.0, 1.0)},
                                      0.6);
  MdpSpec swapped = perm;
  swapped.transition[0][0] = {0, 0, 1};
  swapped.transition[2][0] = {0, 1, 0};
  swapped.transition[1][0] = {1, 0, 0};
  swapped.rewards[0][0][2] = Distribution::normal(1.0, 1.0);
  swapped.rewards[2][0][1] = Distribution::normal(2.0, 1.0);
  swapped.rewards[1][0][0] = Distribution::normal(3.0, 1.0);
  const auto got = auto_circular(swapped);
  ASSERT_TRUE(got.has_value());
  const auto direct = circular_reference({Distribution::normal(1.0, 1.0), Distribution::normal(2.0, 1.0),
                                          Distribution::normal(3.0, 1.0)},
                                         0.6);
  EXPECT_EQ((*got)[0], direct[0]);
  EXPECT_EQ((*got)[2], direct[1]);
  EXPECT_EQ((*got)[1], direct[2]);

  MdpSpec stochastic = perm;
  stochastic.transition[0][0] = {0, 0.5, 0.5};
  EXPECT_FALSE(auto_circular(stochastic).has_value());
  MdpSpec two_cycles = oracle::cycle_mdp({Distribution::dirac(1.0), Distribution::dirac(1.0)}, 0.5);
  two_cycles.transition[0][0] = {1, 0};
  two_cycles.transition[1][0] = {0, 1};
  EXPECT_FALSE(auto_circular(two_cycles).has_value());
}
