#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ddp/distributions.hpp"
#include "support/oracles.hpp"

using namespace ddp;

namespace {

std::vector<Distribution> continuous_variants() {
  return {Distribution::normal(-3.0, 1.0), Distribution::normal(2.0, 0.01), Distribution::cauchy(0.0, 5.0),
          Distribution::cauchy(5.0, 0.1), Distribution::uniform(-1.0, 3.0), Distribution::exponential(2.5)};
}

std::vector<Distribution> all_variants() {
  auto v = continuous_variants();
  v.push_back(Distribution::dirac(1.5));
  v.push_back(Distribution::finite(FiniteDist::from_particles(std::vector<double>{0.0, 2.0, 3.5},
                                                              std::vector<double>{0.2, 0.5, 0.3})));
  return v;
}

}  // namespace

TEST(FiniteDist, MergesDuplicates) {
  const auto f = FiniteDist::from_particles(std::vector<double>{1, 1, 0}, std::vector<double>{0.25, 0.25, 0.5});
  EXPECT_EQ(f.points(), (std::vector<double>{0, 1}));
  EXPECT_EQ(f.weights(), (std::vector<double>{0.5, 0.5}));
}

TEST(FiniteDist, Normalizes) {
  const auto f = FiniteDist::from_particles(std::vector<double>{7}, std::vector<double>{3.0});
  EXPECT_EQ(f.points(), (std::vector<double>{7}));
  EXPECT_EQ(f.weights(), (std::vector<double>{1.0}));
  EXPECT_DOUBLE_EQ(f.input_mass(), 3.0);
}

TEST(FiniteDist, Sorts) {
  const auto f = FiniteDist::from_particles(std::vector<double>{2, 1}, std::vector<double>{0.5, 0.5});
  EXPECT_EQ(f.points(), (std::vector<double>{1, 2}));
  EXPECT_EQ(f.weights(), (std::vector<double>{0.5, 0.5}));
}

TEST(FiniteDist, NearlyEqualPointsStayDistinct) {
  const double a = 1.0;
  const double b = std::nextafter(1.0, 2.0);
  const auto f = FiniteDist::from_particles(std::vector<double>{a, b}, std::vector<double>{1, 1});
  EXPECT_EQ(f.size(), 2U);
}

TEST(FiniteDist, RejectsBadInput) {
  using V = std::vector<double>;
  EXPECT_THROW(FiniteDist::from_particles(V{}, V{}), std::invalid_argument);
  EXPECT_THROW(FiniteDist::from_particles(V{1, 2}, V{1}), std::invalid_argument);
  EXPECT_THROW(FiniteDist::from_particles(V{1}, V{-1}), std::invalid_argument);
  EXPECT_THROW(FiniteDist::from_particles(V{1, 2}, V{0, 0}), std::invalid_argument);
  EXPECT_THROW(FiniteDist::from_particles(V{std::nan("")}, V{1}), std::invalid_argument);
  EXPECT_THROW(FiniteDist::from_particles(V{INFINITY}, V{1}), std::invalid_argument);
}

TEST(FiniteDist, CdfAtLargestPointIsExactlyOne) {
  Philox rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = oracle::random_finite(rng, oracle::uniform_int(rng, 1, 30), -5, 5);
    EXPECT_EQ(f.cdf(f.back()), 1.0);
    EXPECT_EQ(f.cumulative().back(), 1.0);
  }
}

TEST(Cdf, Examples) {
  EXPECT_EQ(cdf(Distribution::dirac(0.0), -0.5), 0.0);
  EXPECT_EQ(cdf(Distribution::dirac(0.0), 0.0), 1.0);
  EXPECT_EQ(cdf(Distribution::normal(0.0, 1.0), 0.0), 0.5);
  const auto f = Distribution::finite(FiniteDist::from_particles(std::vector<double>{0, 2}, std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(cdf(f, 1.0), 0.5);
  EXPECT_EQ(cdf_left(f, 2.0), 0.5);
  EXPECT_EQ(cdf(f, 2.0), 1.0);
}

TEST(Cdf, NormalAgainstHighPrecisionValues) {
  // values from a 30-digit evaluation of the standard normal CDF
  const std::vector<std::pair<double, double>> table{
      {-20.0, 2.7536241186062336951e-89}, {-8.5, 9.4795348222033183542e-18}, {-3.0, 0.0013498980316300945267},
      {-1.0, 0.15865525393145705141},     {0.3, 0.61791142218895263307},     {2.0, 0.9772498680518207928},
      {7.5, 0.99999999999996809108}};
  const auto n = Distribution::normal(0.0, 1.0);
  for (const auto& [x, p] : table) {
    EXPECT_NEAR(cdf(n, x), p, 1e-15) << x;
    EXPECT_NEAR(cdf(n, x) / p, 1.0, 1e-13) << x;
  }
  EXPECT_NEAR(ccdf(n, 8.5) / 9.4795348222033183542e-18, 1.0, 1e-13);
}

TEST(Cdf, NormalMatchesErfRoute) {
  const auto n = Distribution::normal(1.5, 2.25);
  for (double x = -10; x <= 12; x += 0.173) {
    EXPECT_NEAR(cdf(n, x), oracle::normal_cdf(1.5, 2.25, x), 1e-14);
  }
}

TEST(Quantile, Examples) {
  EXPECT_EQ(quantile(Distribution::dirac(3.0), 0.99), 3.0);
  EXPECT_NEAR(quantile(Distribution::cauchy(0.0, 1.0), 0.75), 1.0, 1e-15);
  const auto f = Distribution::finite(FiniteDist::from_particles(std::vector<double>{0, 2}, std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(quantile(f, 0.5), 0.0);
  EXPECT_EQ(quantile(f, std::nextafter(0.5, 1.0)), 2.0);
  EXPECT_NEAR(quantile(Distribution::exponential(2.0), 0.3), 0.178337471969366189456, 1e-15);
  EXPECT_NEAR(quantile(Distribution::uniform(-1.0, 3.0), 0.25), 0.0, 1e-15);
}

TEST(Quantile, RejectsEndpoints) {
  const auto n = Distribution::normal(0.0, 1.0);
  EXPECT_THROW(quantile(n, 0.0), std::invalid_argument);
  EXPECT_THROW(quantile(n, 1.0), std::invalid_argument);
  EXPECT_THROW(quantile(n, -0.1), std::invalid_argument);
  EXPECT_THROW(quantile(Distribution::dirac(0.0), 1.5), std::invalid_argument);
}

TEST(Quantile, NormalAgainstHighPrecisionValues) {
  const std::vector<std::pair<double, double>> table{
      {1e-300, -37.0470962993612},         {1e-20, -9.262340089798409},
      {1e-10, -6.3613409024040561991},     {0.02425, -1.9729610513118848376},
      {0.3, -0.52440051270804081597},      {0.5, 0.0},
      {0.975, 1.9599639845400538556}};
  for (const auto& [p, q] : table) {
    EXPECT_NEAR(normal_math::phi_quantile(p), q, 1e-12 * std::max(1.0, std::abs(q))) << p;
  }
  EXPECT_NEAR(upper_quantile(Distribution::normal(0.0, 1.0), 1e-12), 7.034483825301131, 1e-12);
}

TEST(Quantile, CauchyUpperTail) {
  const auto c = Distribution::cauchy(0.0, 1.0);
  EXPECT_NEAR(ccdf(c, 1e8) / 3.1830988618379066093e-9, 1.0, 1e-12);
  EXPECT_NEAR(upper_quantile(c, 3.1830988618379066093e-9) / 1e8, 1.0, 1e-9);
}

TEST(Quantile, GaloisConnection) {
  Philox rng(17);
  for (const auto& d : all_variants()) {
    for (int i = 0; i < 1000; ++i) {
      const double u = rng.uniform();
      const double q05 = quantile(d, 0.05);
      const double q95 = quantile(d, 0.95);
      const double x = q05 + (q95 - q05) * (1.4 * rng.uniform() - 0.2);
      // quantile(u) <= x  iff  u <= F(x)
      EXPECT_EQ(quantile(d, u) <= x, u <= cdf(d, x)) << d.describe() << " u=" << u << " x=" << x;
    }
  }
}

TEST(Quantile, RoundTrip) {
  for (const auto& d : continuous_variants()) {
    for (int i = 0; i <= 1000; ++i) {
      const double u = 1e-6 + (1.0 - 2e-6) * i / 1000.0;
      EXPECT_NEAR(cdf(d, quantile(d, u)), u, 1e-9) << d.describe() << " u=" << u;
    }
  }
}

TEST(Quantile, UpperQuantileConsistency) {
  for (const auto& d : continuous_variants()) {
    for (double q : {1e-15, 1e-9, 1e-4, 0.1, 0.4}) {
      const double x = upper_quantile(d, q);
      // x carries an absolute rounding error of one ulp, which dominates for tiny q
      const double slack = std::abs(pdf(d, x)) * 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x);
      EXPECT_NEAR(ccdf(d, x), q, 1e-7 * q + slack) << d.describe() << " q=" << q;
    }
  }
}

TEST(Sample, Examples) {
  Philox rng(1);
  EXPECT_EQ(sample(Distribution::dirac(5.0), rng), 5.0);
  EXPECT_EQ(sample(Distribution::finite(FiniteDist::point_mass(1.0)), rng), 1.0);
  Philox a(99);
  Philox b(99);
  EXPECT_EQ(sample(Distribution::uniform(0.0, 1.0), a), b.uniform());
}

TEST(Sample, DeterministicStreams) {
  for (const auto& d : all_variants()) {
    Philox a(123);
    Philox b(123);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sample(d, a), sample(d, b));
  }
}

TEST(Sample, NormalMoments) {
  Philox rng(8);
  const auto n = Distribution::normal(2.0, 4.0);
  constexpr int count = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = sample(n, rng);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / count;
  EXPECT_NEAR(mean, 2.0, 4.0 * 2.0 / std::sqrt(count));
  EXPECT_NEAR(sq / count - mean * mean, 4.0, 0.1);
}

TEST(DensityEstimate, Examples) {
  EXPECT_DOUBLE_EQ(density_estimate(Distribution::dirac(0.0), 1.0, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(density_estimate(Distribution::uniform(0.0, 1.0), 0.5, 0.5), 1.0);
  EXPECT_NEAR(density_estimate(Distribution::normal(0.0, 1.0), 1e-4, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi),
              1e-4);
  EXPECT_THROW(density_estimate(Distribution::normal(0.0, 1.0), 0.0, 0.0), std::invalid_argument);
}

TEST(DensityEstimate, IntegratesToOne) {
  for (const auto& d : {Distribution::normal(1.0, 2.0), Distribution::uniform(-2.0, 5.0)}) {
    for (double delta : {0.01, 0.1, 0.5}) {
      const double lo = quantile(d, 1e-6) - delta;
      const double hi = upper_quantile(d, 1e-6) + delta;
      constexpr int n = 20000;
      const double h = (hi - lo) / n;
      double sum = 0.5 * (density_estimate(d, delta, lo) + density_estimate(d, delta, hi));
      for (int i = 1; i < n; ++i) sum += density_estimate(d, delta, lo + h * i);
      EXPECT_NEAR(sum * h, 1.0, 1e-3) << d.describe() << " delta=" << delta;
    }
  }
}

TEST(Pdf, NormalAndRejectsDiscrete) {
  EXPECT_NEAR(pdf(Distribution::normal(1.0, 2.0), 0.3), oracle::normal_pdf(1.0, 2.0, 0.3), 1e-15);
  EXPECT_NEAR(pdf(Distribution::cauchy(0.0, 2.0), 0.0), 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_THROW(pdf(Distribution::dirac(0.0), 0.0), std::invalid_argument);
}

TEST(MomentOrder, Examples) {
  EXPECT_EQ(moment_order(Distribution::cauchy(0.0, 1.0), 1.0), Moment::infinite);
  EXPECT_EQ(moment_order(Distribution::cauchy(0.0, 1.0), 0.5), Moment::finite);
  EXPECT_EQ(moment_order(Distribution::normal(0.0, 1.0), 10.0), Moment::finite);
  EXPECT_EQ(moment_order(Distribution::exponential(1.0), 3.0), Moment::finite);
  EXPECT_THROW(moment_order(Distribution::normal(0.0, 1.0), 0.0), std::invalid_argument);
}

TEST(Factories, RejectInvalidParameters) {
  EXPECT_THROW(Distribution::normal(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(Distribution::normal(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(Distribution::cauchy(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(Distribution::uniform(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(Distribution::exponential(0.0), std::invalid_argument);
  EXPECT_THROW(Distribution::dirac(INFINITY), std::invalid_argument);
  EXPECT_THROW(Distribution::normal(std::nan(""), 1.0), std::invalid_argument);
}

TEST(Support, Hulls) {
  EXPECT_EQ(support(Distribution::uniform(-1.0, 2.0)), std::make_pair(-1.0, 2.0));
  EXPECT_EQ(support(Distribution::exponential(1.0)).first, 0.0);
  EXPECT_TRUE(std::isinf(support(Distribution::normal(0.0, 1.0)).second));
  EXPECT_EQ(support(Distribution::dirac(3.0)), std::make_pair(3.0, 3.0));
}

TEST(ShiftedCdf, MatchesMaterializedAtoms) {
  const auto f = FiniteDist::from_particles(std::vector<double>{0.1, 0.7}, std::vector<double>{0.5, 0.5});
  const double shift = 0.7 * 0.3;
  const double x = 0.1 + shift;
  EXPECT_EQ(shifted_cdf(Distribution::finite(f), shift, x), 0.5);
  EXPECT_NEAR(shifted_cdf(Distribution::normal(0.0, 1.0), 1.0, 1.0), 0.5, 1e-16);
}
