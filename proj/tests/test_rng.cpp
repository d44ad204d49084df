#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gmlab/errors.hpp"
#include "gmlab/rng.hpp"
#include "gmlab/stats.hpp"
#include "oracles.hpp"

using namespace gmlab;

TEST(StreamSeed, PureAndSpreadAcrossIndices) {
  EXPECT_EQ(stream_seed(7, 3), stream_seed(7, 3));
  EXPECT_NE(stream_seed(7, 3), stream_seed(7, 4));
  EXPECT_NE(stream_seed(7, 3), stream_seed(8, 3));
}

TEST(SampleBrownian, SameSeedSamePath) {
  const BrownianPath a = sample_brownian(500, 1.0, 42);
  const BrownianPath b = sample_brownian(500, 1.0, 42);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.steps(), 500u);
  EXPECT_DOUBLE_EQ(a.horizon(), 1.0);
  EXPECT_EQ(a.values.front(), 0.0);
}

TEST(SampleBrownian, RunningSupDominatesValues) {
  const BrownianPath p = sample_brownian(2000, 2.0, 9);
  for (std::size_t k = 0; k < p.values.size(); ++k) {
    EXPECT_LE(std::abs(p.values[k]), p.sup_abs[k]);
    if (k > 0) {
      EXPECT_GE(p.sup_abs[k], p.sup_abs[k - 1]);
    }
  }
}

TEST(SampleBrownian, TerminalMomentsOverManySeeds) {
  // B(1) over 1e5 independent streams: CLT and chi-square concentration.
  const std::size_t n = 100000;
  std::vector<double> b1(n);
  for (std::size_t i = 0; i < n; ++i) b1[i] = sample_brownian(1, 1.0, stream_seed(11, i)).values[1];
  const MeanEstimate est = mean_estimate(b1);
  EXPECT_LE(std::abs(est.mean), 3.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(est.variance, 1.0, 0.03);
}

TEST(SampleBrownian, RejectsBadArguments) {
  EXPECT_THROW(sample_brownian(0, 1.0, 1), InvalidParameter);
  EXPECT_THROW(sample_brownian(10, 0.0, 1), InvalidParameter);
  EXPECT_THROW(path_from_values(0.1, {1.0, 2.0}), InvalidParameter);
}

TEST(RefineBridge, PreservesCoarseValuesExactly) {
  const BrownianPath coarse = sample_brownian(64, 1.0, 5);
  const BrownianPath fine = refine_bridge(coarse, 6);
  ASSERT_EQ(fine.steps(), 128u);
  EXPECT_DOUBLE_EQ(fine.dt, coarse.dt / 2.0);
  for (std::size_t k = 0; k <= 64; ++k) EXPECT_EQ(fine.values[2 * k], coarse.values[k]);
  const BrownianPath twice = refine_bridge(fine, 7);
  EXPECT_EQ(coarsen(twice, 4).values, coarse.values);
}

TEST(RefineBridge, MidpointFollowsBridgeLaw) {
  const double b = 0.8;
  const BrownianPath base = path_from_values(1.0, {0.0, b});
  const std::size_t n = 100000;
  std::vector<double> mids(n);
  for (std::size_t i = 0; i < n; ++i) mids[i] = refine_bridge(base, stream_seed(3, i)).values[1];
  const MeanEstimate est = mean_estimate(mids);
  EXPECT_NEAR(est.mean, b / 2.0, 3.0 * std::sqrt(0.25) / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(est.variance, 0.25, 0.01);
}

TEST(RefineBridge, RefinedTerminalLawMatchesDirectSampling) {
  // Two-sample Kolmogorov-Smirnov test at the 1% level on B(1) and B(1/2).
  const std::size_t n = 4000;
  std::vector<double> refined(n), direct(n);
  for (std::size_t i = 0; i < n; ++i) {
    const BrownianPath coarse = sample_brownian(1, 1.0, stream_seed(21, i));
    refined[i] = refine_bridge(coarse, stream_seed(22, i)).values[1];
    direct[i] = sample_brownian(2, 1.0, stream_seed(23, i)).values[1];
  }
  std::sort(refined.begin(), refined.end());
  std::sort(direct.begin(), direct.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < n && j < n) {
    const double x = std::min(refined[i], direct[j]);
    while (i < n && refined[i] <= x) ++i;
    while (j < n && direct[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(n));
  }
  const double critical = 1.628 * std::sqrt(2.0 / static_cast<double>(n));
  EXPECT_LT(d, critical);
}

TEST(Coarsen, RejectsNonDividingStride) {
  EXPECT_THROW(coarsen(sample_brownian(10, 1.0, 1), 3), InvalidParameter);
}

TEST(PathCsv, HeaderAndRows) {
  std::ostringstream out;
  write_path_csv(path_from_values(0.5, {0.0, 0.25, -1.0}), out);
  EXPECT_EQ(out.str(), "t,value\n0,0\n0.5,0.25\n1,-1\n");
}

TEST(SupDensityBound, FrozenValuesAndLimits) {
  for (const auto& row : oracle::sup_abs_tails())
    EXPECT_NEAR(sup_density_bound_tail(row.x, 1.0), row.density_bound, 1e-12);
  EXPECT_DOUBLE_EQ(sup_density_bound_tail(0.0, 1.0), 4.0);
  EXPECT_LT(sup_density_bound_tail(20.0, 1.0), 1e-20);
}

TEST(SupTailCheck, AtZeroEveryPathExceeds) {
  const std::vector<double> xs = {0.0, 50.0};
  const TailReport rep = sup_tail_check(200, 1.0, xs, 4, 200);
  EXPECT_DOUBLE_EQ(rep.rows[0].empirical_tail, 1.0);
  EXPECT_GE(rep.rows[0].bound, 1.0);
  EXPECT_DOUBLE_EQ(rep.rows[0].tail_estimate, 2.0);
  EXPECT_DOUBLE_EQ(rep.rows[1].empirical_tail, 0.0);
  EXPECT_TRUE(rep.pass);
}

TEST(SupTailCheck, EmpiricalTailTracksExactSeries) {
  // The discretised running max underestimates the continuous one slightly, so the
  // empirical tail sits at or a little below the exact value.
  std::vector<double> xs;
  for (const auto& row : oracle::sup_abs_tails()) xs.push_back(row.x);
  const TailReport rep = sup_tail_check(20000, 1.0, xs, 8, 1000);
  ASSERT_TRUE(rep.pass);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double exact = oracle::sup_abs_tails()[i].exact;
    EXPECT_LE(rep.rows[i].empirical_tail, exact + 4.0 * rep.rows[i].std_error + 1e-12);
    EXPECT_GE(rep.rows[i].empirical_tail, exact - 0.03);
  }
}

TEST(SupTailCheck, ParallelMatchesSerial) {
  const std::vector<double> xs = {1.0, 2.0};
  const TailReport a = sup_tail_check(500, 1.0, xs, 13, 100, 1);
  const TailReport b = sup_tail_check(500, 1.0, xs, 13, 100, 4);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_EQ(a.rows[i].empirical_tail, b.rows[i].empirical_tail);
}

TEST(Stats, WilsonAndNormalTail) {
  EXPECT_NEAR(normal_sf(2.25), oracle::normal_sf(2.25), 1e-15);
  EXPECT_NEAR(normal_sf(10.0) / oracle::normal_sf(10.0), 1.0, 1e-10);
  // k = 0 still has a positive upper interval.
  EXPECT_GT(wilson_halfwidth(0, 100), 0.0);
  EXPECT_NEAR(wilson_halfwidth(50, 100), 0.0961, 1e-3);
}
