#include "iqae/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "test_oracles.hpp"

namespace {

using namespace iqae;

TEST(FFin, PeriodThreeLattice) {
  EXPECT_NEAR(f_fin(0.25, 0), 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(f_fin(0.25, 1), 1.0 / 2.0, 1e-12);
  EXPECT_NEAR(f_fin(0.25, 3), 1.0 / 6.0, 1e-12);  // period m = 3 in k
  for (std::int64_t k = 0; k < 50; ++k) {
    EXPECT_NEAR(f_fin(0.25, k), f_fin(0.25, k + 3), 1e-9);
  }
}

TEST(RunCampaign, ThreadCountDoesNotChangeResults) {
  IqaeConfig config;
  config.epsilon = 1e-2;
  const auto serial = run_campaign(0.3, config, 40, false, 99, 0, 1);
  const auto parallel = run_campaign(0.3, config, 40, false, 99, 0, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].a_hat, parallel[i].a_hat);
    EXPECT_EQ(serial[i].k_fin, parallel[i].k_fin);
    EXPECT_EQ(serial[i].total_grover_calls, parallel[i].total_grover_calls);
  }
}

TEST(SweepBias, RowsAreThreadInvariant) {
  IqaeConfig config;
  config.epsilon = 1e-2;
  const std::vector<double> grid{0.2, 0.5, 0.8};
  const auto rows1 = sweep_bias(grid, config, 40, false, 7, 1);
  const auto rows2 = sweep_bias(grid, config, 40, false, 7, 4);
  ASSERT_EQ(rows1.size(), rows2.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    EXPECT_EQ(rows1[i].mean_error, rows2[i].mean_error);
    EXPECT_EQ(rows1[i].std_error, rows2[i].std_error);
    EXPECT_EQ(rows1[i].mean_queries, rows2[i].mean_queries);
    EXPECT_EQ(rows1[i].success_rate, rows2[i].success_rate);
  }
}

TEST(AggregateBias, SingleRunStatistics) {
  RunSummary run;
  run.error = -0.125;
  run.success = true;
  run.total_grover_calls = 40;
  run.final_round_grover_calls = 10;
  const BiasRow row = aggregate_bias(0.5, {run}, false);
  EXPECT_EQ(row.n_run, 1);
  EXPECT_DOUBLE_EQ(row.mean_error, -0.125);
  EXPECT_DOUBLE_EQ(row.std_error, 0.125);  // sqrt(e^2)/sqrt(1)
  EXPECT_DOUBLE_EQ(row.success_rate, 1.0);
  EXPECT_DOUBLE_EQ(row.mean_queries, 40.0);
  EXPECT_FALSE(row.biased);  // |e| < 2 |e|
}

TEST(AggregateBias, KnownTwoRunStatistics) {
  RunSummary r1, r2;
  r1.error = 0.3;
  r2.error = -0.1;
  r1.success = r2.success = true;
  const BiasRow row = aggregate_bias(0.5, {r1, r2}, false);
  EXPECT_DOUBLE_EQ(row.mean_error, 0.1);
  // sqrt((0.09 + 0.01)/2) / sqrt(2)
  EXPECT_NEAR(row.std_error, std::sqrt(0.05) / std::sqrt(2.0), 1e-15);
  EXPECT_FALSE(row.biased);
}

TEST(AggregateBias, FailedRunsAreExcluded) {
  RunSummary good, bad;
  good.error = 0.5;
  bad.failed = true;
  const BiasRow row = aggregate_bias(0.5, {good, bad}, false);
  EXPECT_EQ(row.n_run, 1);
  EXPECT_EQ(row.failed_runs, 1);
  EXPECT_DOUBLE_EQ(row.mean_error, 0.5);
}

TEST(DecomposeBias, SmallCases) {
  EXPECT_TRUE(decompose_bias({}, 0.5).empty());

  RunSummary r1;
  r1.a_hat = 0.6;
  r1.k_fin = 3;
  const auto one = decompose_bias({r1}, 0.5);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].k_fin, 3);
  EXPECT_DOUBLE_EQ(one[0].probability, 1.0);
  EXPECT_NEAR(one[0].conditional_mean_error, 0.1, 1e-15);

  RunSummary r2 = r1;
  r2.a_hat = 0.4;
  const auto two = decompose_bias({r1, r2}, 0.5);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].count, 2);
  EXPECT_NEAR(two[0].conditional_mean_error, 0.0, 1e-15);
}

TEST(DecomposeBias, WeightedSumReproducesTheMean) {
  IqaeConfig config;
  const auto runs = run_campaign(0.2505, config, 2000, false, 31, 0, 2);
  const BiasRow row = aggregate_bias(0.2505, runs, false);
  const auto groups = decompose_bias(runs, 0.2505);
  double probability_sum = 0.0;
  std::int64_t count_sum = 0;
  for (const auto& g : groups) {
    probability_sum += g.probability;
    count_sum += g.count;
  }
  EXPECT_EQ(count_sum, row.n_run);
  EXPECT_NEAR(probability_sum, 1.0, 1e-12);
  const double weighted = weighted_bias(groups);
  EXPECT_LE(std::abs(weighted - row.mean_error),
            1e-15 * std::abs(row.mean_error));
}

TEST(ConditionalBias, AdjustmentFixedPoint) {
  IqaeConfig config;
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> adist(0.05, 0.95);
  std::uniform_int_distribution<std::int64_t> kdist(0, 500);
  for (int i = 0; i < 200; ++i) {
    const double a = adist(gen);
    const std::int64_t k = kdist(gen);
    const double f = f_fin(a, k);
    const CondBiasCell cell = conditional_bias(k, f, a, 1, config, 1, 1);
    ASSERT_NE(cell.status, CellStatus::kOutOfDomain);
    EXPECT_NEAR(cell.a_tilde, a, 1e-12) << "a=" << a << " k=" << k;
  }
}

TEST(ConditionalBias, KnownAdjustment) {
  IqaeConfig config;
  // R~ = floor(3 (pi/6) / pi) = 0, a~ = sin^2(0.5 pi / 3) = 0.25
  const CondBiasCell cell = conditional_bias(1, 0.5, 0.25, 1, config, 1, 1);
  EXPECT_NEAR(cell.a_tilde, 0.25, 1e-12);
}

TEST(ConditionalBias, OutOfDomainIsFlaggedNotFlipped) {
  IqaeConfig config;
  // theta(0.9) = 1.2490, R~ = floor(3 theta / pi) = 1; 1 + 0.9 > 1.5
  const CondBiasCell cell = conditional_bias(1, 0.9, 0.9, 10, config, 1, 1);
  EXPECT_EQ(cell.status, CellStatus::kOutOfDomain);
  EXPECT_TRUE(std::isnan(cell.b_tilde));
  EXPECT_TRUE(std::isnan(cell.a_tilde));
  EXPECT_EQ(cell.n_end, 0);
}

TEST(ConditionalBias, AllTransitionsMeansNaN) {
  IqaeConfig config;
  config.epsilon = 1e-7;  // unreachable at k = 3: every round moves on
  const CondBiasCell cell = conditional_bias(3, 0.3, 0.3, 50, config, 5, 2);
  EXPECT_EQ(cell.status, CellStatus::kInsufficient);
  EXPECT_TRUE(std::isnan(cell.b_tilde));
  EXPECT_LT(double(cell.n_end), 0.1 * 50.0);
}

TEST(ConditionalBias, DeterministicAcrossThreads) {
  IqaeConfig config;
  const CondBiasCell c1 = conditional_bias(200, 0.25, 0.2505, 400, config, 77, 1);
  const CondBiasCell c2 = conditional_bias(200, 0.25, 0.2505, 400, config, 77, 4);
  EXPECT_EQ(c1.n_end, c2.n_end);
  EXPECT_EQ(c1.b_tilde, c2.b_tilde);
}

TEST(CondBiasGrid, SingleCellFixedPoint) {
  IqaeConfig config;
  const double a = 0.2505;
  const double f = f_fin(a, 1);
  const auto cells = cond_bias_grid({1}, {f}, a, 5, config, 3, 1);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_NEAR(cells[0].a_tilde, a, 1e-12);
  EXPECT_THROW(cond_bias_grid({}, {f}, a, 5, config, 3, 1), std::domain_error);
}

TEST(DetectResonance, KnownValues) {
  const Resonance near_third = detect_resonance(0.2505, 64);
  EXPECT_EQ(near_third.l, 1);
  EXPECT_EQ(near_third.m, 3);
  EXPECT_NEAR(near_third.delta, 0.000577, 2e-6);

  const Resonance exact_third = detect_resonance(0.25, 64);
  EXPECT_EQ(exact_third.l, 1);
  EXPECT_EQ(exact_third.m, 3);
  EXPECT_NEAR(exact_third.delta, 0.0, 1e-12);

  const Resonance half = detect_resonance(0.5, 64);
  EXPECT_EQ(half.l, 1);
  EXPECT_EQ(half.m, 2);
  EXPECT_NEAR(half.delta, 0.0, 1e-12);
}

TEST(DetectResonance, DomainChecks) {
  EXPECT_THROW(detect_resonance(0.0, 10), std::domain_error);
  EXPECT_THROW(detect_resonance(1.0, 10), std::domain_error);
  EXPECT_THROW(detect_resonance(0.5, 1), std::domain_error);
}

TEST(DetectResonance, MatchesBruteForceScan) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> adist(0.001, 0.999);
  const std::vector<std::int64_t> m_values{2, 3, 5, 17, 64, 200};
  for (int i = 0; i < 120; ++i) {
    const double a = adist(gen);
    for (std::int64_t m_max : m_values) {
      const Resonance got = detect_resonance(a, m_max);
      const testref::RefResonance want =
          testref::brute_force_resonance(a, m_max);
      EXPECT_EQ(got.l, want.l) << "a=" << a << " m_max=" << m_max;
      EXPECT_EQ(got.m, want.m) << "a=" << a << " m_max=" << m_max;
      EXPECT_EQ(got.delta, want.delta) << "a=" << a << " m_max=" << m_max;
    }
  }
}

TEST(Scatter, FFinLattice) {
  IqaeConfig config;
  const auto records = scatter_kfin_ffin(0.25, config, 300, 13, 2);
  for (const RunSummary& r : records) {
    // at a = 1/4 the lattice is {1/6, 1/2, 5/6} exactly
    const double d1 = std::abs(r.f_fin - 1.0 / 6.0);
    const double d2 = std::abs(r.f_fin - 1.0 / 2.0);
    const double d3 = std::abs(r.f_fin - 5.0 / 6.0);
    EXPECT_LT(std::min({d1, d2, d3}), 1e-10) << "f_fin=" << r.f_fin;
    // f_fin is a pure function of k_fin
    EXPECT_EQ(r.f_fin, f_fin(0.25, r.k_fin));
  }
}

TEST(Scatter, ResonanceFormPredictsEveryRecord) {
  IqaeConfig config;
  const double a = 0.2505;
  const Resonance res = detect_resonance(a, 64);
  const auto records = scatter_kfin_ffin(a, config, 300, 14, 2);
  for (const RunSummary& r : records) {
    const double x =
        double(2 * r.k_fin + 1) * (double(res.l) * kPi / (2.0 * double(res.m)) +
                                   res.delta) / kPi;
    const double predicted = x - std::floor(x);
    EXPECT_NEAR(r.f_fin, predicted, 1e-12);
  }
}

}  // namespace
