#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hyperbell/hyperbell.hpp"

using namespace hyperbell;

namespace {

const double kWorkingPoint = 0.458337075596;

std::vector<std::vector<Eigen::Matrix4d>> reference_probabilities() {
  Vec psi = make_state({Family::psi4});
  return expected_tables(psi, reference_plan_a(), reference_plan_b());
}

std::vector<std::vector<long long>> uniform_budget(long long per_pair, int nA, int nB) {
  return std::vector<std::vector<long long>>(nA,
                                             std::vector<long long>(nB, per_pair));
}

CountTable rounded_expected_counts(
    const std::vector<std::vector<Eigen::Matrix4d>>& probs, long long per_pair) {
  CountTable t;
  t.planned = uniform_budget(per_pair, static_cast<int>(probs.size()),
                             static_cast<int>(probs[0].size()));
  t.counts.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    t.counts[i].resize(probs[i].size());
    for (std::size_t j = 0; j < probs[i].size(); ++j)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          t.counts[i][j](a, b) =
              std::llround(static_cast<double>(per_pair) * probs[i][j](a, b));
  }
  return t;
}

// X-type then Z-type protocol tables for both parties measuring the same
// basis label, as Counts4 blocks.
std::pair<Counts4, Counts4> steering_counts(const Mat& rho, long long per_basis,
                                            std::uint64_t seed) {
  MeasurementPlan plan = steering_plan();
  std::vector<std::vector<Eigen::Matrix4d>> probs(2, std::vector<Eigen::Matrix4d>(1));
  probs[0][0] = outcome_table(rho, plan.settings[0], plan.settings[0]);
  probs[1][0] = outcome_table(rho, plan.settings[1], plan.settings[1]);
  std::vector<std::vector<long long>> budget(2, std::vector<long long>(1, per_basis));
  CountTable t = simulate_counts(probs, budget, seed);
  return {t.counts[0][0], t.counts[1][0]};
}

}

TEST(SplitTotal, RemainderGoesToLeadingPairs) {
  auto s = split_total(85000, 4, 4);
  long long total = 0;
  int fives = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      total += s[i][j];
      if (s[i][j] == 5313) ++fives;
      else EXPECT_EQ(s[i][j], 5312);
    }
  EXPECT_EQ(total, 85000);
  EXPECT_EQ(fives, 8);
  EXPECT_EQ(s[0][0], 5313);
  EXPECT_EQ(s[1][3], 5313);
  EXPECT_EQ(s[2][0], 5312);
}

TEST(Simulate, DeterministicInSeed) {
  auto probs = reference_probabilities();
  auto budget = split_total(85000, 4, 4);
  CountTable a = simulate_counts(probs, budget, 42);
  CountTable b = simulate_counts(probs, budget, 42);
  CountTable c = simulate_counts(probs, budget, 43);
  bool differ = false;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      EXPECT_EQ(a.counts[i][j], b.counts[i][j]);
      differ |= (a.counts[i][j] != c.counts[i][j]);
    }
  EXPECT_TRUE(differ);
}

TEST(Simulate, ZeroBudgetGivesZeroCounts) {
  auto probs = reference_probabilities();
  CountTable t = simulate_counts(probs, uniform_budget(0, 4, 4), 9);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(t.counts[i][j].sum(), 0);
}

TEST(Simulate, UniformMillionWithinFiveSigma) {
  Mat mixed = Mat::Identity(16, 16) / 16.0;
  std::vector<std::vector<Eigen::Matrix4d>> probs{
      {outcome_table(mixed, AnalyzerSettings{}, AnalyzerSettings{})}};
  CountTable t = simulate_counts(probs, uniform_budget(1000000, 1, 1), 2024);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      EXPECT_NEAR(static_cast<double>(t.counts[0][0](a, b)), 62500.0, 5.0 * 250.0);
}

TEST(Simulate, RejectsInvalidProbabilityTable) {
  Eigen::Matrix4d bad = Eigen::Matrix4d::Constant(0.125);  // sums to 2
  std::vector<std::vector<Eigen::Matrix4d>> probs{{bad}};
  EXPECT_THROW(simulate_counts(probs, uniform_budget(10, 1, 1), 1),
               std::invalid_argument);
  Eigen::Matrix4d neg = Eigen::Matrix4d::Zero();
  neg(0, 0) = -0.5;
  probs[0][0] = neg;
  EXPECT_THROW(simulate_counts(probs, uniform_budget(10, 1, 1), 1),
               std::invalid_argument);
  EXPECT_THROW(simulate_counts(probs, uniform_budget(10, 2, 1), 1),
               std::invalid_argument);
}

TEST(Estimate, PlugInMatchesAnalyticOnExpectedCounts) {
  CountTable t = rounded_expected_counts(reference_probabilities(), 100000000);
  EstimateWithError e = estimate_functional(t, builtin_i18(),
                                            OutcomeMode::detector1_vs_rest,
                                            OutcomeMode::detector1_vs_rest);
  EXPECT_NEAR(e.value, kWorkingPoint, 1e-6);
  EXPECT_GT(e.sigma, 0.0);
  EXPECT_LT(e.sigma, 1e-3);
  EXPECT_EQ(e.method, "propagation");
}

TEST(Estimate, ValueIsScaleInvariantSigmaIsNot) {
  CountTable t = rounded_expected_counts(reference_probabilities(), 10000);
  CountTable t4 = t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t4.counts[i][j] *= 4;
  auto f = builtin_i18();
  auto m = OutcomeMode::detector1_vs_rest;
  EstimateWithError e1 = estimate_functional(t, f, m, m);
  EstimateWithError e4 = estimate_functional(t4, f, m, m);
  EXPECT_NEAR(e1.value, e4.value, 1e-12);
  EXPECT_NEAR(e4.sigma / e1.sigma, 0.5, 1e-6);
}

TEST(Estimate, EmptyPairIsAnError) {
  CountTable t = rounded_expected_counts(reference_probabilities(), 1000);
  t.counts[2][1].setZero();
  try {
    estimate_functional(t, builtin_i18(), OutcomeMode::detector1_vs_rest,
                        OutcomeMode::detector1_vs_rest);
    FAIL() << "expected an error for the empty basis pair";
  } catch (const std::runtime_error& err) {
    EXPECT_NE(std::string(err.what()).find("(2,1)"), std::string::npos);
  }
}

TEST(Estimate, PropagatedSigmaScalesAsInverseSqrt) {
  auto probs = reference_probabilities();
  auto f = builtin_i18();
  auto m = OutcomeMode::detector1_vs_rest;
  std::vector<double> logn, logs;
  for (long long per_pair : {531LL, 5313LL, 53130LL, 531300LL}) {
    CountTable t = rounded_expected_counts(probs, per_pair);
    EstimateWithError e = estimate_functional(t, f, m, m);
    logn.push_back(std::log(static_cast<double>(per_pair)));
    logs.push_back(std::log(e.sigma));
  }
  double n = static_cast<double>(logn.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < logn.size(); ++k) {
    sx += logn[k];
    sy += logs[k];
    sxx += logn[k] * logn[k];
    sxy += logn[k] * logs[k];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_NEAR(slope, -0.5, 0.05);
}

TEST(Estimate, MonteCarloStdMatchesPropagation) {
  auto probs = reference_probabilities();
  auto budget = split_total(85000, 4, 4);
  auto f = builtin_i18();
  auto m = OutcomeMode::detector1_vs_rest;
  Rng master(314159);
  std::vector<double> values;
  double sigma_prop = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    CountTable t = simulate_counts(probs, budget, master.derive(rep).raw());
    EstimateWithError e = estimate_functional(t, f, m, m);
    values.push_back(e.value);
    sigma_prop += e.sigma;
  }
  sigma_prop /= values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / (values.size() - 1));
  EXPECT_NEAR(sd, 0.03, 0.01);                      // empirical spread at 85k events
  EXPECT_NEAR(mean, kWorkingPoint, 5.0 * sd / std::sqrt(200.0));
  EXPECT_NEAR(sigma_prop / sd, 1.0, 0.2);           // propagation tracks the spread
}

TEST(Estimate, BootstrapAgreesWithPropagation) {
  auto probs = reference_probabilities();
  CountTable t = simulate_counts(probs, split_total(85000, 4, 4), 777);
  EstimateWithError e = estimate_with_uncertainty(
      t, builtin_i18(), OutcomeMode::detector1_vs_rest,
      OutcomeMode::detector1_vs_rest, 200, 778);
  EXPECT_EQ(e.method, "propagation+bootstrap");
  EXPECT_GT(e.sigma_bootstrap, 0.0);
  EXPECT_NEAR(e.sigma_bootstrap / e.sigma, 1.0, 0.2);
  EXPECT_THROW(estimate_with_uncertainty(t, builtin_i18(),
                                         OutcomeMode::detector1_vs_rest,
                                         OutcomeMode::detector1_vs_rest, 1, 1),
               std::invalid_argument);
}

TEST(Estimate, FunctionalCoverageAtThreeSigma) {
  auto probs = reference_probabilities();
  auto budget = split_total(1000000, 4, 4);
  auto f = builtin_i18();
  auto m = OutcomeMode::detector1_vs_rest;
  Rng master(2718);
  int covered = 0;
  const int trials = 40;
  for (int r = 0; r < trials; ++r) {
    CountTable t = simulate_counts(probs, budget, master.derive(r).raw());
    EstimateWithError e = estimate_functional(t, f, m, m);
    if (std::fabs(e.value - kWorkingPoint) < 3.0 * e.sigma) ++covered;
  }
  EXPECT_GE(covered, trials * 9 / 10);
}

TEST(SteeringEstimate, PlugInMatchesAnalyticOnExpectedCounts) {
  MeasurementPlan plan = steering_plan();
  for (double lam : {1.0, 0.5, 0.0}) {
    Mat rho = apply_noise({Family::phi4}, {1.0, 1.0, lam}, NoiseModel::rho4);
    Eigen::Matrix4d px = outcome_table(rho, plan.settings[0], plan.settings[0]);
    Eigen::Matrix4d pz = outcome_table(rho, plan.settings[1], plan.settings[1]);
    Counts4 cx, cz;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        cx(a, b) = std::llround(1e8 * px(a, b));
        cz(a, b) = std::llround(1e8 * pz(a, b));
      }
    EstimateWithError e = estimate_steering(cx, cz);
    EXPECT_NEAR(e.value, (1.0 + lam) / 2.0, 1e-6);
    // At the extreme point every occupied cell carries the sign of the mean,
    // so the first-order variance vanishes there and only there.
    if (lam < 1.0) EXPECT_GT(e.sigma, 0.0);
    else EXPECT_NEAR(e.sigma, 0.0, 1e-9);
  }
}

TEST(SteeringEstimate, EmptyBasisIsAnError) {
  Counts4 cx = Counts4::Constant(5), cz = Counts4::Zero();
  EXPECT_THROW(estimate_steering(cx, cz), std::runtime_error);
}

TEST(SteeringEstimate, CoverageAtThreeSigma) {
  Mat rho = apply_noise({Family::phi4}, {1.0, 1.0, 0.5}, NoiseModel::rho4);
  Rng master(161803);
  int covered = 0;
  const int trials = 40;
  for (int r = 0; r < trials; ++r) {
    auto [cx, cz] = steering_counts(rho, 500000, master.derive(r).raw());
    EstimateWithError e = estimate_steering(cx, cz);
    if (std::fabs(e.value - 0.75) < 3.0 * e.sigma) ++covered;
  }
  EXPECT_GE(covered, trials * 9 / 10);
}

TEST(SteeringEstimate, BootstrapAgreesWithPropagation) {
  Mat rho = apply_noise({Family::phi4}, {1.0, 1.0, 0.5}, NoiseModel::rho4);
  auto [cx, cz] = steering_counts(rho, 42500, 555);
  EstimateWithError e = estimate_steering(cx, cz, 200, 556);
  EXPECT_EQ(e.method, "propagation+bootstrap");
  EXPECT_NEAR(e.sigma_bootstrap / e.sigma, 1.0, 0.2);
}

TEST(CountsCsv, DeterministicLayout) {
  CountTable t;
  t.planned = uniform_budget(10, 1, 1);
  t.counts.resize(1);
  t.counts[0].resize(1);
  t.counts[0][0].setZero();
  t.counts[0][0](0, 0) = 7;
  t.counts[0][0](3, 2) = 2;
  std::ostringstream os;
  write_counts_csv(t, os);
  std::string text = os.str();
  EXPECT_EQ(text.substr(0, 28), "basisA,basisB,detA,detB,coun");
  EXPECT_NE(text.find("0,0,1,1,7\n"), std::string::npos);
  EXPECT_NE(text.find("0,0,4,3,2\n"), std::string::npos);
  std::ostringstream os2;
  write_counts_csv(t, os2);
  EXPECT_EQ(text, os2.str());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 17);
}
