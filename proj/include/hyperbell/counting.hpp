#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperbell/analyzer.hpp"
#include "hyperbell/functionals.hpp"
#include "hyperbell/rng.hpp"
#include "hyperbell/steering.hpp"

namespace hyperbell {

using Counts4 = Eigen::Matrix<long long, 4, 4>;

// Raw per-detector-pair coincidence counts, one 4x4 block per basis pair.
struct CountTable {
  std::vector<std::vector<Counts4>> counts;
  std::vector<std::vector<long long>> planned;
  int rows() const { return static_cast<int>(counts.size()); }
  int cols() const { return counts.empty() ? 0 : static_cast<int>(counts[0].size()); }
};

// Spread a total event budget evenly over basis pairs; the remainder goes to
// the leading pairs in row-major order.
inline std::vector<std::vector<long long>> split_total(long long total, int nA, int nB) {
  std::vector<std::vector<long long>> out(nA, std::vector<long long>(nB));
  long long pairs = static_cast<long long>(nA) * nB;
  long long base = total / pairs, rem = total % pairs;
  for (int i = 0; i < nA; ++i)
    for (int j = 0; j < nB; ++j)
      out[i][j] = base + (static_cast<long long>(i) * nB + j < rem ? 1 : 0);
  return out;
}

template <typename State>
std::vector<std::vector<Eigen::Matrix4d>> expected_tables(
    const State& state, const MeasurementPlan& planA, const MeasurementPlan& planB) {
  std::vector<std::vector<Eigen::Matrix4d>> tables(planA.settings.size());
  for (std::size_t i = 0; i < planA.settings.size(); ++i) {
    tables[i].resize(planB.settings.size());
    for (std::size_t j = 0; j < planB.settings.size(); ++j)
      tables[i][j] = outcome_table(state, planA.settings[i], planB.settings[j]);
  }
  return tables;
}

// Each cell draws independently from Poisson(n_events * p), the usual model
// for accumulated coincidence counts over a fixed integration window.
inline CountTable simulate_counts(
    const std::vector<std::vector<Eigen::Matrix4d>>& probabilities,
    const std::vector<std::vector<long long>>& n_events, std::uint64_t seed) {
  if (probabilities.size() != n_events.size())
    throw std::invalid_argument("simulate_counts: shape mismatch");
  Rng rng(seed);
  CountTable out;
  out.planned = n_events;
  out.counts.resize(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i].size() != n_events[i].size())
      throw std::invalid_argument("simulate_counts: shape mismatch");
    out.counts[i].resize(probabilities[i].size());
    for (std::size_t j = 0; j < probabilities[i].size(); ++j) {
      const Eigen::Matrix4d& p = probabilities[i][j];
      if (p.minCoeff() < -1e-12 || p.sum() > 1.0 + 1e-9)
        throw std::invalid_argument("simulate_counts: invalid probability table");
      Counts4& c = out.counts[i][j];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          c(a, b) = rng.poisson(static_cast<double>(n_events[i][j]) *
                                std::max(p(a, b), 0.0));
    }
  }
  return out;
}

struct EstimateWithError {
  double value = 0.0;
  double sigma = 0.0;            // first-order error propagation
  double sigma_bootstrap = 0.0;  // parametric bootstrap, 0 when disabled
  std::string method = "propagation";
};

namespace detail {

// Per-cell weight of the plug-in estimator within one basis pair: the joint
// coefficient hits outcome-(1,1) cells, each marginal coefficient is spread
// over its party's partner settings.
inline double cell_weight(const BellFunctional& f, OutcomeMode modeA,
                          OutcomeMode modeB, int i, int j, int a, int b) {
  int sa = binary_slot(modeA, a), sb = binary_slot(modeB, b);
  if (sa < 0 || sb < 0) return 0.0;
  double w = 0.0;
  if (sa == 0 && sb == 0) w += f.joint(i, j);
  if (sa == 0) w += f.margA(i) / f.nB;
  if (sb == 0) w += f.margB(j) / f.nA;
  return w;
}

struct PairAccum {
  double value = 0.0;
  double variance = 0.0;
};

inline PairAccum accumulate_pair(const BellFunctional& f, OutcomeMode modeA,
                                 OutcomeMode modeB, int i, int j, const Counts4& c) {
  double total = 0.0, sw = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (binary_slot(modeA, a) < 0 || binary_slot(modeB, b) < 0) continue;
      total += static_cast<double>(c(a, b));
      sw += cell_weight(f, modeA, modeB, i, j, a, b) * static_cast<double>(c(a, b));
    }
  if (total <= 0.0)
    throw std::runtime_error("estimate: basis pair (" + std::to_string(i) + "," +
                             std::to_string(j) + ") has no counts");
  PairAccum acc;
  acc.value = sw / total;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (binary_slot(modeA, a) < 0 || binary_slot(modeB, b) < 0) continue;
      double w = cell_weight(f, modeA, modeB, i, j, a, b);
      double deriv = w / total - sw / (total * total);
      acc.variance += static_cast<double>(c(a, b)) * deriv * deriv;
    }
  return acc;
}

}

// Plug-in estimate of the functional from counts, normalizing each basis
// pair by its observed total. sigma comes from first-order propagation of
// independent Poisson cell fluctuations through that plug-in formula.
inline EstimateWithError estimate_functional(const CountTable& counts,
                                             const BellFunctional& f,
                                             OutcomeMode modeA, OutcomeMode modeB) {
  if (counts.rows() != f.nA || counts.cols() != f.nB)
    throw std::invalid_argument("estimate_functional: table shape mismatch");
  EstimateWithError est;
  est.value = f.constant;
  double var = 0.0;
  for (int i = 0; i < f.nA; ++i)
    for (int j = 0; j < f.nB; ++j) {
      detail::PairAccum acc =
          detail::accumulate_pair(f, modeA, modeB, i, j, counts.counts[i][j]);
      est.value += acc.value;
      var += acc.variance;
    }
  est.sigma = std::sqrt(var);
  return est;
}

// Parametric bootstrap: resample every cell as Poisson(observed count) and
// take the sample standard deviation of the re-estimates.
inline double bootstrap_sigma(const CountTable& counts, const BellFunctional& f,
                              OutcomeMode modeA, OutcomeMode modeB, int reps,
                              std::uint64_t seed) {
  if (reps < 2) throw std::invalid_argument("bootstrap_sigma: need reps >= 2");
  Rng rng(seed);
  std::vector<double> values;
  values.reserve(reps);
  CountTable resampled = counts;
  for (int r = 0; r < reps; ++r) {
    for (int i = 0; i < counts.rows(); ++i)
      for (int j = 0; j < counts.cols(); ++j)
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            resampled.counts[i][j](a, b) =
                rng.poisson(static_cast<double>(counts.counts[i][j](a, b)));
    values.push_back(estimate_functional(resampled, f, modeA, modeB).value);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (values.size() - 1));
}

inline EstimateWithError estimate_with_uncertainty(const CountTable& counts,
                                                   const BellFunctional& f,
                                                   OutcomeMode modeA,
                                                   OutcomeMode modeB,
                                                   int bootstrap_reps,
                                                   std::uint64_t bootstrap_seed) {
  EstimateWithError est = estimate_functional(counts, f, modeA, modeB);
  if (bootstrap_reps > 0) {
    est.sigma_bootstrap =
        bootstrap_sigma(counts, f, modeA, modeB, bootstrap_reps, bootstrap_seed);
    est.method = "propagation+bootstrap";
  }
  return est;
}

namespace detail {

// Signed mean of one 4x4 count block plus its propagated Poisson variance.
// sign(a, b) = rows[a] * cols[b]; rows index the trusted party, matching
// signed_mean on probability tables.
inline PairAccum signed_mean_counts(const Counts4& c,
                                    const std::array<double, 4>& rows,
                                    const std::array<double, 4>& cols,
                                    const char* label) {
  double total = static_cast<double>(c.sum());
  if (total <= 0.0)
    throw std::runtime_error(std::string("estimate: ") + label + " table has no counts");
  PairAccum acc;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc.value += rows[a] * cols[b] * static_cast<double>(c(a, b));
  acc.value /= total;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double deriv = (rows[a] * cols[b] - acc.value) / total;
      acc.variance += static_cast<double>(c(a, b)) * deriv * deriv;
    }
  return acc;
}

}

// Plug-in steering estimate from the two protocol count blocks (rows = the
// trusted party's detectors). Mirrors steering_from_tables on frequencies.
inline EstimateWithError estimate_steering(const Counts4& counts_x,
                                           const Counts4& counts_z,
                                           int bootstrap_reps = 0,
                                           std::uint64_t bootstrap_seed = 0) {
  auto both = [](const Counts4& cx, const Counts4& cz) {
    detail::PairAccum ex = detail::signed_mean_counts(cx, trusted_signs(),
                                                      untrusted_signs_x(), "X-basis");
    detail::PairAccum ez = detail::signed_mean_counts(cz, trusted_signs(),
                                                      untrusted_signs_z(), "Z-basis");
    detail::PairAccum s;
    s.value = 0.5 * (ex.value + ez.value);
    s.variance = 0.25 * (ex.variance + ez.variance);
    return s;
  };
  detail::PairAccum acc = both(counts_x, counts_z);
  EstimateWithError est;
  est.value = acc.value;
  est.sigma = std::sqrt(acc.variance);
  if (bootstrap_reps > 0) {
    if (bootstrap_reps < 2)
      throw std::invalid_argument("estimate_steering: need bootstrap_reps >= 2");
    Rng rng(bootstrap_seed);
    std::vector<double> values;
    values.reserve(bootstrap_reps);
    Counts4 rx, rz;
    for (int r = 0; r < bootstrap_reps; ++r) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          rx(a, b) = rng.poisson(static_cast<double>(counts_x(a, b)));
          rz(a, b) = rng.poisson(static_cast<double>(counts_z(a, b)));
        }
      values.push_back(both(rx, rz).value);
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    est.sigma_bootstrap = std::sqrt(ss / (values.size() - 1));
    est.method = "propagation+bootstrap";
  }
  return est;
}

// One line per nonempty coordinate: basis indices, detector indices, count.
inline void write_counts_csv(const CountTable& counts, std::ostream& os) {
  os << "basisA,basisB,detA,detB,count\n";
  for (int i = 0; i < counts.rows(); ++i)
    for (int j = 0; j < counts.cols(); ++j)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          os << i << ',' << j << ',' << a + 1 << ',' << b + 1 << ','
             << counts.counts[i][j](a, b) << '\n';
}

}
