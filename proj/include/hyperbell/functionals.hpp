#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperbell/analyzer.hpp"
#include "hyperbell/linalg.hpp"

namespace hyperbell {

// Correlator of a two-outcome pair of measurements from the four joint
// probabilities (or counts): E = p11 - p12 - p21 + p22.
inline double correlator(double n11, double n12, double n21, double n22) {
  double total = n11 + n12 + n21 + n22;
  if (total <= 0.0) throw std::runtime_error("correlator: empty table");
  return (n11 - n12 - n21 + n22) / total;
}

inline double correlator(const Eigen::Matrix2d& p) {
  return correlator(p(0, 0), p(0, 1), p(1, 0), p(1, 1));
}

// S = E(a,b) + E(a,b') + E(a',b) - E(a',b') with rows indexing this party's
// settings and columns the other party's.
inline double chsh_value(const Eigen::Matrix2d& correlators) {
  return correlators(0, 0) + correlators(0, 1) + correlators(1, 0) -
         correlators(1, 1);
}

// Linear functional over outcome-1 probabilities:
//   value = sum_ij joint(i,j) p(1,1|i,j) + sum_i margA(i) pA(1|i)
//         + sum_j margB(j) pB(1|j) + constant.
struct BellFunctional {
  std::string name;
  int nA = 4, nB = 4;
  Eigen::MatrixXd joint;
  Eigen::VectorXd margA, margB;
  double constant = 0.0;
  std::optional<double> bound_local, bound_qubit, bound_apparatus_max,
      bound_quantum;
};

inline BellFunctional builtin_i18() {
  BellFunctional f;
  f.name = "I18_4422";
  f.nA = 4;
  f.nB = 4;
  f.joint.resize(4, 4);
  f.joint << 2, 2, 2, -1,
             2, 1, -2, 2,
             2, -2, -2, -2,
            -1, 2, -2, -1;
  f.margA.resize(4);
  f.margA << -2, -2, 0, 0;
  f.margB = f.margA;
  f.bound_local = 0.0;
  f.bound_qubit = 0.18;
  f.bound_apparatus_max = 0.46;
  f.bound_quantum = 0.64;
  return f;
}

// CHSH rewritten over outcome-1 probabilities (E = 4 p11 - 2 pA - 2 pB + 1),
// so the same evaluation path covers both inequalities. Local bound 2.
inline BellFunctional builtin_chsh() {
  BellFunctional f;
  f.name = "CHSH";
  f.nA = 2;
  f.nB = 2;
  f.joint.resize(2, 2);
  f.joint << 4, 4, 4, -4;
  f.margA.resize(2);
  f.margA << -4, 0;
  f.margB = f.margA;
  f.constant = 2.0;
  f.bound_local = 2.0;
  f.bound_quantum = 2.0 * std::sqrt(2.0);
  return f;
}

// tables(i, j) is the binarized 2x2 joint distribution for setting pair
// (i, j). Marginals are read off the joints and averaged over the partner's
// settings; for no-signaling inputs the average is exact.
inline double evaluate_functional(
    const BellFunctional& f,
    const std::vector<std::vector<Eigen::Matrix2d>>& tables) {
  if (static_cast<int>(tables.size()) != f.nA)
    throw std::invalid_argument("evaluate_functional: wrong number of rows");
  for (const auto& row : tables)
    if (static_cast<int>(row.size()) != f.nB)
      throw std::invalid_argument("evaluate_functional: wrong number of cols");
  double value = f.constant;
  for (int i = 0; i < f.nA; ++i)
    for (int j = 0; j < f.nB; ++j)
      value += f.joint(i, j) * tables[i][j](0, 0);
  for (int i = 0; i < f.nA; ++i) {
    double pa = 0.0;
    for (int j = 0; j < f.nB; ++j) pa += tables[i][j].row(0).sum();
    value += f.margA(i) * pa / f.nB;
  }
  for (int j = 0; j < f.nB; ++j) {
    double pb = 0.0;
    for (int i = 0; i < f.nA; ++i) pb += tables[i][j].col(0).sum();
    value += f.margB(j) * pb / f.nA;
  }
  return value;
}

// A measurement plan pairs one analyzer setting per functional input with the
// grouping of the four detectors into the two outcomes.
struct MeasurementPlan {
  std::vector<AnalyzerSettings> settings;
  OutcomeMode mode = OutcomeMode::detector1_vs_rest;
};

template <typename State>
inline std::vector<std::vector<Eigen::Matrix2d>> binarized_tables(
    const State& state, const MeasurementPlan& planA, const MeasurementPlan& planB) {
  std::vector<std::vector<Eigen::Matrix2d>> tables(planA.settings.size());
  for (std::size_t i = 0; i < planA.settings.size(); ++i) {
    tables[i].resize(planB.settings.size());
    for (std::size_t j = 0; j < planB.settings.size(); ++j)
      tables[i][j] =
          binarize_outcomes(outcome_table(state, planA.settings[i], planB.settings[j]),
                            planA.mode, planB.mode);
  }
  return tables;
}

// Pure-state overload hoisting the per-setting detector bases out of the
// basis-pair loop; the optimizer's objective lives here.
inline std::vector<std::vector<Eigen::Matrix2d>> binarized_tables(
    const Vec& psi, const MeasurementPlan& planA, const MeasurementPlan& planB) {
  bool polarized = false;
  for (const auto& s : planA.settings) polarized |= s.input_polarizer.has_value();
  for (const auto& s : planB.settings) polarized |= s.input_polarizer.has_value();
  if (polarized)
    return binarized_tables<Vec>(psi, planA, planB);
  Eigen::Matrix4cd m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = psi(pair_index(a, b));
  auto bases = [](const MeasurementPlan& plan) {
    std::vector<Eigen::Matrix4cd> ks(plan.settings.size());
    for (std::size_t i = 0; i < plan.settings.size(); ++i) {
      DetectorBasis d = detector_basis(plan.settings[i]);
      for (int k = 0; k < 4; ++k) ks[i].col(k) = Eigen::Vector4cd(d[k]);
    }
    return ks;
  };
  std::vector<Eigen::Matrix4cd> ka = bases(planA), kb = bases(planB);
  std::vector<std::vector<Eigen::Matrix2d>> tables(planA.settings.size());
  for (std::size_t i = 0; i < ka.size(); ++i) {
    tables[i].resize(kb.size());
    Eigen::Matrix4cd left = ka[i].adjoint() * m;
    for (std::size_t j = 0; j < kb.size(); ++j)
      tables[i][j] = binarize_outcomes(
          Eigen::Matrix4d((left * kb[j].conjugate()).cwiseAbs2()), planA.mode,
          planB.mode);
  }
  return tables;
}

template <typename State>
inline double evaluate_on_state(const BellFunctional& f, const State& state,
                                const MeasurementPlan& planA,
                                const MeasurementPlan& planB) {
  if (static_cast<int>(planA.settings.size()) != f.nA ||
      static_cast<int>(planB.settings.size()) != f.nB)
    throw std::invalid_argument("evaluate_on_state: plan size mismatch");
  return evaluate_functional(f, binarized_tables(state, planA, planB));
}

}
