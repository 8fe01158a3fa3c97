#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hyperbell/linalg.hpp"
#include "hyperbell/rng.hpp"
#include "hyperbell/states.hpp"

namespace hyperbell {

// The four levels split into two qubit-like sectors that the interferometer
// ports can address together: sector 1 = span{|0>, |3>}, sector 2 =
// span{|1>, |2>}. The steering witness uses the direct sums of the sector
// Pauli operators.
inline Mat steering_x() {
  Mat x = Mat::Zero(4, 4);
  x(0, 3) = x(3, 0) = 1.0;
  x(1, 2) = x(2, 1) = 1.0;
  return x;
}

inline Mat steering_z() {
  Mat z = Mat::Zero(4, 4);
  z(0, 0) = z(1, 1) = 1.0;
  z(2, 2) = z(3, 3) = -1.0;
  return z;
}

// sector 1 = {|0>, |3>} (the early-port pair), sector 2 = {|1>, |2>}.
inline Mat sector_projector(int sector) {
  Mat p = Mat::Zero(4, 4);
  if (sector == 1) {
    p(0, 0) = p(3, 3) = 1.0;
  } else if (sector == 2) {
    p(1, 1) = p(2, 2) = 1.0;
  } else {
    throw std::invalid_argument("sector_projector: sector must be 1 or 2");
  }
  return p;
}

// Untrusted-side two-outcome projective measurements used by the protocol.
// bases: 0 = X-type (superposition basis), 1 = Z-type (level basis).
// Outcome slots: 0 = +1, 1 = -1.
inline std::array<std::array<Mat, 2>, 2> protocol_measurements() {
  Vec x1p = Vec::Zero(4), x1m = Vec::Zero(4), x2p = Vec::Zero(4), x2m = Vec::Zero(4);
  double r = 1.0 / std::sqrt(2.0);
  x1p(0) = r; x1p(3) = r;
  x1m(0) = r; x1m(3) = -r;
  x2p(1) = r; x2p(2) = r;
  x2m(1) = r; x2m(2) = -r;
  // The source emits the two photons with their slot labels exchanged, so the
  // +1 outcome of the untrusted X measurement collects the sector-1 minus and
  // sector-2 plus superpositions.
  Mat xplus = projector(x1m) + projector(x2p);
  Mat zplus = Mat::Zero(4, 4);
  zplus(0, 0) = zplus(1, 1) = 1.0;
  std::array<std::array<Mat, 2>, 2> b;
  b[0][0] = xplus;
  b[0][1] = Mat::Identity(4, 4) - xplus;
  b[1][0] = zplus;
  b[1][1] = Mat::Identity(4, 4) - zplus;
  return b;
}

// Conditional (unnormalized) states of the trusted party given the untrusted
// party's outcome: ops[y][b] = Tr_B[(I (x) B_{b|y}) rho].
struct Assemblage {
  std::array<std::array<Mat, 2>, 2> ops;
};

inline Assemblage build_assemblage(const Mat& rho,
                                   const std::array<std::array<Mat, 2>, 2>& meas) {
  if (std::fabs(std::real(rho.trace()) - 1.0) > 1e-6)
    throw std::invalid_argument("build_assemblage: state trace must be 1");
  for (int y = 0; y < 2; ++y) {
    const Mat& p = meas[y][0];
    if (!is_hermitian(p) || (p * p - p).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("build_assemblage: outcome 0 is not a projector");
    if ((meas[y][0] + meas[y][1] - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("build_assemblage: outcomes do not sum to identity");
  }
  Assemblage a;
  Mat eye = Mat::Identity(4, 4);
  for (int y = 0; y < 2; ++y)
    for (int b = 0; b < 2; ++b)
      a.ops[y][b] = partial_trace(kron(eye, meas[y][b]) * rho, 0, 4, 4);
  return a;
}

// S = (Tr[F_X (X1+X2)] + Tr[F_Z (Z1+Z2)]) / 2 with F_y the outcome-signed
// sum of assemblage members. Exceeding 1/sqrt(2) rules out any unsteerable
// (local hidden state) explanation.
inline double steering_threshold() { return 1.0 / std::sqrt(2.0); }

inline double steering_value(const Assemblage& a) {
  Mat fx = a.ops[0][0] - a.ops[0][1];
  Mat fz = a.ops[1][0] - a.ops[1][1];
  return 0.5 * std::real((fx * steering_x()).trace() + (fz * steering_z()).trace());
}

// Detector sign conventions for computing S from coincidence tables.
// Trusted side: detectors 1 and 3 count as +1 in both bases. Untrusted side:
// same for the Z-type basis; in the X-type basis the slot exchange at the
// source flips the port-1 pair, so detectors 2 and 3 count as +1.
inline std::array<double, 4> trusted_signs() { return {1.0, -1.0, 1.0, -1.0}; }
inline std::array<double, 4> untrusted_signs_z() { return {1.0, -1.0, 1.0, -1.0}; }
inline std::array<double, 4> untrusted_signs_x() { return {-1.0, 1.0, 1.0, -1.0}; }

inline double signed_mean(const Eigen::Matrix4d& table,
                          const std::array<double, 4>& sA,
                          const std::array<double, 4>& sB) {
  double total = table.sum();
  if (total <= 0.0) throw std::runtime_error("signed_mean: empty table");
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) acc += sA[i] * sB[j] * table(i, j);
  return acc / total;
}

inline double steering_from_tables(const Eigen::Matrix4d& table_x,
                                   const Eigen::Matrix4d& table_z) {
  double ex = signed_mean(table_x, trusted_signs(), untrusted_signs_x());
  double ez = signed_mean(table_z, trusted_signs(), untrusted_signs_z());
  return 0.5 * (ex + ez);
}

// Relative phase of the second sector from early-port coincidence
// probabilities in the X-type basis: p1 = P(trusted -1, untrusted +1),
// p2 = P(both -1), both restricted to the early-port detector pair.
inline double extract_phase(double p1, double p2) {
  double arg = 4.0 * (p2 - p1);
  if (std::fabs(arg) > 1.0 + 1e-9)
    throw std::domain_error("extract_phase: probabilities out of range");
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

struct PortPhaseProbabilities {
  double p1 = 0.0, p2 = 0.0;
};

// Early-port restriction of an X-type basis coincidence table: the trusted
// -1 detector there is detector 2; the untrusted +1 and -1 detectors are the
// raw port labels 1 and 2.
inline PortPhaseProbabilities phase_probabilities(const Eigen::Matrix4d& table_x) {
  return {table_x(1, 0), table_x(1, 1)};
}

struct SeparableEnsemble {
  std::vector<double> weights;
  std::vector<Vec> states;  // the trusted party's pure states, dim 4
};

// Best steering value an unsteerable source can fake: the hidden-state
// response answers each basis with the sign of that state's expectation, so
// S = sum_k p_k (|<X>_k| + |<Z>_k|) / 2 <= 1/sqrt(2).
inline double lhs_optimal_value(const SeparableEnsemble& ens) {
  if (ens.weights.size() != ens.states.size() || ens.states.empty())
    throw std::invalid_argument("lhs_optimal_value: malformed ensemble");
  Mat x = steering_x(), z = steering_z();
  double s = 0.0, wsum = 0.0;
  for (std::size_t k = 0; k < ens.states.size(); ++k) {
    if (ens.weights[k] < 0.0)
      throw std::invalid_argument("lhs_optimal_value: negative weight");
    wsum += ens.weights[k];
    const Vec& a = ens.states[k];
    double ex = std::real(cx(a.adjoint() * x * a));
    double ez = std::real(cx(a.adjoint() * z * a));
    s += ens.weights[k] * 0.5 * (std::fabs(ex) + std::fabs(ez));
  }
  if (std::fabs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("lhs_optimal_value: weights must sum to 1");
  return s;
}

struct LhsWitnessResult {
  double max_value = 0.0;
  int exceed_count = 0;
  int trials = 0;
};

// Monte Carlo search over random hidden-state ensembles for any violation of
// the unsteerable bound (there should be none).
inline LhsWitnessResult lhs_witness_check(int trials, std::uint64_t seed) {
  Rng rng(seed);
  LhsWitnessResult res;
  res.trials = trials;
  for (int t = 0; t < trials; ++t) {
    int members = 1 + static_cast<int>(rng.uniform() * 3.0);
    SeparableEnsemble ens;
    double wsum = 0.0;
    for (int k = 0; k < members; ++k) {
      double w = rng.uniform() + 1e-3;
      ens.weights.push_back(w);
      wsum += w;
      Vec alpha(4);
      for (int i = 0; i < 4; ++i) alpha(i) = cx(rng.gauss(), rng.gauss());
      alpha.normalize();
      ens.states.push_back(alpha);
    }
    for (double& w : ens.weights) w /= wsum;
    double s = lhs_optimal_value(ens);
    res.max_value = std::max(res.max_value, s);
    if (s > steering_threshold() + 1e-9) ++res.exceed_count;
  }
  return res;
}

}
