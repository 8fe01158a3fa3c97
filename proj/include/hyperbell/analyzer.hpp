#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "hyperbell/linalg.hpp"
#include "hyperbell/states.hpp"

namespace hyperbell {

using Mat2 = Eigen::Matrix2cd;

inline constexpr double kDegree = M_PI / 180.0;

inline Mat2 hwp_jones(double theta) {
  Mat2 m;
  double c = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
  m << c, s, s, -c;
  return m;
}

inline Mat2 qwp_jones(double theta) {
  Mat2 m;
  double c = std::cos(theta), s = std::sin(theta);
  cx od = (1.0 - cx(0.0, 1.0)) * s * c;
  m << cx(c * c, s * s), od, od, cx(s * s, c * c);
  return m;
}

// One party's analyzer: wave-plate pair 1 sits before the unbalanced
// interferometer, pairs 2 and 3 sit in its two output ports, each followed by
// a polarizing splitter. Angles are radians. phi_a / phi_b are the residual
// interferometer phases of the two ports. input_polarizer, when set, models a
// polarizer inserted before the analyzer (projection plus renormalization).
struct AnalyzerSettings {
  double hwp1 = 0.0, qwp1 = 0.0;
  double hwp2 = 0.0, qwp2 = 0.0;
  double hwp3 = 0.0, qwp3 = 0.0;
  double phi_a = 0.0, phi_b = 0.0;
  std::optional<double> input_polarizer;
};

// Normalized single-photon kets each detector projects onto, in the combined
// level basis. Detectors 1 and 2 are the H/V splitter outputs of the early
// port, 3 and 4 of the late port. Only amplitudes reaching the middle time
// bin interfere; each listed ket carries an overall factor
// kMiddleBinAmplitude in the physical collapse, so an unconditioned
// coincidence lands on any (i, j) pair with total probability 1/16.
inline constexpr double kMiddleBinAmplitude = 0.5;

using DetectorBasis = std::array<Vec, 4>;

namespace detail {

// Ket for detecting |pol> behind the port wave plates, pulled back through
// the interferometer and the input wave plates. The early port overlaps
// |H,t1> with |V,t2>, the late port |H,t2> with |V,t1>.
inline Vec detector_ket(const Mat2& u1, const Mat2& u_port, int pol, bool early,
                        double port_phase) {
  Eigen::Vector2cd w = u_port.adjoint() * Eigen::Vector2cd::Unit(pol);
  Vec pre = Vec::Zero(4);
  cx late_phase = std::exp(cx(0.0, -port_phase));
  if (early) {
    pre(level_index(0, 0)) = w(0);
    pre(level_index(1, 1)) = late_phase * w(1);
  } else {
    pre(level_index(0, 1)) = w(0);
    pre(level_index(1, 0)) = late_phase * w(1);
  }
  Mat2 u1d = u1.adjoint();
  Vec out = Vec::Zero(4);
  for (int p = 0; p < 2; ++p)
    for (int t = 0; t < 2; ++t)
      for (int q = 0; q < 2; ++q)
        out(level_index(p, t)) += u1d(p, q) * pre(level_index(q, t));
  out.normalize();
  return out;
}

}

inline DetectorBasis detector_basis(const AnalyzerSettings& s) {
  Mat2 u1 = qwp_jones(s.qwp1) * hwp_jones(s.hwp1);
  Mat2 u2 = hwp_jones(s.hwp2) * qwp_jones(s.qwp2);
  Mat2 u3 = hwp_jones(s.hwp3) * qwp_jones(s.qwp3);
  return {detail::detector_ket(u1, u2, 0, true, s.phi_a),
          detail::detector_ket(u1, u2, 1, true, s.phi_a),
          detail::detector_ket(u1, u3, 0, false, s.phi_b),
          detail::detector_ket(u1, u3, 1, false, s.phi_b)};
}

namespace detail {

inline Mat polarizer_op(double angle) {
  Eigen::Vector2cd chi(std::cos(angle), std::sin(angle));
  Mat p = Mat::Zero(4, 4);
  for (int pp = 0; pp < 2; ++pp)
    for (int qq = 0; qq < 2; ++qq)
      for (int t = 0; t < 2; ++t)
        p(level_index(pp, t), level_index(qq, t)) = chi(pp) * std::conj(chi(qq));
  return p;
}

}

// Probability of each detector pair (rows: first party's detector, columns:
// second party's), conditioned on a middle-bin coincidence.
inline Eigen::Matrix4d outcome_table(const Mat& rho, const AnalyzerSettings& sA,
                                     const AnalyzerSettings& sB) {
  Mat state = rho;
  if (sA.input_polarizer || sB.input_polarizer) {
    Mat pA = sA.input_polarizer ? detail::polarizer_op(*sA.input_polarizer)
                                : Mat::Identity(4, 4);
    Mat pB = sB.input_polarizer ? detail::polarizer_op(*sB.input_polarizer)
                                : Mat::Identity(4, 4);
    Mat p = kron(pA, pB);
    state = p * state * p.adjoint();
    double w = std::real(state.trace());
    if (w <= 1e-15)
      throw std::runtime_error("input polarizer removed all state weight");
    state /= w;
  }
  DetectorBasis dA = detector_basis(sA), dB = detector_basis(sB);
  Eigen::Matrix4d out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out(i, j) = joint_probability(state, dA[i], dB[j]);
  return out;
}

inline Eigen::Matrix4d outcome_table(const Vec& psi, const AnalyzerSettings& sA,
                                     const AnalyzerSettings& sB) {
  if (sA.input_polarizer || sB.input_polarizer)
    return outcome_table(Mat(projector(psi)), sA, sB);
  DetectorBasis dA = detector_basis(sA), dB = detector_basis(sB);
  Eigen::Matrix4cd m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = psi(pair_index(a, b));
  Eigen::Matrix4cd ka, kb;
  for (int i = 0; i < 4; ++i) {
    ka.col(i) = Eigen::Vector4cd(dA[i]);
    kb.col(i) = Eigen::Vector4cd(dB[i]);
  }
  Eigen::Matrix4cd amp = ka.adjoint() * m * kb.conjugate();
  return amp.cwiseAbs2();
}

enum class OutcomeMode { detector1_vs_rest, portA_vs_portB, pair_D1_D4 };

inline OutcomeMode outcome_mode_from_name(const std::string& s) {
  if (s == "detector1_vs_rest") return OutcomeMode::detector1_vs_rest;
  if (s == "portA_vs_portB") return OutcomeMode::portA_vs_portB;
  if (s == "pair_D1_D4") return OutcomeMode::pair_D1_D4;
  throw std::invalid_argument("unknown outcome mode: " + s);
}

namespace detail {

// Map a detector index to a binary outcome slot, -1 meaning discarded.
inline int binary_slot(OutcomeMode mode, int detector) {
  switch (mode) {
    case OutcomeMode::detector1_vs_rest:
      return detector == 0 ? 0 : 1;
    case OutcomeMode::portA_vs_portB:
      return detector < 2 ? 0 : 1;
    case OutcomeMode::pair_D1_D4:
      if (detector == 0) return 0;
      if (detector == 3) return 1;
      return -1;
  }
  return -1;
}

}

inline Eigen::Matrix2d binarize_outcomes(const Eigen::Matrix4d& table,
                                         OutcomeMode modeA, OutcomeMode modeB) {
  Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
  bool discarded = false;
  for (int i = 0; i < 4; ++i) {
    int a = detail::binary_slot(modeA, i);
    for (int j = 0; j < 4; ++j) {
      int b = detail::binary_slot(modeB, j);
      if (a < 0 || b < 0) {
        discarded = true;
        continue;
      }
      out(a, b) += table(i, j);
    }
  }
  if (discarded) {
    double kept = out.sum();
    if (kept <= 1e-15)
      throw std::runtime_error("binarize_outcomes: no probability retained");
    out /= kept;
  }
  return out;
}

}
