#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hyperbell/linalg.hpp"

namespace hyperbell {

// Single-photon levels combine polarization (H=0, V=1) and arrival slot
// (t1=0, t2=1) as index 2*pol + slot, so the ladder reads
// |0> = |H,t1>, |1> = |H,t2>, |2> = |V,t1>, |3> = |V,t2>.
inline constexpr int level_index(int pol, int slot) { return 2 * pol + slot; }

// Two-photon amplitudes live on C^16 with pair index 4*a + b (a = signal
// photon level, b = idler photon level).
inline constexpr int pair_index(int a, int b) { return 4 * a + b; }

enum class Family { pol_only, time_only, hyper, psi4, phi4, phi4_phased };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::pol_only: return "pol_only";
    case Family::time_only: return "time_only";
    case Family::hyper: return "hyper";
    case Family::psi4: return "psi4";
    case Family::phi4: return "phi4";
    case Family::phi4_phased: return "phi4_phased";
  }
  return "?";
}

inline Family family_from_name(const std::string& s) {
  for (Family f : {Family::pol_only, Family::time_only, Family::hyper,
                   Family::psi4, Family::phi4, Family::phi4_phased})
    if (s == family_name(f)) return f;
  throw std::invalid_argument("unknown state family: " + s);
}

struct StateSpec {
  Family family = Family::psi4;
  double phi_p = 0.0;   // polarization pair phase
  double phi_t = 0.0;   // time-slot pair phase
  double phi_e1 = 0.0;  // relative phase on |11>
  double phi_e2 = M_PI; // relative phase on |33>
  double phi_r = 0.0;   // common reference phase
};

// Rearrange a (polarization pair) x (slot pair) product so indices follow the
// combined-level convention above: out[(2pA+tA)*4 + (2pB+tB)] = pol[2pA+pB] * slot[2tA+tB].
inline Vec compose_dofs(const Vec& pol_pair, const Vec& slot_pair) {
  if (pol_pair.size() != 4 || slot_pair.size() != 4)
    throw std::invalid_argument("compose_dofs: expected two 4-vectors");
  Vec out(16);
  for (int pA = 0; pA < 2; ++pA)
    for (int tA = 0; tA < 2; ++tA)
      for (int pB = 0; pB < 2; ++pB)
        for (int tB = 0; tB < 2; ++tB)
          out(pair_index(level_index(pA, tA), level_index(pB, tB))) =
              pol_pair(2 * pA + pB) * slot_pair(2 * tA + tB);
  return out;
}

inline Vec bell_pair(double phi) {
  Vec v = Vec::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = std::exp(cx(0.0, phi)) / std::sqrt(2.0);
  return v;
}

inline Vec make_state(const StateSpec& s) {
  switch (s.family) {
    case Family::pol_only:
      return compose_dofs(bell_pair(s.phi_p), Vec::Unit(4, 0));
    case Family::time_only:
      return compose_dofs(Vec::Unit(4, 0), bell_pair(s.phi_t));
    case Family::hyper:
      return compose_dofs(bell_pair(s.phi_p), bell_pair(s.phi_t));
    case Family::psi4: {
      Vec v = Vec::Zero(16);
      for (int i = 0; i < 4; ++i) v(pair_index(i, i)) = 0.5;
      return v;
    }
    case Family::phi4: {
      StateSpec p = s;
      p.family = Family::phi4_phased;
      p.phi_e1 = 0.0;
      p.phi_e2 = M_PI;
      p.phi_r = 0.0;
      return make_state(p);
    }
    case Family::phi4_phased: {
      Vec v = Vec::Zero(16);
      v(pair_index(0, 0)) = 0.5;
      v(pair_index(1, 1)) = 0.5 * std::exp(cx(0.0, s.phi_e1 + s.phi_r));
      v(pair_index(2, 2)) = 0.5 * std::exp(cx(0.0, s.phi_r));
      v(pair_index(3, 3)) = 0.5 * std::exp(cx(0.0, s.phi_e2));
      return v;
    }
  }
  throw std::invalid_argument("make_state: bad family");
}

enum class NoiseModel { product_dephase, rho4 };

struct NoiseSpec {
  double lambda_pol = 1.0;
  double lambda_time = 1.0;
  double lambda = 1.0;
};

namespace detail {

// One degree of freedom under phase averaging: the coherent pair survives
// with weight lambda, the rest collapses onto the two classical pair terms.
inline Mat dephased_pair(double lambda, double phi) {
  lambda = std::clamp(lambda, 0.0, 1.0);
  Mat rho = lambda * projector(bell_pair(phi));
  rho(0, 0) += (1.0 - lambda) / 2.0;
  rho(3, 3) += (1.0 - lambda) / 2.0;
  return rho;
}

inline Mat reorder_product(const Mat& pol_pair, const Mat& slot_pair) {
  Mat out(16, 16);
  for (int pA = 0; pA < 2; ++pA)
    for (int tA = 0; tA < 2; ++tA)
      for (int pB = 0; pB < 2; ++pB)
        for (int tB = 0; tB < 2; ++tB) {
          int row = pair_index(level_index(pA, tA), level_index(pB, tB));
          for (int qA = 0; qA < 2; ++qA)
            for (int uA = 0; uA < 2; ++uA)
              for (int qB = 0; qB < 2; ++qB)
                for (int uB = 0; uB < 2; ++uB) {
                  int col = pair_index(level_index(qA, uA), level_index(qB, uB));
                  out(row, col) = pol_pair(2 * pA + pB, 2 * qA + qB) *
                                  slot_pair(2 * tA + tB, 2 * uA + uB);
                }
        }
  return out;
}

}

inline Mat apply_noise(const StateSpec& state, const NoiseSpec& noise, NoiseModel model) {
  switch (model) {
    case NoiseModel::product_dephase: {
      if (state.family != Family::psi4 && state.family != Family::hyper)
        throw std::invalid_argument(
            "product_dephase applies to psi4 or hyper states");
      double phi_p = state.family == Family::hyper ? state.phi_p : 0.0;
      double phi_t = state.family == Family::hyper ? state.phi_t : 0.0;
      return detail::reorder_product(detail::dephased_pair(noise.lambda_pol, phi_p),
                                     detail::dephased_pair(noise.lambda_time, phi_t));
    }
    case NoiseModel::rho4: {
      if (state.family != Family::phi4 && state.family != Family::phi4_phased)
        throw std::invalid_argument("rho4 noise applies to phi4-type states");
      double lambda = std::clamp(noise.lambda, 0.0, 1.0);
      Mat rho = lambda * projector(make_state(state));
      for (int i = 0; i < 4; ++i)
        rho(pair_index(i, i), pair_index(i, i)) += (1.0 - lambda) / 4.0;
      return rho;
    }
  }
  throw std::invalid_argument("apply_noise: bad model");
}

inline double joint_probability(const Mat& rho, const Vec& ket_a, const Vec& ket_b) {
  Vec pair = kron(ket_a, ket_b);
  return std::real(cx(pair.adjoint() * rho * pair));
}

inline double joint_probability(const Vec& psi, const Vec& ket_a, const Vec& ket_b) {
  cx amp = kron(ket_a, ket_b).dot(psi);
  return std::norm(amp);
}

}
