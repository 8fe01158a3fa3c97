#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hyperbell/functionals.hpp"
#include "hyperbell/linalg.hpp"
#include "hyperbell/rng.hpp"

namespace hyperbell {

struct OptimizerConfig {
  int starts = 64;
  int max_iters = 500;
  double tol = 1e-9;
  std::uint64_t seed = 1;
};

namespace detail {

struct NmState {
  Eigen::VectorXd x;
  double f = 0.0;
  long evals = 0;
};

// Plain Nelder-Mead on an axis-aligned start simplex. One iteration is one
// reflect/expand/contract/shrink cycle; stops when the simplex function
// spread drops below ftol.
template <typename F>
NmState nelder_mead(F&& fn, const Eigen::VectorXd& x0, double step, double ftol,
                    int max_iters) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  long evals = 0;
  for (int i = 1; i <= n; ++i) pts[i](i - 1) += step;
  for (int i = 0; i <= n; ++i) {
    fv[i] = fn(pts[i]);
    ++evals;
  }
  std::vector<int> order(n + 1);
  for (int it = 0; it < max_iters; ++it) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fv[a] < fv[b]; });
    int best = order[0], worst = order[n], second = order[n - 1];
    if (fv[worst] - fv[best] < ftol) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= n;
    Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    double fr = fn(xr);
    ++evals;
    if (fr < fv[best]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      double fe = fn(xe);
      ++evals;
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (pts[worst] - centroid);
      double fc = fn(xc);
      ++evals;
      if (fc < fv[worst]) {
        pts[worst] = xc;
        fv[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          fv[i] = fn(pts[i]);
          ++evals;
        }
      }
    }
  }
  int ib = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[ib]) ib = i;
  return {pts[ib], fv[ib], evals};
}

// Restarting the simplex at the incumbent with progressively smaller
// axis-aligned steps polishes coordinates that a collapsed simplex stopped
// moving.
template <typename F>
NmState nelder_mead_polished(F&& fn, const Eigen::VectorXd& x0, double ftol,
                             int max_iters) {
  static const double kSteps[] = {0.5, 0.15, 0.05, 0.015, 0.005};
  NmState cur{x0, fn(x0), 1};
  for (double step : kSteps) {
    NmState leg = nelder_mead(fn, cur.x, step, ftol, max_iters);
    long total = cur.evals + leg.evals;
    if (leg.f < cur.f) cur = leg;
    cur.evals = total;
  }
  return cur;
}

}

struct OptimizeResult {
  double value = 0.0;
  MeasurementPlan planA, planB;
  long evals = 0;
  int best_start = -1;
};

inline double fold_angle(double a) {
  double f = std::fmod(a, M_PI);
  if (f < 0.0) f += M_PI;
  return f;
}

// Maximize the functional over analyzer wave-plate settings of both parties.
// Free parameters per setting are the input pair and early-port pair angles;
// the late-port pair never affects the binarized outcome groups used here and
// stays at zero. Multistart Nelder-Mead, deterministic in cfg.seed.
template <typename State>
OptimizeResult optimize_settings(const State& state, const BellFunctional& f,
                                 const OptimizerConfig& cfg = {}) {
  const OutcomeMode mode = f.nA == 2 && f.nB == 2 ? OutcomeMode::portA_vs_portB
                                                  : OutcomeMode::detector1_vs_rest;
  const int nA = f.nA, nB = f.nB;
  const int dim = 4 * (nA + nB);
  auto unpack = [&](const Eigen::VectorXd& x) {
    MeasurementPlan pa, pb;
    pa.mode = pb.mode = mode;
    pa.settings.resize(nA);
    pb.settings.resize(nB);
    for (int i = 0; i < nA; ++i) {
      pa.settings[i].hwp1 = x(4 * i + 0);
      pa.settings[i].qwp1 = x(4 * i + 1);
      pa.settings[i].hwp2 = x(4 * i + 2);
      pa.settings[i].qwp2 = x(4 * i + 3);
    }
    for (int j = 0; j < nB; ++j) {
      pb.settings[j].hwp1 = x(4 * nA + 4 * j + 0);
      pb.settings[j].qwp1 = x(4 * nA + 4 * j + 1);
      pb.settings[j].hwp2 = x(4 * nA + 4 * j + 2);
      pb.settings[j].qwp2 = x(4 * nA + 4 * j + 3);
    }
    return std::pair{pa, pb};
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    auto [pa, pb] = unpack(x);
    return -evaluate_on_state(f, state, pa, pb);
  };
  Rng master(cfg.seed);
  OptimizeResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < cfg.starts; ++s) {
    Rng rng = master.derive(s);
    Eigen::VectorXd x0(dim);
    for (int k = 0; k < dim; ++k) x0(k) = rng.uniform(0.0, M_PI);
    detail::NmState r =
        detail::nelder_mead_polished(objective, x0, cfg.tol, cfg.max_iters);
    best.evals += r.evals;
    if (-r.f > best.value) {
      best.value = -r.f;
      Eigen::VectorXd folded = r.x;
      for (int k = 0; k < dim; ++k) folded(k) = fold_angle(folded(k));
      auto [pa, pb] = unpack(folded);
      best.planA = pa;
      best.planB = pb;
      best.best_start = s;
    }
  }
  return best;
}

// Exact best value over local deterministic strategies. Outcome-1 indicators
// are enumerated for one party; the other party's indicators then decouple
// per setting and are chosen greedily.
inline double local_bound_bruteforce(const BellFunctional& f) {
  if (f.nA > 24) throw std::invalid_argument("local_bound_bruteforce: nA too large");
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << f.nA); ++mask) {
    double base = f.constant;
    for (int i = 0; i < f.nA; ++i)
      if (mask & (1u << i)) base += f.margA(i);
    for (int j = 0; j < f.nB; ++j) {
      double cj = f.margB(j);
      for (int i = 0; i < f.nA; ++i)
        if (mask & (1u << i)) cj += f.joint(i, j);
      if (cj > 0.0) base += cj;
    }
    best = std::max(best, base);
  }
  return best;
}

struct SeesawResult {
  double value = 0.0;
  int best_start = -1;
  std::vector<double> best_trace;  // iterate values of the winning start
};

namespace detail {

// Projector onto the leading eigenvectors of w, rank restricted to
// [1, d - 1] so both outcomes stay genuinely present. Among allowed ranks the
// trace objective picks the best; ties resolve to the lower rank, which
// matches the positive-eigenspace rank whenever that rank is allowed.
inline Mat best_projector(const Mat& w, int d) {
  Eigen::SelfAdjointEigenSolver<Mat> es((w + w.adjoint()) / 2.0);
  Eigen::VectorXd ev = es.eigenvalues();  // ascending
  int best_r = 1;
  double best_sum = ev(d - 1);
  double cum = best_sum;
  for (int r = 2; r <= d - 1; ++r) {
    cum += ev(d - r);
    if (cum > best_sum + 1e-15) {
      best_sum = cum;
      best_r = r;
    }
  }
  Mat p = Mat::Zero(d, d);
  for (int r = 0; r < best_r; ++r) {
    Vec v = es.eigenvectors().col(d - 1 - r);
    p += projector(v);
  }
  return p;
}

inline Mat random_projector(int d, Rng& rng) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = cx(rng.gauss(), rng.gauss());
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  int rank = 1 + static_cast<int>(rng.uniform() * (d - 1));
  if (rank > d - 1) rank = d - 1;
  Mat p = Mat::Zero(d, d);
  for (int r = 0; r < rank; ++r) p += projector(Vec(q.col(r)));
  return p;
}

}

// Alternating maximization of the functional over d-dimensional projective
// two-outcome measurements and a shared pure state. Each block update is the
// exact conditional optimum, so iterate values are monotone.
inline SeesawResult seesaw_bound(const BellFunctional& f, int d,
                                 const OptimizerConfig& cfg = {}) {
  if (d < 2) throw std::invalid_argument("seesaw_bound: dimension must be >= 2");
  const int nA = f.nA, nB = f.nB;
  Rng master(cfg.seed);
  SeesawResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < cfg.starts; ++s) {
    Rng rng = master.derive(s);
    std::vector<Mat> A(nA), B(nB);
    for (int i = 0; i < nA; ++i) A[i] = detail::random_projector(d, rng);
    for (int j = 0; j < nB; ++j) B[j] = detail::random_projector(d, rng);
    Vec psi(d * d);
    for (int k = 0; k < d * d; ++k) psi(k) = cx(rng.gauss(), rng.gauss());
    psi.normalize();
    auto bell_operator = [&]() {
      Mat w = Mat::Zero(d * d, d * d);
      Mat eye = Mat::Identity(d, d);
      for (int i = 0; i < nA; ++i)
        for (int j = 0; j < nB; ++j) w += f.joint(i, j) * kron(A[i], B[j]);
      for (int i = 0; i < nA; ++i) w += f.margA(i) * kron(A[i], eye);
      for (int j = 0; j < nB; ++j) w += f.margB(j) * kron(eye, B[j]);
      return w;
    };
    auto value = [&]() {
      return std::real(cx(psi.adjoint() * bell_operator() * psi)) + f.constant;
    };
    std::vector<double> trace;
    double cur = value();
    trace.push_back(cur);
    for (int it = 0; it < cfg.max_iters; ++it) {
      Mat psi_m(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) psi_m(a, b) = psi(a * d + b);
      for (int i = 0; i < nA; ++i) {
        Mat x = f.margA(i) * Mat::Identity(d, d);
        for (int j = 0; j < nB; ++j) x += f.joint(i, j) * B[j];
        Mat w = psi_m * x.transpose() * psi_m.adjoint();
        A[i] = detail::best_projector(w, d);
      }
      for (int j = 0; j < nB; ++j) {
        Mat x = f.margB(j) * Mat::Identity(d, d);
        for (int i = 0; i < nA; ++i) x += f.joint(i, j) * A[i];
        Mat w = psi_m.transpose() * x.transpose() * psi_m.conjugate();
        B[j] = detail::best_projector(w, d);
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(bell_operator());
      psi = es.eigenvectors().col(d * d - 1);
      double next = es.eigenvalues()(d * d - 1) + f.constant;
      trace.push_back(next);
      if (next - cur < cfg.tol) {
        cur = next;
        break;
      }
      cur = next;
    }
    if (cur > best.value) {
      best.value = cur;
      best.best_start = s;
      best.best_trace = trace;
    }
  }
  return best;
}

}
