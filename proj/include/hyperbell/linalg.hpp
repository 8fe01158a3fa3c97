#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace hyperbell {

using cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline Mat projector(const Vec& v) { return v * v.adjoint(); }

// Trace out one party of a bipartite operator on C^dA (x) C^dB.
// keep = 0 returns the dA x dA reduction, keep = 1 the dB x dB one.
inline Mat partial_trace(const Mat& rho, int keep, int dA, int dB) {
  if (rho.rows() != dA * dB || rho.cols() != dA * dB)
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (keep == 0) {
    Mat out = Mat::Zero(dA, dA);
    for (int a = 0; a < dA; ++a)
      for (int b = 0; b < dA; ++b)
        for (int j = 0; j < dB; ++j)
          out(a, b) += rho(a * dB + j, b * dB + j);
    return out;
  }
  if (keep == 1) {
    Mat out = Mat::Zero(dB, dB);
    for (int j = 0; j < dB; ++j)
      for (int k = 0; k < dB; ++k)
        for (int a = 0; a < dA; ++a)
          out(j, k) += rho(a * dB + j, a * dB + k);
    return out;
  }
  throw std::invalid_argument("partial_trace: keep must be 0 or 1");
}

inline bool is_hermitian(const Mat& m, double tol = 1e-10) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}
