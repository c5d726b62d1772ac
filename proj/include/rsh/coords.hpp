#pragma once

// Changes of variables on the reduced chart:
//   (Q,L) <-> (Q,p,lambda)   L = e^p b+ b+^dagger e^p,  lambda = b+^{-1} Q^{-1} b+ Q
//   (Q,L) <-> (Q,p,phi)      L = p - (R(Q) + 1/2)(phi)

#include "rsh/points.hpp"

namespace rsh {

namespace detail {

// e^{i(q_k - q_j)} - 1 = 2i e^{i theta/2} sin(theta/2), theta = q_k - q_j
inline cplx phase_minus_one(const TorusReg& Q, Eigen::Index j, Eigen::Index k,
                            const Config& cfg) {
  const double theta = Q.phases()(k) - Q.phases()(j);
  const double s = std::sin(0.5 * theta);
  if (!(2.0 * std::abs(s) > cfg.regularity_gap))
    throw regularity_error("solve_bplus: denominator below regularity_gap");
  return cplx(0.0, 2.0 * s) * std::polar(1.0, 0.5 * theta);
}

inline Mat unipotent_cleanup(Mat u) {
  u.diagonal().setOnes();
  u.triangularView<Eigen::StrictlyLower>().setZero();
  return u;
}

}  // namespace detail

// Unique b+ in B(n)_+ with b+ lambda = Q^{-1} b+ Q, filled one superdiagonal at a time.
inline UnipotentUpper solve_bplus(const TorusReg& Q, const UnipotentUpper& lambda,
                                  const Config& cfg = {}) {
  const auto n = Q.dim();
  if (lambda.dim() != n) throw dimension_error("solve_bplus: dimension mismatch");
  const Mat& lam = lambda.matrix();
  Mat b = Mat::Identity(n, n);
  for (Eigen::Index d = 1; d < n; ++d) {
    for (Eigen::Index j = 0; j + d < n; ++j) {
      const Eigen::Index k = j + d;
      cplx acc = 0.0;
      for (Eigen::Index m = j; m < k; ++m) acc += b(j, m) * lam(m, k);
      b(j, k) = acc / detail::phase_minus_one(Q, j, k, cfg);
    }
  }
  return UnipotentUpper(std::move(b));
}

inline double bplus_residual(const TorusReg& Q, const UnipotentUpper& lambda,
                             const UnipotentUpper& bplus) {
  const Mat& b = bplus.matrix();
  return (b * lambda.matrix() - Q.inverse() * b * Q.matrix()).norm();
}

struct RSFactors {
  BorelUpper b;
  RVec p;
  UnipotentUpper bplus;
};

// L = b b^dagger, b = e^p b+.
inline RSFactors rs_factors(const HermitianMat& L, const Config& cfg = {}) {
  BorelUpper b = chol_upper(L, cfg);
  const auto n = b.dim();
  RVec p(n);
  Mat bplus = b.matrix();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = b.matrix()(j, j).real();
    p(j) = std::log(d);
    bplus.row(j) /= d;
  }
  return {std::move(b), std::move(p), UnipotentUpper(detail::unipotent_cleanup(std::move(bplus)))};
}

inline RSPoint to_rs(const RedPoint& x, const Config& cfg = {}) {
  RSFactors f = rs_factors(x.L, cfg);
  const Mat& bp = f.bplus.matrix();
  Mat lambda = f.bplus.inverse() * x.Q.inverse() * bp * x.Q.matrix();
  return RSPoint(x.Q, std::move(f.p), UnipotentUpper(detail::unipotent_cleanup(std::move(lambda))));
}

inline RedPoint from_rs(const RSPoint& x, const Config& cfg = {}) {
  const UnipotentUpper bplus = solve_bplus(x.Q, x.lambda, cfg);
  const RVec ep = x.p.array().exp();
  const Mat b = ep.cast<cplx>().asDiagonal() * bplus.matrix();
  return RedPoint(x.Q, HermitianMat(b * b.adjoint()));
}

// Multiplier of -(R(Q) + 1/2) on E_jk: -w/(w-1), w = e^{i(q_j-q_k)}.
inline cplx suth_multiplier(const TorusReg& Q, Eigen::Index j, Eigen::Index k,
                            const Config& cfg = {}) {
  return -(0.5 + r_multiplier(Q, j, k, cfg));
}

inline RedPoint from_suth(const SuthPoint& x, const Config& cfg = {}) {
  const auto n = x.dim();
  Mat L = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    L(j, j) = x.p(j);
    for (Eigen::Index k = j + 1; k < n; ++k) {
      L(j, k) = suth_multiplier(x.Q, j, k, cfg) * x.phi(j, k);
      L(k, j) = std::conj(L(j, k));
    }
  }
  return RedPoint(x.Q, HermitianMat(L));
}

inline SuthPoint to_suth(const RedPoint& x, const Config& cfg = {}) {
  const auto n = x.dim();
  const Mat& L = x.L.matrix();
  RVec p(n);
  Mat phi = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    p(j) = L(j, j).real();
    for (Eigen::Index k = j + 1; k < n; ++k) {
      phi(j, k) = L(j, k) / suth_multiplier(x.Q, j, k, cfg);
      phi(k, j) = std::conj(phi(j, k));
    }
  }
  return SuthPoint(x.Q, std::move(p), phi);
}

}  // namespace rsh
