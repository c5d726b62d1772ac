#pragma once

// Independent reference computations used to cross-check the closed-form
// paths: dense operator inversion for R(Q) and a generic RK4 integrator for
// the free flow. Nothing here calls the routines it checks.

#include "rsh/algebra.hpp"

namespace rsh::oracle {

// R(Q) built as a dense operator on the n^2 - n off-diagonal coordinates:
// (1/2)(Ad_Q + id) (Ad_Q - id)^{-1}, with Ad_Q assembled column by column.
inline Mat dense_r_apply(const Mat& Q, const Mat& x) {
  const auto n = Q.rows();
  std::vector<std::pair<Eigen::Index, Eigen::Index>> slots;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (j != k) slots.emplace_back(j, k);
  const auto m = static_cast<Eigen::Index>(slots.size());
  const Mat qinv = Q.inverse();
  Mat ad(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const Mat e = unit_matrix(n, slots[std::size_t(c)].first, slots[std::size_t(c)].second);
    const Mat img = Q * e * qinv;
    for (Eigen::Index r = 0; r < m; ++r) ad(r, c) = img(slots[std::size_t(r)].first, slots[std::size_t(r)].second);
  }
  const Mat id = Mat::Identity(m, m);
  const Mat op = 0.5 * (ad + id) * (ad - id).inverse();
  Eigen::VectorXcd v(m);
  for (Eigen::Index r = 0; r < m; ++r) v(r) = x(slots[std::size_t(r)].first, slots[std::size_t(r)].second);
  const Eigen::VectorXcd w = op * v;
  Mat out = Mat::Zero(n, n);
  for (Eigen::Index r = 0; r < m; ++r) out(slots[std::size_t(r)].first, slots[std::size_t(r)].second) = w(r);
  return out;
}

// Classical RK4 for g' = i L^k g on [0, t].
inline Mat rk4_flow(const Mat& g0, const Mat& L, int k, double t, int steps) {
  Mat a = Mat::Identity(L.rows(), L.cols());
  for (int i = 0; i < k; ++i) a = a * L;
  a *= cplx(0.0, 1.0);
  const double h = t / steps;
  Mat g = g0;
  for (int s = 0; s < steps; ++s) {
    const Mat k1 = a * g;
    const Mat k2 = a * (g + 0.5 * h * k1);
    const Mat k3 = a * (g + 0.5 * h * k2);
    const Mat k4 = a * (g + h * k3);
    g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return g;
}

}  // namespace rsh::oracle
