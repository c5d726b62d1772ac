#pragma once

#include <random>

#include "rsh/harness.hpp"

namespace rsh::test {

inline std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed * 7919 + 11); }

inline Mat random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Mat x(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) x(j, k) = cplx(d(rng), d(rng));
  return x;
}

inline Mat random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  const Mat a = random_matrix(n, rng);
  return 0.5 * (a + a.adjoint());
}

inline Mat random_skew(Eigen::Index n, std::mt19937_64& rng) {
  const Mat a = random_matrix(n, rng);
  return 0.5 * (a - a.adjoint());
}

inline Mat random_pd(Eigen::Index n, std::mt19937_64& rng) {
  const Mat a = random_matrix(n, rng);
  return a * a.adjoint() + 0.5 * Mat::Identity(n, n);
}

inline TorusReg random_torus(Eigen::Index n, std::mt19937_64& rng, double min_gap = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (;;) {
    RVec q(n);
    for (Eigen::Index j = 0; j < n; ++j) q(j) = u(rng);
    if (TorusReg::gap_of(q) > min_gap) return TorusReg(q);
  }
}

inline double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

inline Mat E(Eigen::Index n, Eigen::Index j, Eigen::Index k) { return unit_matrix(n, j, k); }

const cplx I{0.0, 1.0};

}  // namespace rsh::test
