#pragma once

// Deterministic random points per (chart, n, seed).

#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/QR>

#include "rsh/points.hpp"

namespace rsh {

struct SampleOptions {
  double min_gap = 1e-6;       // required min |e^{iq_j} - e^{iq_k}|
  int max_redraws = 10000;
  double p_sigma = 0.5;        // std of momenta
  double lambda_sigma = 0.5;   // std of real/imag parts of lambda's strict upper entries
  double phi_sigma = 1.0;      // std of real/imag parts of phi's off-diagonal entries
};

class sampler_error : public error {
 public:
  using error::error;
};

namespace detail {

inline std::mt19937_64 make_rng(ChartKind chart, Eigen::Index n, std::uint64_t seed) {
  std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32),
                    std::uint32_t(n), std::uint32_t(chart) + 17u};
  return std::mt19937_64(seq);
}

// Complex Gaussian matrix with E|z|^2 = 1.
inline Mat ginibre(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Mat z(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) z(j, k) = cplx(normal(rng), normal(rng));
  return z;
}

inline Mat gaussian_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  const Mat a = ginibre(n, rng);
  return 0.5 * (a + a.adjoint());
}

// Haar measure: QR of a Ginibre matrix with R's diagonal phases absorbed.
inline Mat haar_unitary(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Mat> qr(ginibre(n, rng));
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

inline TorusReg regular_torus(Eigen::Index n, std::mt19937_64& rng, const SampleOptions& opts,
                              std::uint64_t seed) {
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  for (int attempt = 0; attempt < opts.max_redraws; ++attempt) {
    RVec q(n);
    for (Eigen::Index j = 0; j < n; ++j) q(j) = uniform(rng);
    if (TorusReg::gap_of(q) > opts.min_gap) return TorusReg(std::move(q), Config{0.0, 0.0, false});
  }
  throw sampler_error("sample_point: regularity re-draw budget exceeded for seed " +
                      std::to_string(seed));
}

inline RVec gaussian_vector(Eigen::Index n, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, sigma);
  RVec v(n);
  for (Eigen::Index j = 0; j < n; ++j) v(j) = normal(rng);
  return v;
}

inline void require_n(Eigen::Index n) {
  if (n < 2) throw dimension_error("sample_point: n must be >= 2");
}

}  // namespace detail

template <class Point>
Point sample_point(Eigen::Index n, std::uint64_t seed, const SampleOptions& opts = {});

template <>
inline FullPoint sample_point<FullPoint>(Eigen::Index n, std::uint64_t seed, const SampleOptions&) {
  detail::require_n(n);
  auto rng = detail::make_rng(ChartKind::full, n, seed);
  Mat g = detail::haar_unitary(n, rng);
  Mat L = detail::gaussian_hermitian(n, rng);
  return FullPoint(UnitaryMat(std::move(g)), HermitianMat(L));
}

template <>
inline RedPoint sample_point<RedPoint>(Eigen::Index n, std::uint64_t seed,
                                       const SampleOptions& opts) {
  detail::require_n(n);
  auto rng = detail::make_rng(ChartKind::red, n, seed);
  TorusReg Q = detail::regular_torus(n, rng, opts, seed);
  return RedPoint(std::move(Q), HermitianMat(detail::gaussian_hermitian(n, rng)));
}

template <>
inline RSPoint sample_point<RSPoint>(Eigen::Index n, std::uint64_t seed,
                                     const SampleOptions& opts) {
  detail::require_n(n);
  auto rng = detail::make_rng(ChartKind::rs, n, seed);
  TorusReg Q = detail::regular_torus(n, rng, opts, seed);
  RVec p = detail::gaussian_vector(n, opts.p_sigma, rng);
  std::normal_distribution<double> normal(0.0, opts.lambda_sigma);
  Mat lam = Mat::Identity(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) lam(j, k) = cplx(normal(rng), normal(rng));
  return RSPoint(std::move(Q), std::move(p), UnipotentUpper(std::move(lam)));
}

template <>
inline SuthPoint sample_point<SuthPoint>(Eigen::Index n, std::uint64_t seed,
                                         const SampleOptions& opts) {
  detail::require_n(n);
  auto rng = detail::make_rng(ChartKind::suth, n, seed);
  TorusReg Q = detail::regular_torus(n, rng, opts, seed);
  RVec p = detail::gaussian_vector(n, opts.p_sigma, rng);
  std::normal_distribution<double> normal(0.0, opts.phi_sigma);
  Mat phi = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      phi(j, k) = cplx(normal(rng), normal(rng));
      phi(k, j) = std::conj(phi(j, k));
    }
  return SuthPoint(std::move(Q), std::move(p), phi);
}

// Random element of U(n), for conjugation tests.
inline Mat sample_unitary(Eigen::Index n, std::uint64_t seed) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(n), 99u};
  std::mt19937_64 rng(seq);
  return detail::haar_unitary(n, rng);
}

}  // namespace rsh
