#include <gtest/gtest.h>

#include "support.hpp"

using namespace rsh;
using namespace rsh::test;

namespace {

TorusReg torus2(double q1, double q2) {
  RVec q(2);
  q << q1, q2;
  return TorusReg(q);
}

}  // namespace

TEST(ToRs, IdentityL) {
  auto rng = rng_for(1);
  const RedPoint y(random_torus(3, rng), HermitianMat(Mat::Identity(3, 3)));
  const RSPoint x = to_rs(y);
  EXPECT_LE(x.p.norm(), 1e-15);
  EXPECT_LE((x.lambda.matrix() - Mat::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LE((rs_factors(y.L).bplus.matrix() - Mat::Identity(3, 3)).norm(), 1e-15);
}

TEST(ToRs, TwoByTwoExample) {
  const double q1 = 0.3, q2 = 1.9;
  Mat l(2, 2);
  l << 2.0, 1.0, 1.0, 1.0;
  const RedPoint y(torus2(q1, q2), HermitianMat(l));
  const RSFactors f = rs_factors(y.L);
  EXPECT_LE(f.p.norm(), 1e-15);
  Mat bp(2, 2);
  bp << 1.0, 1.0, 0.0, 1.0;
  EXPECT_LE((f.bplus.matrix() - bp).norm(), 1e-15);
  const RSPoint x = to_rs(y);
  EXPECT_NEAR(std::abs(x.lambda.matrix()(0, 1) - (std::polar(1.0, q2 - q1) - 1.0)), 0.0, 1e-15);
}

TEST(ToRs, RequiresPositiveDefinite) {
  Mat l = Mat::Identity(2, 2);
  l(1, 1) = -0.5;
  EXPECT_THROW(to_rs(RedPoint(torus2(0.0, 2.0), HermitianMat(l))), not_positive_definite);
}

TEST(SolveBplus, Examples) {
  auto rng = rng_for(2);
  const TorusReg Q = random_torus(4, rng);
  EXPECT_LE((solve_bplus(Q, UnipotentUpper::identity(4)).matrix() - Mat::Identity(4, 4)).norm(),
            1e-15);

  const double q1 = 0.7, q2 = 2.6;
  Mat lam = Mat::Identity(2, 2);
  lam(0, 1) = cplx(0.4, -1.1);
  const UnipotentUpper b = solve_bplus(torus2(q1, q2), UnipotentUpper(lam));
  const cplx want = lam(0, 1) / (std::polar(1.0, q2 - q1) - 1.0);
  EXPECT_NEAR(std::abs(b.matrix()(0, 1) - want), 0.0, 1e-15);
  // defining relation b+ lambda = Q^-1 b+ Q, checked directly
  const Mat Qm = torus2(q1, q2).matrix();
  EXPECT_LE((b.matrix() * lam - Qm.adjoint() * b.matrix() * Qm).norm(), 1e-15);
}

TEST(SolveBplus, ResidualAndUniqueness) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const RSPoint x = sample_point<RSPoint>(4, s, SampleOptions{0.1});
    const UnipotentUpper b = solve_bplus(x.Q, x.lambda);
    EXPECT_LE(bplus_residual(x.Q, x.lambda, b), 1e-12 * b.matrix().norm());
    Mat moved = b.matrix();
    moved(1, 3) += 1e-6;
    EXPECT_GT(bplus_residual(x.Q, x.lambda, UnipotentUpper(moved)), 1e-8);
  }
}

TEST(SolveBplus, RegularityIsAnError) {
  Mat lam = Mat::Identity(2, 2);
  lam(0, 1) = 1.0;
  RVec q(2);
  q << 1.0, 1.0 + 1e-9;
  EXPECT_THROW(solve_bplus(TorusReg(q, Config{0.0}), UnipotentUpper(lam)), regularity_error);
}

TEST(FromRs, Examples) {
  auto rng = rng_for(3);
  const TorusReg Q = random_torus(3, rng);
  const RedPoint y = from_rs(RSPoint(Q, RVec::Zero(3), UnipotentUpper::identity(3)));
  EXPECT_LE((y.L.matrix() - Mat::Identity(3, 3)).norm(), 1e-15);

  const RSPoint x = sample_point<RSPoint>(4, 5);
  const RedPoint z = from_rs(x);
  EXPECT_GT(min_eigenvalue(z.L), 0.0);
  const Mat bp = solve_bplus(x.Q, x.lambda).matrix();
  double tr = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i) tr += std::exp(2 * x.p(i)) * (bp * bp.adjoint())(i, i).real();
  EXPECT_NEAR(z.L.matrix().trace().real(), tr, 1e-12 * tr);
}

TEST(RsChart, RoundTrips) {
  for (int n = 2; n <= 5; ++n)
    for (std::uint64_t s = 0; s < 100; ++s) {
      const RSPoint x = sample_point<RSPoint>(n, s, SampleOptions{0.1});
      const RSPoint x2 = to_rs(from_rs(x));
      const double scale = 1 + x.p.norm() + x.lambda.matrix().norm();
      EXPECT_LE((x2.p - x.p).norm() + (x2.lambda.matrix() - x.lambda.matrix()).norm(), 1e-12 * scale)
          << "n=" << n << " seed=" << s;
    }
  auto rng = rng_for(4);
  for (int n = 2; n <= 5; ++n) {
    const RedPoint y(random_torus(n, rng), HermitianMat(random_pd(n, rng)));
    const RedPoint y2 = from_rs(to_rs(y));
    EXPECT_LE((y2.L.matrix() - y.L.matrix()).norm(), 1e-12 * y.L.matrix().norm());
  }
}

TEST(RsChart, TorusEquivariance) {
  auto rng = rng_for(5);
  const RedPoint y(random_torus(3, rng), HermitianMat(random_pd(3, rng)));
  RVec t(3);
  t << 0.4, -1.2, 2.0;
  const Mat tau = TorusReg(t, Config{0.0}).matrix();
  const RSPoint a = to_rs(y);
  const RSPoint b = to_rs(RedPoint(y.Q, HermitianMat(tau * y.L.matrix() * tau.adjoint())));
  EXPECT_LE((b.p - a.p).norm(), 1e-13);
  EXPECT_LE((b.lambda.matrix() - tau * a.lambda.matrix() * tau.adjoint()).norm(), 1e-12);
}

TEST(FromSuth, Examples) {
  auto rng = rng_for(6);
  const TorusReg Q = random_torus(3, rng);
  RVec p(3);
  p << 0.5, -1.0, 2.0;
  const RedPoint y = from_suth(SuthPoint(Q, p, Mat::Zero(3, 3)));
  EXPECT_LE((y.L.matrix() - diag_matrix(p)).norm(), 0.0);

  Mat phi = E(2, 0, 1) + E(2, 1, 0);
  const RedPoint z = from_suth(SuthPoint(torus2(std::numbers::pi, 0.0), RVec::Zero(2), phi));
  EXPECT_NEAR(std::abs(z.L.matrix()(0, 1) - cplx(-0.5)), 0.0, 1e-15);

  const SuthPoint s = sample_point<SuthPoint>(4, 7);
  const RedPoint w = from_suth(s);
  EXPECT_NEAR(0.5 * w.L.matrix().squaredNorm(), h_suth2(s), 1e-12 * h_suth2(s));
  EXPECT_LE((w.L.matrix() - w.L.matrix().adjoint()).norm(), 1e-13);
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_EQ(w.L.matrix()(j, j), cplx(s.p(j)));
}

TEST(FromSuth, MultiplierIsConjugateSymmetric) {
  auto rng = rng_for(8);
  const TorusReg Q = random_torus(4, rng);
  for (Eigen::Index j = 0; j < 4; ++j)
    for (Eigen::Index k = 0; k < 4; ++k)
      if (j != k) EXPECT_NEAR(std::abs(suth_multiplier(Q, k, j) - std::conj(suth_multiplier(Q, j, k))), 0.0, 1e-15);
}

TEST(ToSuth, Examples) {
  auto rng = rng_for(9);
  RVec d(3);
  d << 1.0, 2.0, -3.0;
  const SuthPoint s = to_suth(RedPoint(random_torus(3, rng), HermitianMat(diag_matrix(d))));
  EXPECT_LE(s.phi.norm(), 0.0);
  EXPECT_LE((s.p - d).norm(), 0.0);
}

TEST(SuthChart, RoundTrips) {
  for (int n = 2; n <= 5; ++n)
    for (std::uint64_t s = 0; s < 100; ++s) {
      const SuthPoint x = sample_point<SuthPoint>(n, s, SampleOptions{0.1});
      const SuthPoint x2 = to_suth(from_suth(x));
      EXPECT_LE((x2.p - x.p).norm() + (x2.phi - x.phi).norm(), 1e-12 * (1 + x.p.norm() + x.phi.norm()));
      EXPECT_TRUE(is_member(x2.phi, Subspace::herm_perp));
      const RedPoint y = sample_point<RedPoint>(n, s, SampleOptions{0.1});
      const RedPoint y2 = from_suth(to_suth(y));
      EXPECT_LE((y2.L.matrix() - y.L.matrix()).norm(), 1e-12 * (1 + y.L.matrix().norm()));
    }
}
