#include <gtest/gtest.h>

#include "rsh/oracles.hpp"
#include "support.hpp"

using namespace rsh;
using namespace rsh::test;

TEST(Pairing, Examples) {
  EXPECT_DOUBLE_EQ(pairing(I * Mat::Identity(2, 2), Mat::Identity(2, 2)), 2.0);
  EXPECT_DOUBLE_EQ(pairing(E(2, 0, 1), E(2, 1, 0)), 0.0);
  EXPECT_DOUBLE_EQ(pairing(I * E(2, 0, 1), E(2, 1, 0)), 1.0);
}

TEST(Pairing, DimensionMismatchThrows) {
  EXPECT_THROW(pairing(Mat::Identity(2, 2), Mat::Identity(3, 3)), dimension_error);
}

TEST(Pairing, UAndBAreIsotropic) {
  auto rng = rng_for(1);
  for (int t = 0; t < 20; ++t) {
    const Mat x = random_matrix(4, rng), y = random_matrix(4, rng);
    const auto sx = split_ub(x), sy = split_ub(y);
    EXPECT_NEAR(pairing(sx.u, sy.u), 0.0, 1e-12);
    EXPECT_NEAR(pairing(sx.b, sy.b), 0.0, 1e-12);
  }
}

TEST(SplitUb, Examples) {
  const auto a = split_ub(E(2, 0, 1));
  EXPECT_LE(a.u.norm(), 1e-15);
  EXPECT_LE((a.b - E(2, 0, 1)).norm(), 1e-15);

  const auto b = split_ub(I * Mat::Identity(2, 2));
  EXPECT_LE((b.u - I * Mat::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LE(b.b.norm(), 1e-15);

  const auto c = split_ub(E(2, 1, 0));
  EXPECT_LE((c.u - (E(2, 1, 0) - E(2, 0, 1))).norm(), 1e-15);
  EXPECT_LE((c.b - E(2, 0, 1)).norm(), 1e-15);
  EXPECT_TRUE(is_member(c.u, Subspace::u_n));
  EXPECT_TRUE(is_member(c.b, Subspace::b_n));
}

TEST(SplitUb, ProjectionPair) {
  auto rng = rng_for(2);
  for (int n = 2; n <= 5; ++n) {
    const Mat x = random_matrix(n, rng);
    const auto s = split_ub(x);
    EXPECT_LE((s.u + s.b - x).norm(), 1e-14);
    EXPECT_TRUE(is_member(s.u, Subspace::u_n));
    EXPECT_TRUE(is_member(s.b, Subspace::b_n));
    EXPECT_LE((split_ub(s.u).u - s.u).norm(), 1e-14);
    EXPECT_LE(split_ub(s.u).b.norm(), 1e-14);
    EXPECT_LE((split_ub(s.b).b - s.b).norm(), 1e-14);
    EXPECT_LE(split_ub(s.b).u.norm(), 1e-14);
  }
}

TEST(SplitGrade, Examples) {
  const Mat d = Mat(RVec::LinSpaced(2, 3.0, 4.0).cast<cplx>().asDiagonal());
  const auto a = split_grade(d);
  EXPECT_LE(a.plus.norm() + a.minus.norm(), 0.0);
  EXPECT_LE((a.zero - d).norm(), 0.0);
  const auto b = split_grade(E(2, 0, 1) + E(2, 1, 0));
  EXPECT_LE((b.plus - E(2, 0, 1)).norm(), 0.0);
  EXPECT_LE(b.zero.norm(), 0.0);
  EXPECT_LE((b.minus - E(2, 1, 0)).norm(), 0.0);
}

TEST(ProjectSpecial, Examples) {
  Mat x = Mat::Zero(2, 2);
  x(0, 0) = cplx(1, 2);
  x(1, 1) = 3.0;
  Mat want = Mat::Zero(2, 2);
  want(0, 0) = cplx(0, 2);
  EXPECT_LE((project_special(x, SpecialPart::im_diag) - want).norm(), 0.0);
  want.setZero();
  want(0, 0) = 1.0;
  want(1, 1) = 3.0;
  EXPECT_LE((project_special(x, SpecialPart::real_diag) - want).norm(), 0.0);
  EXPECT_LE(project_special(E(3, 0, 2), SpecialPart::im_diag).norm(), 0.0);
}

TEST(Subspaces, EnforceProjectsOrThrows) {
  const Mat x = E(2, 1, 0);
  EXPECT_TRUE(is_member(enforce(x, Subspace::herm), Subspace::herm));
  EXPECT_THROW(enforce(x, Subspace::herm, true), subspace_error);
  EXPECT_NO_THROW(enforce(E(2, 0, 1), Subspace::b_plus, true));
}

TEST(Types, Validation) {
  EXPECT_THROW(UnitaryMat(2.0 * Mat::Identity(2, 2)), invariant_error);
  RVec q(2);
  q << 1.0, 1.0;
  EXPECT_THROW(TorusReg{q}, regularity_error);
  EXPECT_THROW(UnipotentUpper(E(2, 1, 0) + Mat::Identity(2, 2)), invariant_error);
  const HermitianMat h(E(2, 0, 1));
  EXPECT_LE((h.matrix() - h.matrix().adjoint()).norm(), 0.0);
  EXPECT_THROW(HermitianMat(E(2, 0, 1), true), subspace_error);
}

TEST(RMatrix, Examples) {
  RVec q(2);
  q << 0.4, 2.1;
  const TorusReg Q(q);
  EXPECT_LE(r_apply(Q, Mat(Mat::Identity(2, 2) * cplx(1.5, -0.5))).norm(), 0.0);
  const Mat r = r_apply(Q, E(2, 0, 1));
  const cplx want = -0.5 * I / std::tan(0.5 * (q(0) - q(1)));
  EXPECT_NEAR(std::abs(r(0, 1) - want), 0.0, 1e-15);
  EXPECT_EQ(r(1, 0), cplx(0.0));
}

TEST(RMatrix, Antisymmetric) {
  auto rng = rng_for(3);
  for (int n = 2; n <= 5; ++n) {
    const TorusReg Q = random_torus(n, rng);
    const Mat x = random_matrix(n, rng), y = random_matrix(n, rng);
    EXPECT_LE(std::abs(pairing(r_apply(Q, x), y) + pairing(x, r_apply(Q, y))),
              1e-12 * x.norm() * y.norm());
  }
}

TEST(RMatrix, MatchesDenseOperatorOracle) {
  auto rng = rng_for(4);
  for (int n = 2; n <= 5; ++n) {
    const TorusReg Q = random_torus(n, rng);
    const Mat x = random_matrix(n, rng);
    const Mat want = oracle::dense_r_apply(Q.matrix(), x);
    EXPECT_LE((r_apply(Q, x) - want).norm(), 1e-12 * (1.0 + want.norm())) << "n=" << n;
  }
}

TEST(RMatrix, RegularityError) {
  RVec q(2);
  q << 0.0, 1e-9;
  const TorusReg Q(q, Config{0.0});
  EXPECT_THROW(r_apply(Q, E(2, 0, 1)), regularity_error);
}

TEST(RBracket, Examples) {
  auto rng = rng_for(5);
  const TorusReg Q = random_torus(3, rng);
  const Mat x = random_matrix(3, rng);
  EXPECT_LE(r_bracket(Q, x, x).norm(), 1e-13);
  const Mat d1 = Mat(random_matrix(3, rng).diagonal().asDiagonal());
  const Mat d2 = Mat(random_matrix(3, rng).diagonal().asDiagonal());
  EXPECT_LE(r_bracket(Q, d1, d2).norm(), 1e-14);
}

TEST(Cholesky, Examples) {
  EXPECT_LE((chol_upper(HermitianMat(Mat::Identity(3, 3))).matrix() - Mat::Identity(3, 3)).norm(),
            1e-15);
  Mat a(2, 2);
  a << 2.0, 1.0, 1.0, 1.0;
  Mat wa(2, 2);
  wa << 1.0, 1.0, 0.0, 1.0;
  EXPECT_LE((chol_upper(HermitianMat(a)).matrix() - wa).norm(), 1e-14);
  Mat b(2, 2);
  b << 1.0, I, -I, 2.0;
  Mat wb(2, 2);
  wb << 1.0 / std::sqrt(2.0), I / std::sqrt(2.0), 0.0, std::sqrt(2.0);
  const Mat got = chol_upper(HermitianMat(b)).matrix();
  EXPECT_LE((got - wb).norm(), 1e-14);
  EXPECT_LE((got * got.adjoint() - b).norm(), 1e-14);
}

TEST(Cholesky, UniqueAndRejectsIndefinite) {
  auto rng = rng_for(6);
  for (int n = 2; n <= 5; ++n) {
    const Mat l = random_pd(n, rng);
    const Mat b = chol_upper(HermitianMat(l)).matrix();
    EXPECT_LE((b * b.adjoint() - l).norm(), 1e-12 * l.norm());
    const Mat b2 = chol_upper(HermitianMat(b * b.adjoint())).matrix();
    EXPECT_LE((b2 - b).norm(), 1e-12 * b.norm());
    EXPECT_TRUE(is_member(b, Subspace::b_n));
  }
  Mat m = Mat::Identity(2, 2);
  m(1, 1) = -1.0;
  EXPECT_THROW(chol_upper(HermitianMat(m)), not_positive_definite);
}

TEST(DualBasis, Examples) {
  EXPECT_DOUBLE_EQ(pairing(I * E(3, 1, 1), E(3, 1, 1)), 1.0);
  EXPECT_DOUBLE_EQ(pairing(E(3, 0, 2) - E(3, 2, 0), -I * E(3, 0, 2)), 1.0);
}

TEST(DualBasis, GramIsIdentity) {
  for (auto pair : {SpacePair::u_b, SpacePair::u0_b0, SpacePair::uperp_bplus, SpacePair::u_herm,
                    SpacePair::u0_herm0, SpacePair::uperp_hermperp})
    for (int n = 2; n <= 4; ++n) {
      const auto basis = dual_basis(pair, n);
      ASSERT_EQ(basis.size(), dual_basis_size(pair, n));
      for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = 0; b < basis.size(); ++b)
          EXPECT_NEAR(pairing(basis[a].basis, basis[b].dual), a == b ? 1.0 : 0.0, 1e-14);
    }
}

TEST(DualBasis, SpansStatedSubspaces) {
  for (int n = 2; n <= 4; ++n) {
    for (const auto& e : dual_basis(SpacePair::u_b, n)) {
      EXPECT_TRUE(is_member(e.basis, Subspace::u_n));
      EXPECT_TRUE(is_member(e.dual, Subspace::b_n));
    }
    for (const auto& e : dual_basis(SpacePair::uperp_hermperp, n)) {
      EXPECT_TRUE(is_member(e.basis, Subspace::u_perp));
      EXPECT_TRUE(is_member(e.dual, Subspace::herm_perp));
    }
    for (const auto& e : dual_basis(SpacePair::uperp_bplus, n))
      EXPECT_TRUE(is_member(e.dual, Subspace::b_plus));
  }
  EXPECT_EQ(dual_basis_size(SpacePair::u_b, 3), 9u);
  EXPECT_EQ(dual_basis_size(SpacePair::uperp_bplus, 3), 6u);
}

TEST(Exponentials, SkewAndNilpotent) {
  auto rng = rng_for(7);
  const Mat x = random_skew(4, rng);
  const Mat u = expm_skew(x);
  EXPECT_LE(UnitaryMat::unitarity_defect(u), 1e-13);
  Mat series = Mat::Identity(4, 4), term = Mat::Identity(4, 4);
  for (int k = 1; k < 40; ++k) {
    term = term * x / double(k);
    series += term;
  }
  EXPECT_LE((u - series).norm(), 1e-12);

  Mat nil = Mat::Zero(3, 3);
  nil(0, 1) = 2.0;
  nil(1, 2) = cplx(0, 1);
  nil(0, 2) = 1.0;
  const Mat e = exp_nilpotent(nil);
  EXPECT_LE((e - (Mat::Identity(3, 3) + nil + 0.5 * nil * nil)).norm(), 1e-15);
}
