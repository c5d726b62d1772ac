#include <gtest/gtest.h>

#include "support.hpp"

using namespace rsh;
using namespace rsh::test;

namespace {

// Directional derivative d/dt f(x(t)) by a 4-point central stencil along one
// chart direction, independent of the library's gradient assembly.
template <class Point>
double directional(const Observable<Point>& f, const Point& x, std::size_t dir, double h) {
  using T = chart_traits<Point>;
  return (-f(T::displace(x, dir, 2 * h)) + 8 * f(T::displace(x, dir, h)) -
          8 * f(T::displace(x, dir, -h)) + f(T::displace(x, dir, -2 * h))) /
         (12 * h);
}

double grad_norm(const FullGradient& g) { return norm(g); }

}  // namespace

TEST(GradFull, FreeHamiltonian) {
  const auto x = sample_point<FullPoint>(3, 1);
  for (int k = 1; k <= 4; ++k) {
    const auto g = grad_full(free_hamiltonian(k).full, x);
    Mat want = Mat::Identity(3, 3);
    for (int i = 1; i < k; ++i) want = want * x.L.matrix();
    EXPECT_LE((g.d2 - I * want).norm(), 1e-12 * (1 + want.norm()));
    EXPECT_LE(g.D1.norm() + g.D1p.norm(), 1e-14);
    const auto fd = grad_full(free_hamiltonian(k).full, x, DiffOptions{false});
    EXPECT_LE(norm(fd - g), 5e-6 * (1 + norm(g)));
  }
}

TEST(GradFull, ConstantObservable) {
  const Observable<FullPoint> c{"c", [](const FullPoint&) { return 4.0; }, {}};
  const auto g = grad_full(c, sample_point<FullPoint>(3, 2));
  EXPECT_EQ(norm(g), 0.0);
}

TEST(GradFull, DefiningIdentityAlongDirections) {
  const auto x = sample_point<FullPoint>(3, 3);
  const auto F = trace_monomial(2, 2, Part::re);
  const auto g = grad_full(F, x, DiffOptions{false});
  const std::size_t m = chart_traits<FullPoint>::direction_count(x);
  const std::size_t block = dual_basis_size(SpacePair::u_b, 3);
  const double scale = 1 + std::abs(F(x)) + grad_norm(g);
  for (std::size_t a = 0; a < m; a += m / 20 + 1) {
    const double want = directional(F, x, a, 1e-3);
    double got;
    if (a < block) {
      got = pairing(g.D1, dual_element(SpacePair::u_b, 3, a).basis);
    } else if (a < 2 * block) {
      got = pairing(g.D1p, dual_element(SpacePair::u_b, 3, a - block).basis);
    } else {
      got = pairing(dual_element(SpacePair::u_herm, 3, a - 2 * block).dual, g.d2);
    }
    EXPECT_LE(std::abs(got - want), 5e-6 * scale) << "direction " << a;
  }
}

TEST(GradFull, AnalyticMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = sample_point<FullPoint>(3, s);
    for (auto [m, k, p] : {std::tuple{1, 1, Part::re}, {2, 3, Part::im}, {3, 0, Part::re},
                           {0, 3, Part::re}, {1, 2, Part::im}}) {
      const auto F = trace_monomial(m, k, p);
      const auto an = grad_full(F, x);
      const auto fd = grad_full(F, x, DiffOptions{false});
      EXPECT_LE(norm(an - fd), 5e-6 * (1 + std::abs(F(x)) + norm(an))) << F.name;
    }
  }
}

TEST(GradRed, Examples) {
  const auto y = sample_point<RedPoint>(3, 4);
  const Observable<RedPoint> h2{"tr L^2 / 2",
                                [](const RedPoint& x) { return 0.5 * x.L.matrix().squaredNorm(); },
                                {}};
  const auto g = grad_red(h2, y);
  EXPECT_LE((g.d2 - I * y.L.matrix()).norm(), 5e-6 * (1 + y.L.matrix().norm()));
  EXPECT_LE(g.D1.norm(), 1e-9);

  const Observable<RedPoint> qonly{
      "sum cos q", [](const RedPoint& x) { return x.Q.phases().array().cos().sum(); }, {}};
  const auto gq = grad_red(qonly, y);
  EXPECT_LE(gq.d2.norm(), 0.0);
  for (Eigen::Index j = 0; j < 3; ++j)
    EXPECT_NEAR(gq.D1(j, j).real(), -std::sin(y.Q.phases()(j)), 1e-8);
}

TEST(GradRed, RestrictionAnalyticMatchesFD) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto y = sample_point<RedPoint>(4, s);
    const auto f = invariant_observable(2, 2, Part::im).red;
    const auto an = grad_red(f, y);
    const auto fd = grad_red(f, y, DiffOptions{false});
    EXPECT_LE(norm(an - fd), 5e-6 * (1 + std::abs(f(y)) + norm(an)));
  }
}

TEST(GradRS, Examples) {
  const auto x = sample_point<RSPoint>(3, 5);
  const Observable<RSPoint> pexp{
      "sum e^{2p}", [](const RSPoint& z) { return (2.0 * z.p.array()).exp().sum(); }, {}};
  const auto g = grad_rs(pexp, x);
  EXPECT_LE(g.DQ.norm() + g.Dlam.norm() + g.Dlamp.norm(), 1e-9);
  // dp lives in u(n)_0 and pairs with the b(n)_0 direction diag(1_j).
  for (Eigen::Index j = 0; j < 3; ++j)
    EXPECT_NEAR(g.dp(j, j).imag(), 2.0 * std::exp(2.0 * x.p(j)), 1e-7);

  // At lambda = 1, left and right multiplicative derivatives agree.
  const RSPoint one(x.Q, x.p, UnipotentUpper::identity(3));
  const Observable<RSPoint> re12{"Re lambda_12",
                                 [](const RSPoint& z) { return z.lambda.matrix()(0, 1).real(); },
                                 {}};
  const auto g1 = grad_rs(re12, one);
  EXPECT_GT(g1.Dlam.norm(), 0.1);
  EXPECT_LE((g1.Dlam - g1.Dlamp).norm(), 1e-9);
}

TEST(GradSuth, Examples) {
  const auto x = sample_point<SuthPoint>(3, 6);
  const Observable<SuthPoint> h2{"H2_red", [](const SuthPoint& z) { return h_suth2(z); }, {}};
  const auto g = grad_suth(h2, x);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(g.dp(j, j).imag(), x.p(j), 1e-8);

  const Observable<SuthPoint> pq{"p.p + cos q0", [](const SuthPoint& z) {
                                   return z.p.squaredNorm() + std::cos(z.Q.phases()(0));
                                 }, {}};
  EXPECT_LE(grad_suth(pq, x).dphi.norm(), 0.0);
}

TEST(GradSuth, QuadraticMatchesHandGradient) {
  // F = sum_{j<k} c_jk |phi_jk|^2 + sum p_j^2, hand gradient in the chart's dual basis
  const auto x = sample_point<SuthPoint>(3, 7);
  const Observable<SuthPoint> F{"quad", [](const SuthPoint& z) {
                                  double s = z.p.squaredNorm();
                                  s += 2.0 * std::norm(z.phi(0, 1)) + 3.0 * std::norm(z.phi(1, 2));
                                  return s;
                                }, {}};
  const auto g = grad_suth(F, x);
  for (std::size_t a = 0; a < dual_basis_size(SpacePair::uperp_hermperp, 3); ++a) {
    const Mat dir = dual_element(SpacePair::uperp_hermperp, 3, a).dual;
    // directional derivative of F along dir, by hand
    const double want = 2.0 * 2.0 * std::real(std::conj(x.phi(0, 1)) * dir(0, 1)) +
                        3.0 * 2.0 * std::real(std::conj(x.phi(1, 2)) * dir(1, 2));
    EXPECT_NEAR(pairing(dir, g.dphi), want, 5e-6 * (1 + x.phi.norm()));
  }
}

TEST(Observables, InvariantFamilyExamples) {
  const auto x = sample_point<FullPoint>(3, 8);
  const auto t2 = invariant_observable(0, 2, Part::re).full;
  EXPECT_NEAR(t2(x), 2.0 * free_hamiltonian(2).full(x), 1e-12);
  EXPECT_THROW(trace_monomial(0, 0, Part::re), error);
}

TEST(Observables, ConjugationInvariance) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = sample_point<FullPoint>(4, s);
    const Mat eta = sample_unitary(4, s + 100);
    const FullPoint y(UnitaryMat(eta * x.g.matrix() * eta.adjoint()),
                      HermitianMat(eta * x.L.matrix() * eta.adjoint()));
    for (int m = 0; m <= 3; ++m)
      for (int k = 0; k <= 3; ++k) {
        if (m == 0 && k == 0) continue;
        for (Part p : {Part::re, Part::im}) {
          const auto F = trace_monomial(m, k, p);
          EXPECT_LE(std::abs(F(x) - F(y)), 1e-12 * (1 + std::abs(F(x))));
        }
      }
  }
}

TEST(Observables, LinearityOfGradients) {
  const auto y = sample_point<RedPoint>(3, 9);
  const auto f = invariant_observable(1, 2, Part::re).red;
  const auto h = invariant_observable(2, 1, Part::im).red;
  const auto fh = linear_combination(2.0, f, -0.5, h);
  const DiffOptions fd{false};
  const auto lhs = grad_red(fh, y, fd);
  const auto rhs = 2.0 * grad_red(f, y, fd) + (-0.5) * grad_red(h, y, fd);
  EXPECT_LE(norm(lhs - rhs), 1e-8 * (1 + norm(lhs)));
}

TEST(Observables, ProductGradientIsLeibniz) {
  const auto x = sample_point<FullPoint>(3, 10);
  const auto f = trace_monomial(1, 1, Part::re), h = trace_monomial(2, 0, Part::im);
  const auto fh = product(f, h);
  ASSERT_TRUE(fh.has_gradient());
  EXPECT_LE(norm(grad_full(fh, x) - grad_full(fh, x, DiffOptions{false})),
            5e-6 * (1 + norm(grad_full(fh, x))));
}

TEST(Sampling, DeterministicAndValid) {
  for (int n = 2; n <= 5; ++n) {
    const auto a = sample_point<FullPoint>(n, 42), b = sample_point<FullPoint>(n, 42);
    EXPECT_EQ(a.g.matrix(), b.g.matrix());
    EXPECT_EQ(a.L.matrix(), b.L.matrix());
    EXPECT_LE(UnitaryMat::unitarity_defect(a.g.matrix()), 1e-12 * n);
    const auto r = sample_point<RSPoint>(n, 42), r2 = sample_point<RSPoint>(n, 42);
    EXPECT_EQ(r.lambda.matrix(), r2.lambda.matrix());
    EXPECT_GT(r.Q.gap(), SampleOptions{}.min_gap);
    const auto s = sample_point<SuthPoint>(n, 42);
    EXPECT_TRUE(is_member(s.phi, Subspace::herm_perp));
  }
  EXPECT_NE(sample_point<RedPoint>(3, 1).Q.phases(), sample_point<RedPoint>(3, 2).Q.phases());
}

TEST(Sampling, RedrawBudget) {
  SampleOptions o;
  o.min_gap = 1.99;  // unattainable for n = 5
  o.max_redraws = 50;
  EXPECT_THROW(sample_point<RedPoint>(5, 1, o), sampler_error);
  EXPECT_THROW(sample_point<FullPoint>(1, 1), dimension_error);
}
