#pragma once

// Conjugation-invariant trace observables Re/Im tr(g^m L^k) and their
// transport between charts. Transport is always explicit: an observable on
// the reduced chart becomes one on the rs or suth chart only through
// pull_back_rs / pull_back_suth.

#include <string>

#include "rsh/coords.hpp"
#include "rsh/phase.hpp"

namespace rsh {

enum class Part { re, im };

inline std::string part_name(Part p) { return p == Part::re ? "re" : "im"; }

namespace detail {

inline Mat mat_pow(const Mat& a, int e) {
  Mat r = Mat::Identity(a.rows(), a.cols());
  for (int i = 0; i < e; ++i) r = r * a;
  return r;
}

inline double take_part(cplx z, Part p) { return p == Part::re ? z.real() : z.imag(); }

// Matrices M with d/dt tr(g(t)^m L(t)^k) = tr(X M) along each displacement:
//   g -> e^{tX} g:  M_left  = sum_{r<m} g^{m-r} L^k g^r
//   g -> g e^{tX}:  M_right = sum_{s<m} g^s L^k g^{m-s}
//   L -> L + tY:    N       = sum_{r<k} L^{k-1-r} g^m L^r
struct MonomialDerivs {
  Mat left, right, lin;
};

inline MonomialDerivs monomial_derivs(const Mat& g, const Mat& L, int m, int k) {
  const auto n = g.rows();
  std::vector<Mat> gp(std::size_t(m) + 1), lp(std::size_t(k) + 1);
  gp[0] = lp[0] = Mat::Identity(n, n);
  for (int i = 1; i <= m; ++i) gp[std::size_t(i)] = gp[std::size_t(i - 1)] * g;
  for (int i = 1; i <= k; ++i) lp[std::size_t(i)] = lp[std::size_t(i - 1)] * L;
  MonomialDerivs d{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
  const Mat& lk = lp[std::size_t(k)];
  for (int r = 0; r < m; ++r) {
    d.left += gp[std::size_t(m - r)] * lk * gp[std::size_t(r)];
    d.right += gp[std::size_t(r)] * lk * gp[std::size_t(m - r)];
  }
  for (int r = 0; r < k; ++r) d.lin += lp[std::size_t(k - 1 - r)] * gp[std::size_t(m)] * lp[std::size_t(r)];
  return d;
}

inline Mat anti_hermitian_part(const Mat& x) { return 0.5 * (x - x.adjoint()); }

}  // namespace detail

// F(g,L) = Re or Im tr(g^m L^k) on U(n) x Herm(n), with analytic gradient.
inline Observable<FullPoint> trace_monomial(int m, int k, Part part) {
  if (m < 0 || k < 0 || (m == 0 && k == 0))
    throw error("trace_monomial: need m,k >= 0 and (m,k) != (0,0)");
  Observable<FullPoint> f;
  f.name = part_name(part) + " tr(g^" + std::to_string(m) + " L^" + std::to_string(k) + ")";
  f.value = [m, k, part](const FullPoint& x) {
    const Mat prod = detail::mat_pow(x.g.matrix(), m) * detail::mat_pow(x.L.matrix(), k);
    return detail::take_part(prod.trace(), part);
  };
  f.gradient = [m, k, part](const FullPoint& x) {
    // Re tr(XM) is represented in b(n) by (iM)_b and in u(n) by the
    // anti-Hermitian part of iM; Im tr(XM) = Re tr(X(-iM)).
    const cplx c = part == Part::re ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
    const auto d = detail::monomial_derivs(x.g.matrix(), x.L.matrix(), m, k);
    return FullGradient{split_ub(c * d.left).b, split_ub(c * d.right).b,
                        detail::anti_hermitian_part(c * d.lin)};
  };
  return f;
}

// Restriction to T^n_reg x Herm(n) (Q viewed as an element of U(n)).
inline Observable<RedPoint> restrict_to_red(const Observable<FullPoint>& F) {
  Observable<RedPoint> f;
  f.name = F.name;
  f.value = [v = F.value](const RedPoint& x) { return v(x.as_full()); };
  if (F.has_gradient())
    f.gradient = [g = F.gradient](const RedPoint& x) {
      const FullGradient full = g(x.as_full());
      return RedGradient{project_special(full.D1, SpecialPart::real_diag), full.d2};
    };
  return f;
}

inline Observable<RSPoint> pull_back_rs(const Observable<RedPoint>& f, const Config& cfg = {}) {
  return {f.name + " o from_rs",
          [v = f.value, cfg](const RSPoint& x) { return v(from_rs(x, cfg)); },
          {}};
}

inline Observable<SuthPoint> pull_back_suth(const Observable<RedPoint>& f,
                                            const Config& cfg = {}) {
  return {f.name + " o from_suth",
          [v = f.value, cfg](const SuthPoint& x) { return v(from_suth(x, cfg)); },
          {}};
}

// One observable expressed on every chart.
struct ObservableSet {
  Observable<FullPoint> full;
  Observable<RedPoint> red;
  Observable<RSPoint> rs;
  Observable<SuthPoint> suth;
};

inline ObservableSet chart_family(Observable<FullPoint> F, const Config& cfg = {}) {
  Observable<RedPoint> red = restrict_to_red(F);
  Observable<RSPoint> rs = pull_back_rs(red, cfg);
  Observable<SuthPoint> suth = pull_back_suth(red, cfg);
  return {std::move(F), std::move(red), std::move(rs), std::move(suth)};
}

// Re/Im tr(g^m L^k): invariant under (g,L) -> (eta g eta^-1, eta L eta^-1).
inline ObservableSet invariant_observable(int m, int k, Part part, const Config& cfg = {}) {
  return chart_family(trace_monomial(m, k, part), cfg);
}

// H_k = tr(L^k)/k, d2 H_k = i L^{k-1}.
inline ObservableSet free_hamiltonian(int k, const Config& cfg = {}) {
  if (k < 1) throw error("free_hamiltonian: k must be >= 1");
  Observable<FullPoint> h = scaled(1.0 / k, trace_monomial(0, k, Part::re));
  h.name = "H_" + std::to_string(k);
  return chart_family(std::move(h), cfg);
}

}  // namespace rsh
