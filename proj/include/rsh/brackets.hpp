#pragma once

// The six Poisson bracket formulas, the bracket pencil and a nested
// finite-difference Jacobi defect.
//
// Each evaluator returns its individual pairing terms; value() is their sum
// and magnitude() sums sum_jk |X_jk||Y_kj| over the pairings, the natural
// scale for relative defects when terms or entries cancel.

#include <array>
#include <functional>

#include "rsh/phase.hpp"

namespace rsh {

struct BracketTerms {
  std::array<double, 8> term{};
  std::array<double, 8> bound{};
  std::size_t count = 0;

  void add(double v, double b) {
    term[count] = v;
    bound[count++] = b;
  }

  // c <X,Y>
  void add_pairing(double c, const Mat& x, const Mat& y) {
    add(c * pairing(x, y), std::abs(c) * pairing_magnitude(x, y));
  }

  double value() const {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += term[i];
    return s;
  }

  double magnitude() const {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += std::max(std::abs(term[i]), bound[i]);
    return s;
  }
};

// Brackets are bilinear in the two gradients at a point.
template <class Point>
using BracketFn =
    std::function<BracketTerms(const Point&, const gradient_t<Point>&, const gradient_t<Point>&)>;

// {F,H}_1 = <D1F, d2H> - <D1H, d2F> + <L, [d2F, d2H]>
inline BracketTerms pb1_full_terms(const FullPoint& x, const FullGradient& dF,
                                   const FullGradient& dH) {
  BracketTerms t;
  t.add_pairing(1.0, dF.D1, dH.d2);
  t.add_pairing(-1.0, dH.D1, dF.d2);
  t.add_pairing(1.0, x.L.matrix(), commutator(dF.d2, dH.d2));
  return t;
}

// {F,H}_2 = <D1F, L d2H> - <D1H, L d2F> + 2<L d2F, (L d2H)_u> - 1/2 <D1'F, g^-1 D1H g>
inline BracketTerms pb2_full_terms(const FullPoint& x, const FullGradient& dF,
                                   const FullGradient& dH) {
  const Mat& L = x.L.matrix();
  const Mat& g = x.g.matrix();
  const Mat ldF = L * dF.d2;
  const Mat ldH = L * dH.d2;
  BracketTerms t;
  t.add_pairing(1.0, dF.D1, ldH);
  t.add_pairing(-1.0, dH.D1, ldF);
  t.add_pairing(2.0, ldF, split_ub(ldH).u);
  t.add_pairing(-0.5, dF.D1p, g.adjoint() * dH.D1 * g);
  return t;
}

// {f,h}_1^red = <D1f, d2h> - <D1h, d2f> + <L, [d2f, d2h]_R(Q)>
inline BracketTerms pb1_red_terms(const RedPoint& x, const RedGradient& df, const RedGradient& dh,
                                  const Config& cfg = {}) {
  BracketTerms t;
  t.add_pairing(1.0, df.D1, dh.d2);
  t.add_pairing(-1.0, dh.D1, df.d2);
  t.add_pairing(1.0, x.L.matrix(), r_bracket(x.Q, df.d2, dh.d2, cfg));
  return t;
}

// {f,h}_2^red = <D1f, L d2h> - <D1h, L d2f> + 2<L d2f, R(Q)(L d2h)>
inline BracketTerms pb2_red_terms(const RedPoint& x, const RedGradient& df, const RedGradient& dh,
                                  const Config& cfg = {}) {
  const Mat& L = x.L.matrix();
  const Mat ldf = L * df.d2;
  const Mat ldh = L * dh.d2;
  BracketTerms t;
  t.add_pairing(1.0, df.D1, ldh);
  t.add_pairing(-1.0, dh.D1, ldf);
  t.add_pairing(2.0, ldf, r_apply(x.Q, ldh, cfg));
  return t;
}

// <DQ F, dp H> - <DQ H, dp F> + <D'l F, l^-1 (Dl H) l>, which is twice the
// second bracket in (Q,p,lambda). Exposed for debugging the normalization.
inline BracketTerms pb_rs_raw_terms(const RSPoint& x, const RSGradient& dF,
                                    const RSGradient& dH) {
  BracketTerms t;
  t.add_pairing(1.0, dF.DQ, dH.dp);
  t.add_pairing(-1.0, dH.DQ, dF.dp);
  t.add_pairing(1.0, dF.Dlamp, x.lambda.inverse() * dH.Dlam * x.lambda.matrix());
  return t;
}

inline BracketTerms pb_rs_terms(const RSPoint& x, const RSGradient& dF, const RSGradient& dH) {
  BracketTerms t = pb_rs_raw_terms(x, dF, dH);
  for (std::size_t i = 0; i < t.count; ++i) {
    t.term[i] *= 0.5;
    t.bound[i] *= 0.5;
  }
  return t;
}

// {F,H} = <DQ F, dp H> - <DQ H, dp F> + <phi, [dphi F, dphi H]>
inline BracketTerms pb_suth_terms(const SuthPoint& x, const SuthGradient& dF,
                                  const SuthGradient& dH) {
  BracketTerms t;
  t.add_pairing(1.0, dF.DQ, dH.dp);
  t.add_pairing(-1.0, dH.DQ, dF.dp);
  t.add_pairing(1.0, x.phi, commutator(dF.dphi, dH.dphi));
  return t;
}

inline double pb1_full(const FullPoint& x, const FullGradient& dF, const FullGradient& dH) {
  return pb1_full_terms(x, dF, dH).value();
}
inline double pb2_full(const FullPoint& x, const FullGradient& dF, const FullGradient& dH) {
  return pb2_full_terms(x, dF, dH).value();
}
inline double pb1_red(const RedPoint& x, const RedGradient& df, const RedGradient& dh,
                      const Config& cfg = {}) {
  return pb1_red_terms(x, df, dh, cfg).value();
}
inline double pb2_red(const RedPoint& x, const RedGradient& df, const RedGradient& dh,
                      const Config& cfg = {}) {
  return pb2_red_terms(x, df, dh, cfg).value();
}
inline double pb_rs_raw(const RSPoint& x, const RSGradient& dF, const RSGradient& dH) {
  return pb_rs_raw_terms(x, dF, dH).value();
}
inline double pb_rs(const RSPoint& x, const RSGradient& dF, const RSGradient& dH) {
  return pb_rs_terms(x, dF, dH).value();
}
inline double pb_suth(const SuthPoint& x, const SuthGradient& dF, const SuthGradient& dH) {
  return pb_suth_terms(x, dF, dH).value();
}

// Bracket evaluators as values (default Config).
inline const BracketFn<FullPoint> bracket1_full = [](const FullPoint& x, const FullGradient& a,
                                                     const FullGradient& b) {
  return pb1_full_terms(x, a, b);
};
inline const BracketFn<FullPoint> bracket2_full = [](const FullPoint& x, const FullGradient& a,
                                                     const FullGradient& b) {
  return pb2_full_terms(x, a, b);
};
inline const BracketFn<RedPoint> bracket1_red = [](const RedPoint& x, const RedGradient& a,
                                                   const RedGradient& b) {
  return pb1_red_terms(x, a, b);
};
inline const BracketFn<RedPoint> bracket2_red = [](const RedPoint& x, const RedGradient& a,
                                                   const RedGradient& b) {
  return pb2_red_terms(x, a, b);
};
inline const BracketFn<RSPoint> bracket_rs = [](const RSPoint& x, const RSGradient& a,
                                                const RSGradient& b) {
  return pb_rs_terms(x, a, b);
};
inline const BracketFn<SuthPoint> bracket_suth = [](const SuthPoint& x, const SuthGradient& a,
                                                    const SuthGradient& b) {
  return pb_suth_terms(x, a, b);
};

// pb1_full + s * pb2_full
inline BracketFn<FullPoint> pencil(double s) {
  return [s](const FullPoint& x, const FullGradient& dF, const FullGradient& dH) {
    BracketTerms t = pb1_full_terms(x, dF, dH);
    const BracketTerms t2 = pb2_full_terms(x, dF, dH);
    for (std::size_t i = 0; i < t2.count; ++i) t.add(s * t2.term[i], std::abs(s) * t2.bound[i]);
    return t;
  };
}

template <class Point>
BracketTerms bracket_terms(const BracketFn<Point>& b, const Observable<Point>& F,
                           const Observable<Point>& H, const Point& x,
                           const DiffOptions& opts = {}) {
  return b(x, gradient(F, x, opts), gradient(H, x, opts));
}

template <class Point>
double bracket(const BracketFn<Point>& b, const Observable<Point>& F, const Observable<Point>& H,
               const Point& x, const DiffOptions& opts = {}) {
  return bracket_terms(b, F, H, x, opts).value();
}

inline double pb1_full(const Observable<FullPoint>& F, const Observable<FullPoint>& H,
                       const FullPoint& x, const DiffOptions& opts = {}) {
  return pb1_full(x, grad_full(F, x, opts), grad_full(H, x, opts));
}

inline double pb2_full(const Observable<FullPoint>& F, const Observable<FullPoint>& H,
                       const FullPoint& x, const DiffOptions& opts = {}) {
  return pb2_full(x, grad_full(F, x, opts), grad_full(H, x, opts));
}

inline double pb1_red(const Observable<RedPoint>& f, const Observable<RedPoint>& h,
                      const RedPoint& x, const DiffOptions& opts = {}) {
  return pb1_red(x, grad_red(f, x, opts), grad_red(h, x, opts));
}

inline double pb2_red(const Observable<RedPoint>& f, const Observable<RedPoint>& h,
                      const RedPoint& x, const DiffOptions& opts = {}) {
  return pb2_red(x, grad_red(f, x, opts), grad_red(h, x, opts));
}

inline double pb_rs(const Observable<RSPoint>& F, const Observable<RSPoint>& H, const RSPoint& x,
                    const DiffOptions& opts = {}) {
  return pb_rs(x, grad_rs(F, x, opts), grad_rs(H, x, opts));
}

inline double pb_suth(const Observable<SuthPoint>& F, const Observable<SuthPoint>& H,
                      const SuthPoint& x, const DiffOptions& opts = {}) {
  return pb_suth(x, grad_suth(F, x, opts), grad_suth(H, x, opts));
}

struct JacobiOptions {
  DiffOptions inner{};             // first derivatives of F, G, H
  double outer_step_scale = 3e-4;  // h_outer = outer_step_scale * step_length
};

struct JacobiResult {
  double defect;  // {F,{G,H}} + {G,{H,F}} + {H,{F,G}}
  double scale;   // 1 + summed term magnitudes of the three outer brackets
};

// Inner brackets become scalar functions of the point; their gradients are
// taken by central differences. Gradients of F, G, H are computed once per
// displaced point and shared by the three inner brackets.
template <class Point>
JacobiResult jacobi(const BracketFn<Point>& b, const Observable<Point>& F,
                    const Observable<Point>& G, const Observable<Point>& H, const Point& x,
                    const JacobiOptions& opts = {}) {
  auto inner = [&](const Point& y) {
    const auto gF = gradient(F, y, opts.inner);
    const auto gG = gradient(G, y, opts.inner);
    const auto gH = gradient(H, y, opts.inner);
    return std::array<double, 3>{b(y, gG, gH).value(), b(y, gH, gF).value(),
                                 b(y, gF, gG).value()};
  };
  const auto outer = fd_gradients<3>(inner, x, opts.outer_step_scale);
  const BracketTerms t1 = b(x, gradient(F, x, opts.inner), outer[0]);
  const BracketTerms t2 = b(x, gradient(G, x, opts.inner), outer[1]);
  const BracketTerms t3 = b(x, gradient(H, x, opts.inner), outer[2]);
  return {t1.value() + t2.value() + t3.value(),
          1.0 + t1.magnitude() + t2.magnitude() + t3.magnitude()};
}

template <class Point>
double jacobi_defect(const BracketFn<Point>& b, const Observable<Point>& F,
                     const Observable<Point>& G, const Observable<Point>& H, const Point& x,
                     const JacobiOptions& opts = {}) {
  return jacobi(b, F, G, H, x, opts).defect;
}

}  // namespace rsh
