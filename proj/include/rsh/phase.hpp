#pragma once

// Derivatives on the four charts. Every gradient is defined by pairing with
// displacement directions:
//   full  <D1F,X> + <D1'F,X'> + <d2F,Y> = d/dt F(e^{tX} g e^{tX'}, L + tY)
//   red   <D1f,X> + <d2f,Y>             = d/dt f(e^{tX} Q, L + tY)
//   rs    <DQ,X0> + <dp,Y0> + <Dl,X+> + <Dl',Y+>
//                                       = d/dt F(e^{tX0}Q, p + tY0, e^{tX+} l e^{tY+})
//   suth  <DQ,X> + <dp,Y0> + <dphi,Yperp> = d/dt F(e^{tX}Q, p + tY0, phi + tYperp)
// and is assembled from central differences against dual bases.

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rsh/points.hpp"

namespace rsh {

struct FullGradient {
  Mat D1;   // b(n)
  Mat D1p;  // b(n)
  Mat d2;   // u(n)
  auto parts() { return std::tie(D1, D1p, d2); }
  auto parts() const { return std::tie(D1, D1p, d2); }
};

struct RedGradient {
  Mat D1;  // b(n)_0
  Mat d2;  // u(n)
  auto parts() { return std::tie(D1, d2); }
  auto parts() const { return std::tie(D1, d2); }
};

struct RSGradient {
  Mat DQ;     // b(n)_0
  Mat dp;     // u(n)_0
  Mat Dlam;   // u(n)_perp, left displacement
  Mat Dlamp;  // u(n)_perp, right displacement
  auto parts() { return std::tie(DQ, dp, Dlam, Dlamp); }
  auto parts() const { return std::tie(DQ, dp, Dlam, Dlamp); }
};

struct SuthGradient {
  Mat DQ;    // b(n)_0
  Mat dp;    // u(n)_0
  Mat dphi;  // u(n)_perp
  auto parts() { return std::tie(DQ, dp, dphi); }
  auto parts() const { return std::tie(DQ, dp, dphi); }
};

template <class G>
concept GradientLike = requires(G g, const G cg) {
  g.parts();
  cg.parts();
};

namespace detail {

template <class Ta, class Tb, class F, std::size_t... I>
void zip_parts(Ta&& a, Tb&& b, F&& f, std::index_sequence<I...>) {
  (f(std::get<I>(a), std::get<I>(b)), ...);
}

template <class Ta, class Tb, class F>
void zip_parts(Ta&& a, Tb&& b, F&& f) {
  constexpr auto size = std::tuple_size_v<std::remove_cvref_t<Ta>>;
  zip_parts(a, b, f, std::make_index_sequence<size>{});
}

}  // namespace detail

template <GradientLike G>
G operator+(G a, const G& b) {
  detail::zip_parts(a.parts(), b.parts(), [](Mat& x, const Mat& y) { x += y; });
  return a;
}

template <GradientLike G>
G operator-(G a, const G& b) {
  detail::zip_parts(a.parts(), b.parts(), [](Mat& x, const Mat& y) { x -= y; });
  return a;
}

template <GradientLike G>
G operator*(double s, G a) {
  std::apply([s](auto&... m) { ((m *= s), ...); }, a.parts());
  return a;
}

template <GradientLike G>
double norm(const G& g) {
  double sq = 0.0;
  std::apply([&sq](const auto&... m) { ((sq += m.squaredNorm()), ...); }, g.parts());
  return std::sqrt(sq);
}

// ---------------------------------------------------------------------------
// Chart traits: displacement directions and gradient assembly

template <class Point>
struct chart_traits;

namespace detail {

inline Mat sum_basis(SpacePair pair, Eigen::Index n, std::span<const double> coeff,
                     bool use_dual) {
  Mat out = Mat::Zero(n, n);
  for (std::size_t a = 0; a < coeff.size(); ++a) {
    if (coeff[a] == 0.0) continue;
    const DualElement e = dual_element(pair, n, a);
    out += coeff[a] * (use_dual ? e.dual : e.basis);
  }
  return out;
}

inline Mat real_diag_of(std::span<const double> v) {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j) out(Eigen::Index(j), Eigen::Index(j)) = v[j];
  return out;
}

inline Mat imag_diag_of(std::span<const double> v) {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j)
    out(Eigen::Index(j), Eigen::Index(j)) = cplx(0.0, v[j]);
  return out;
}

inline TorusReg shift_phase(const TorusReg& Q, Eigen::Index j, double t) {
  RVec q = Q.phases();
  q(j) += t;
  // displaced points stay within FD reach of a regular point
  return TorusReg(std::move(q), Config{0.0, 0.0, false});
}

}  // namespace detail

template <>
struct chart_traits<FullPoint> {
  using gradient_type = FullGradient;
  static constexpr ChartKind kind = ChartKind::full;

  static std::size_t direction_count(const FullPoint& x) {
    return 3 * dual_basis_size(SpacePair::u_b, x.dim());
  }

  static FullPoint displace(const FullPoint& x, std::size_t dir, double t) {
    const auto n = x.dim();
    const std::size_t block = dual_basis_size(SpacePair::u_b, n);
    if (dir < 2 * block) {
      const bool left = dir < block;
      const Mat step = expm_skew(t * dual_element(SpacePair::u_b, n, dir % block).basis);
      Mat g = left ? Mat(step * x.g.matrix()) : Mat(x.g.matrix() * step);
      return FullPoint(UnitaryMat(std::move(g)), x.L);
    }
    const Mat y = dual_element(SpacePair::u_herm, n, dir - 2 * block).dual;
    return FullPoint(x.g, HermitianMat(x.L.matrix() + t * y));
  }

  static FullGradient assemble(const FullPoint& x, std::span<const double> d) {
    const auto n = x.dim();
    const std::size_t block = dual_basis_size(SpacePair::u_b, n);
    return {detail::sum_basis(SpacePair::u_b, n, d.subspan(0, block), true),
            detail::sum_basis(SpacePair::u_b, n, d.subspan(block, block), true),
            detail::sum_basis(SpacePair::u_herm, n, d.subspan(2 * block, block), false)};
  }

  // Rotation angles are O(1); L moves on the scale of |L|.
  static double step_length(const FullPoint& x, std::size_t dir) {
    return dir < 2 * dual_basis_size(SpacePair::u_b, x.dim()) ? 1.0 : 1.0 + x.L.matrix().norm();
  }
};

template <>
struct chart_traits<RedPoint> {
  using gradient_type = RedGradient;
  static constexpr ChartKind kind = ChartKind::red;

  static std::size_t direction_count(const RedPoint& x) {
    const auto n = static_cast<std::size_t>(x.dim());
    return n + n * n;
  }

  static RedPoint displace(const RedPoint& x, std::size_t dir, double t) {
    const auto n = x.dim();
    if (dir < std::size_t(n)) return RedPoint(detail::shift_phase(x.Q, Eigen::Index(dir), t), x.L);
    const Mat y = dual_element(SpacePair::u_herm, n, dir - std::size_t(n)).dual;
    return RedPoint(x.Q, HermitianMat(x.L.matrix() + t * y));
  }

  static RedGradient assemble(const RedPoint& x, std::span<const double> d) {
    const auto n = x.dim();
    return {detail::real_diag_of(d.subspan(0, std::size_t(n))),
            detail::sum_basis(SpacePair::u_herm, n, d.subspan(std::size_t(n)), false)};
  }

  // Phases move on the scale of the smallest eigenvalue gap.
  static double step_length(const RedPoint& x, std::size_t dir) {
    return dir < std::size_t(x.dim()) ? std::min(1.0, x.Q.gap()) : 1.0 + x.L.matrix().norm();
  }
};

template <>
struct chart_traits<RSPoint> {
  using gradient_type = RSGradient;
  static constexpr ChartKind kind = ChartKind::rs;

  static std::size_t direction_count(const RSPoint& x) {
    const auto n = static_cast<std::size_t>(x.dim());
    return 2 * n + 2 * n * (n - 1);
  }

  static RSPoint displace(const RSPoint& x, std::size_t dir, double t) {
    const auto n = x.dim();
    const auto un = std::size_t(n);
    if (dir < un) return RSPoint(detail::shift_phase(x.Q, Eigen::Index(dir), t), x.p, x.lambda);
    if (dir < 2 * un) {
      RVec p = x.p;
      p(Eigen::Index(dir - un)) += t;
      return RSPoint(x.Q, std::move(p), x.lambda);
    }
    const std::size_t block = un * (un - 1);
    const std::size_t a = (dir - 2 * un) % block;
    const bool left = dir - 2 * un < block;
    const Mat step = exp_nilpotent(t * dual_element(SpacePair::uperp_bplus, n, a).dual);
    Mat lam = left ? Mat(step * x.lambda.matrix()) : Mat(x.lambda.matrix() * step);
    lam.diagonal().setOnes();
    lam.triangularView<Eigen::StrictlyLower>().setZero();
    return RSPoint(x.Q, x.p, UnipotentUpper(std::move(lam)));
  }

  static RSGradient assemble(const RSPoint& x, std::span<const double> d) {
    const auto n = x.dim();
    const auto un = std::size_t(n);
    const std::size_t block = un * (un - 1);
    return {detail::real_diag_of(d.subspan(0, un)), detail::imag_diag_of(d.subspan(un, un)),
            detail::sum_basis(SpacePair::uperp_bplus, n, d.subspan(2 * un, block), false),
            detail::sum_basis(SpacePair::uperp_bplus, n, d.subspan(2 * un + block, block), false)};
  }

  // p and the multiplicative lambda directions are dimensionless.
  static double step_length(const RSPoint& x, std::size_t dir) {
    return dir < std::size_t(x.dim()) ? std::min(1.0, x.Q.gap()) : 1.0;
  }
};

template <>
struct chart_traits<SuthPoint> {
  using gradient_type = SuthGradient;
  static constexpr ChartKind kind = ChartKind::suth;

  static std::size_t direction_count(const SuthPoint& x) {
    const auto n = static_cast<std::size_t>(x.dim());
    return 2 * n + n * (n - 1);
  }

  static SuthPoint displace(const SuthPoint& x, std::size_t dir, double t) {
    const auto n = x.dim();
    const auto un = std::size_t(n);
    if (dir < un) return SuthPoint(detail::shift_phase(x.Q, Eigen::Index(dir), t), x.p, x.phi);
    if (dir < 2 * un) {
      RVec p = x.p;
      p(Eigen::Index(dir - un)) += t;
      return SuthPoint(x.Q, std::move(p), x.phi);
    }
    const Mat y = dual_element(SpacePair::uperp_hermperp, n, dir - 2 * un).dual;
    return SuthPoint(x.Q, x.p, x.phi + t * y);
  }

  static SuthGradient assemble(const SuthPoint& x, std::span<const double> d) {
    const auto n = x.dim();
    const auto un = std::size_t(n);
    return {detail::real_diag_of(d.subspan(0, un)), detail::imag_diag_of(d.subspan(un, un)),
            detail::sum_basis(SpacePair::uperp_hermperp, n, d.subspan(2 * un), false)};
  }

  static double step_length(const SuthPoint& x, std::size_t dir) {
    const auto un = std::size_t(x.dim());
    if (dir < un) return std::min(1.0, x.Q.gap());
    return 1.0 + (dir < 2 * un ? x.p.norm() : x.phi.norm());
  }
};

template <class Point>
using gradient_t = typename chart_traits<Point>::gradient_type;

// ---------------------------------------------------------------------------
// Observables

template <class Point>
struct Observable {
  std::string name;
  std::function<double(const Point&)> value;
  std::function<gradient_t<Point>(const Point&)> gradient;  // empty: no analytic gradient

  static constexpr ChartKind chart = chart_traits<Point>::kind;

  double operator()(const Point& x) const { return value(x); }
  bool has_gradient() const { return static_cast<bool>(gradient); }
};

template <class Point>
Observable<Point> scaled(double a, const Observable<Point>& f) {
  Observable<Point> out{std::to_string(a) + "*" + f.name,
                        [a, v = f.value](const Point& x) { return a * v(x); },
                        {}};
  if (f.has_gradient()) out.gradient = [a, g = f.gradient](const Point& x) { return a * g(x); };
  return out;
}

template <class Point>
Observable<Point> linear_combination(double a, const Observable<Point>& f, double b,
                                     const Observable<Point>& h) {
  Observable<Point> out{
      "(" + std::to_string(a) + "*" + f.name + " + " + std::to_string(b) + "*" + h.name + ")",
      [a, b, fv = f.value, hv = h.value](const Point& x) { return a * fv(x) + b * hv(x); },
      {}};
  if (f.has_gradient() && h.has_gradient())
    out.gradient = [a, b, fg = f.gradient, hg = h.gradient](const Point& x) {
      return a * fg(x) + b * hg(x);
    };
  return out;
}

template <class Point>
Observable<Point> product(const Observable<Point>& f, const Observable<Point>& h) {
  Observable<Point> out{"(" + f.name + " * " + h.name + ")",
                        [fv = f.value, hv = h.value](const Point& x) { return fv(x) * hv(x); },
                        {}};
  if (f.has_gradient() && h.has_gradient())
    out.gradient = [f, h](const Point& x) {
      return h.value(x) * f.gradient(x) + f.value(x) * h.gradient(x);
    };
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference engine

struct DiffOptions {
  bool use_analytic = true;   // prefer an observable's analytic gradient
  double step_scale = 6.1e-6; // h_a = step_scale * step_length(x, a)
};

template <class Point>
double fd_step(const Point& x, std::size_t dir, double step_scale) {
  return step_scale * chart_traits<Point>::step_length(x, dir);
}

// Central-difference gradients of N scalar functions evaluated together;
// fn(Point) returns std::array<double, N>.
template <std::size_t N, class Point, class Fn>
std::array<gradient_t<Point>, N> fd_gradients(const Fn& fn, const Point& x, double step_scale) {
  using T = chart_traits<Point>;
  const std::size_t m = T::direction_count(x);
  std::array<std::vector<double>, N> d;
  for (auto& v : d) v.resize(m);
  for (std::size_t a = 0; a < m; ++a) {
    const double h = fd_step(x, a, step_scale);
    const std::array<double, N> fp = fn(T::displace(x, a, h));
    const std::array<double, N> fm = fn(T::displace(x, a, -h));
    for (std::size_t i = 0; i < N; ++i) {
      if (!std::isfinite(fp[i]) || !std::isfinite(fm[i]))
        throw error("finite differences: non-finite function value near the point");
      d[i][a] = (fp[i] - fm[i]) / (2.0 * h);
    }
  }
  std::array<gradient_t<Point>, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = T::assemble(x, d[i]);
  return out;
}

template <class Point>
gradient_t<Point> fd_gradient(const std::function<double(const Point&)>& fn, const Point& x,
                              double step_scale = DiffOptions{}.step_scale) {
  return fd_gradients<1>([&fn](const Point& y) { return std::array<double, 1>{fn(y)}; }, x,
                         step_scale)[0];
}

template <class Point>
gradient_t<Point> gradient(const Observable<Point>& f, const Point& x, const DiffOptions& opts = {}) {
  if (opts.use_analytic && f.has_gradient()) return f.gradient(x);
  return fd_gradient<Point>(f.value, x, opts.step_scale);
}

inline FullGradient grad_full(const Observable<FullPoint>& f, const FullPoint& x,
                              const DiffOptions& opts = {}) {
  return gradient(f, x, opts);
}

inline RedGradient grad_red(const Observable<RedPoint>& f, const RedPoint& x,
                            const DiffOptions& opts = {}) {
  return gradient(f, x, opts);
}

inline RSGradient grad_rs(const Observable<RSPoint>& f, const RSPoint& x,
                          const DiffOptions& opts = {}) {
  return gradient(f, x, opts);
}

inline SuthGradient grad_suth(const Observable<SuthPoint>& f, const SuthPoint& x,
                              const DiffOptions& opts = {}) {
  return gradient(f, x, opts);
}

}  // namespace rsh
