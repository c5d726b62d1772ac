#pragma once

// Structured matrices over gl(n,C), the Im-trace pairing, the u(n)+b(n)
// splitting, the principal gradation and the trigonometric R-operator.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rsh/core.hpp"

namespace rsh {

// ---------------------------------------------------------------------------
// Validated group / set elements

class UnitaryMat {
 public:
  explicit UnitaryMat(Mat g) : g_(std::move(g)) {
    require_square(g_, "UnitaryMat");
    const double defect = unitarity_defect(g_);
    if (!(defect <= 1e-12 * static_cast<double>(g_.rows())))
      throw invariant_error("UnitaryMat: |g^+g - 1| = " + std::to_string(defect));
  }

  static double unitarity_defect(const Mat& g) {
    return (g.adjoint() * g - Mat::Identity(g.rows(), g.cols())).norm();
  }

  const Mat& matrix() const { return g_; }
  Eigen::Index dim() const { return g_.rows(); }
  Mat inverse() const { return g_.adjoint(); }

 private:
  Mat g_;
};

class HermitianMat {
 public:
  // Symmetrizes exactly. In strict mode a visibly non-Hermitian input throws.
  explicit HermitianMat(const Mat& l, bool strict = false) {
    require_square(l, "HermitianMat");
    if (strict) {
      const double skew = (l - l.adjoint()).norm();
      if (skew > 1e-10 * std::max(1.0, l.norm()))
        throw subspace_error("HermitianMat: anti-Hermitian part " + std::to_string(skew));
    }
    l_ = 0.5 * (l + l.adjoint());
  }

  const Mat& matrix() const { return l_; }
  Eigen::Index dim() const { return l_.rows(); }

 private:
  Mat l_;
};

// Regular element Q = diag(e^{iq_1},...,e^{iq_n}) of the maximal torus.
class TorusReg {
 public:
  explicit TorusReg(RVec q, const Config& cfg = {}) : q_(std::move(q)) {
    if (q_.size() < 1) throw dimension_error("TorusReg: empty phase vector");
    if (!q_.allFinite()) throw invariant_error("TorusReg: non-finite phase");
    const double g = gap();
    if (!(g > cfg.regularity_gap))
      throw regularity_error("TorusReg: eigenvalue gap " + std::to_string(g) +
                             " below regularity_gap " + std::to_string(cfg.regularity_gap));
  }

  // min_{j<k} |e^{iq_j} - e^{iq_k}|
  static double gap_of(const RVec& q) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < q.size(); ++j)
      for (Eigen::Index k = j + 1; k < q.size(); ++k)
        best = std::min(best, 2.0 * std::abs(std::sin(0.5 * (q(j) - q(k)))));
    return best;
  }

  double gap() const { return gap_of(q_); }
  const RVec& phases() const { return q_; }
  Eigen::Index dim() const { return q_.size(); }
  cplx eigenvalue(Eigen::Index j) const { return std::polar(1.0, q_(j)); }

  Mat matrix() const {
    Mat Q = Mat::Zero(dim(), dim());
    for (Eigen::Index j = 0; j < dim(); ++j) Q(j, j) = eigenvalue(j);
    return Q;
  }

  Mat inverse() const {
    Mat Q = Mat::Zero(dim(), dim());
    for (Eigen::Index j = 0; j < dim(); ++j) Q(j, j) = std::polar(1.0, -q_(j));
    return Q;
  }

 private:
  RVec q_;
};

// Upper triangular with positive real diagonal: B(n).
class BorelUpper {
 public:
  explicit BorelUpper(Mat b) : b_(std::move(b)) {
    require_square(b_, "BorelUpper");
    for (Eigen::Index j = 0; j < b_.rows(); ++j) {
      if (!(b_(j, j).imag() == 0.0 && b_(j, j).real() > 0.0))
        throw invariant_error("BorelUpper: diagonal entry not real positive");
      for (Eigen::Index k = 0; k < j; ++k)
        if (b_(j, k) != cplx(0.0))
          throw invariant_error("BorelUpper: nonzero strictly lower entry");
    }
  }

  const Mat& matrix() const { return b_; }
  Eigen::Index dim() const { return b_.rows(); }

 private:
  Mat b_;
};

// Upper triangular with unit diagonal: B(n)_+.
class UnipotentUpper {
 public:
  explicit UnipotentUpper(Mat u) : u_(std::move(u)) {
    require_square(u_, "UnipotentUpper");
    for (Eigen::Index j = 0; j < u_.rows(); ++j) {
      if (u_(j, j) != cplx(1.0)) throw invariant_error("UnipotentUpper: diagonal entry != 1");
      for (Eigen::Index k = 0; k < j; ++k)
        if (u_(j, k) != cplx(0.0))
          throw invariant_error("UnipotentUpper: nonzero strictly lower entry");
    }
  }

  static UnipotentUpper identity(Eigen::Index n) { return UnipotentUpper(Mat::Identity(n, n)); }

  const Mat& matrix() const { return u_; }
  Eigen::Index dim() const { return u_.rows(); }

  // Exact inverse by back substitution.
  Mat inverse() const {
    return u_.triangularView<Eigen::UnitUpper>().solve(Mat::Identity(dim(), dim()));
  }

 private:
  Mat u_;
};

// ---------------------------------------------------------------------------
// Pairing and splittings

inline Mat commutator(const Mat& x, const Mat& y) { return x * y - y * x; }

// <X,Y> = Im tr(XY)
inline double pairing(const GlElement& x, const GlElement& y) {
  require_same_dim(x, y, "pairing");
  // tr(XY) = sum_{jk} X_jk Y_kj
  return (x.array() * y.transpose().array()).sum().imag();
}

// sum |X_jk| |Y_kj|, the rounding scale of <X,Y>
inline double pairing_magnitude(const GlElement& x, const GlElement& y) {
  require_same_dim(x, y, "pairing_magnitude");
  return (x.cwiseAbs().array() * y.transpose().cwiseAbs().array()).sum();
}

struct UbSplit {
  GlElement u;  // anti-Hermitian
  GlElement b;  // upper triangular, real diagonal
};

inline UbSplit split_ub(const GlElement& x) {
  const auto n = x.rows();
  UbSplit s{Mat::Zero(n, n), Mat::Zero(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    s.b(j, j) = x(j, j).real();
    s.u(j, j) = cplx(0.0, x(j, j).imag());
    for (Eigen::Index k = j + 1; k < n; ++k) {
      // lower entry belongs to u entirely; u's upper mirror is fixed by skewness
      s.u(k, j) = x(k, j);
      s.u(j, k) = -std::conj(x(k, j));
      s.b(j, k) = x(j, k) + std::conj(x(k, j));
    }
  }
  return s;
}

struct GradeSplit {
  GlElement plus;   // strictly upper
  GlElement zero;   // diagonal
  GlElement minus;  // strictly lower
};

inline GradeSplit split_grade(const GlElement& x) {
  const auto n = x.rows();
  GradeSplit s{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
  s.plus.triangularView<Eigen::StrictlyUpper>() = x;
  s.minus.triangularView<Eigen::StrictlyLower>() = x;
  s.zero.diagonal() = x.diagonal();
  return s;
}

enum class SpecialPart { im_diag, real_diag, u_of_n, b_of_n };

inline GlElement project_special(const GlElement& x, SpecialPart kind) {
  const auto n = x.rows();
  switch (kind) {
    case SpecialPart::im_diag: {
      Mat r = Mat::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) r(j, j) = cplx(0.0, x(j, j).imag());
      return r;
    }
    case SpecialPart::real_diag: {
      Mat r = Mat::Zero(n, n);
      for (Eigen::Index j = 0; j < n; ++j) r(j, j) = x(j, j).real();
      return r;
    }
    case SpecialPart::u_of_n:
      return split_ub(x).u;
    case SpecialPart::b_of_n:
      return split_ub(x).b;
  }
  return x;
}

// Real subspaces of gl(n,C) used as derivative targets and displacement spaces.
enum class Subspace {
  u_n,        // anti-Hermitian
  u_n0,       // imaginary diagonal
  u_perp,     // anti-Hermitian off-diagonal
  b_n,        // upper triangular, real diagonal
  b_n0,       // real diagonal (same set as herm0)
  b_plus,     // strictly upper
  herm,       // Hermitian
  herm0,      // real diagonal
  herm_perp,  // Hermitian off-diagonal
};

namespace detail {

inline Mat off_diagonal(Mat x) {
  x.diagonal().setZero();
  return x;
}

inline Mat nearest_member(const Mat& x, Subspace s) {
  const auto n = x.rows();
  switch (s) {
    case Subspace::u_n:
      return 0.5 * (x - x.adjoint());
    case Subspace::herm:
      return 0.5 * (x + x.adjoint());
    case Subspace::u_perp:
      return off_diagonal(0.5 * (x - x.adjoint()));
    case Subspace::herm_perp:
      return off_diagonal(0.5 * (x + x.adjoint()));
    case Subspace::u_n0:
      return project_special(x, SpecialPart::im_diag);
    case Subspace::b_n0:
    case Subspace::herm0:
      return project_special(x, SpecialPart::real_diag);
    case Subspace::b_plus: {
      Mat r = Mat::Zero(n, n);
      r.triangularView<Eigen::StrictlyUpper>() = x;
      return r;
    }
    case Subspace::b_n: {
      Mat r = Mat::Zero(n, n);
      r.triangularView<Eigen::StrictlyUpper>() = x;
      for (Eigen::Index j = 0; j < n; ++j) r(j, j) = x(j, j).real();
      return r;
    }
  }
  return x;
}

}  // namespace detail

// Zeroes the part of x outside the subspace. With strict set, a discarded
// part larger than 1e-10 (relative) is an error.
inline Mat enforce(const Mat& x, Subspace s, bool strict = false) {
  Mat r = detail::nearest_member(x, s);
  if (strict) {
    const double discarded = (x - r).norm();
    if (discarded > 1e-10 * std::max(1.0, x.norm()))
      throw subspace_error("enforce: discarded part " + std::to_string(discarded));
  }
  return r;
}

inline bool is_member(const Mat& x, Subspace s, double tol = 1e-12) {
  return (x - detail::nearest_member(x, s)).norm() <= tol * std::max(1.0, x.norm());
}

// ---------------------------------------------------------------------------
// Trigonometric R-operator

namespace detail {

// Phase difference theta_jk = q_j - q_k with the regularity floor applied.
inline double checked_half_sin(const TorusReg& Q, Eigen::Index j, Eigen::Index k,
                               const Config& cfg) {
  const double s = std::sin(0.5 * (Q.phases()(j) - Q.phases()(k)));
  if (!(2.0 * std::abs(s) > cfg.regularity_gap))
    throw regularity_error("R(Q): |e^{iq_j} - e^{iq_k}| below regularity_gap");
  return s;
}

}  // namespace detail

// Off-diagonal multiplier of R(Q) on E_jk: (1/2)(w+1)/(w-1) = -(i/2) cot(theta/2).
inline cplx r_multiplier(const TorusReg& Q, Eigen::Index j, Eigen::Index k,
                         const Config& cfg = {}) {
  const double s = detail::checked_half_sin(Q, j, k, cfg);
  const double c = std::cos(0.5 * (Q.phases()(j) - Q.phases()(k)));
  return cplx(0.0, -0.5 * c / s);
}

inline GlElement r_apply(const TorusReg& Q, const GlElement& x, const Config& cfg = {}) {
  const auto n = x.rows();
  if (n != Q.dim()) throw dimension_error("r_apply: dimension mismatch");
  Mat r = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      if (j != k) r(j, k) = r_multiplier(Q, j, k, cfg) * x(j, k);
  return r;
}

// [X,Y]_R = [R X, Y] + [X, R Y]
inline GlElement r_bracket(const TorusReg& Q, const GlElement& x, const GlElement& y,
                           const Config& cfg = {}) {
  require_same_dim(x, y, "r_bracket");
  return commutator(r_apply(Q, x, cfg), y) + commutator(x, r_apply(Q, y, cfg));
}

// ---------------------------------------------------------------------------
// L = b b^dagger with b in B(n)

inline double min_eigenvalue(const HermitianMat& l) {
  Eigen::SelfAdjointEigenSolver<Mat> es(l.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Upper-triangular factor through index reversal: J L J = l l^dagger with l
// lower triangular, then b = J l J.
inline BorelUpper chol_upper(const HermitianMat& l, const Config& cfg = {}) {
  const double lmin = min_eigenvalue(l);
  if (!(lmin > cfg.pd_floor))
    throw not_positive_definite("chol_upper: smallest eigenvalue " + std::to_string(lmin));
  const Mat reversed = l.matrix().reverse();
  Eigen::LLT<Mat> llt(reversed);
  if (llt.info() != Eigen::Success) throw not_positive_definite("chol_upper: LLT failed");
  Mat lower = llt.matrixL();
  Mat b = lower.reverse();
  const auto n = b.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    // normalize diagonal phases; LLT already returns a real positive diagonal
    const cplx d = b(j, j);
    const cplx phase = d / std::abs(d);
    b.col(j) *= std::conj(phase);
    b(j, j) = std::abs(d);
    for (Eigen::Index k = j + 1; k < n; ++k) b(k, j) = 0.0;
  }
  return BorelUpper(std::move(b));
}

// ---------------------------------------------------------------------------
// Dual bases under the Im-trace pairing

enum class SpacePair {
  u_b,            // u(n)   <-> b(n)
  u0_b0,          // u(n)_0 <-> b(n)_0
  uperp_bplus,    // u(n)_perp <-> b(n)_+
  u_herm,         // u(n)   <-> Herm(n)
  u0_herm0,       // u(n)_0 <-> Herm(n)_0
  uperp_hermperp  // u(n)_perp <-> Herm(n)_perp
};

struct DualElement {
  Mat basis;  // element of the first space
  Mat dual;   // element of the second space, <basis_a, dual_b> = delta_ab
};

inline std::size_t dual_basis_size(SpacePair pair, Eigen::Index n) {
  const auto nn = static_cast<std::size_t>(n);
  switch (pair) {
    case SpacePair::u_b:
    case SpacePair::u_herm:
      return nn * nn;
    case SpacePair::u0_b0:
    case SpacePair::u0_herm0:
      return nn;
    case SpacePair::uperp_bplus:
    case SpacePair::uperp_hermperp:
      return nn * (nn - 1);
  }
  return 0;
}

namespace detail {

// a-th off-diagonal slot: pair index (j<k, row major) and which of two.
inline std::pair<std::pair<Eigen::Index, Eigen::Index>, int> off_slot(Eigen::Index n,
                                                                       std::size_t a) {
  std::size_t pair_index = a / 2;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto row = static_cast<std::size_t>(n - 1 - j);
    if (pair_index < row) return {{j, j + 1 + static_cast<Eigen::Index>(pair_index)}, int(a % 2)};
    pair_index -= row;
  }
  throw dimension_error("dual basis index out of range");
}

inline DualElement diagonal_element(Eigen::Index n, Eigen::Index j) {
  return {unit_matrix(n, j, j, cplx(0.0, 1.0)), unit_matrix(n, j, j)};
}

inline DualElement off_element(Eigen::Index n, std::size_t a, bool herm_target) {
  const auto [jk, which] = off_slot(n, a);
  const auto [j, k] = jk;
  const cplx i(0.0, 1.0);
  const Mat ejk = unit_matrix(n, j, k);
  const Mat ekj = unit_matrix(n, k, j);
  if (which == 0) {
    // E_jk - E_kj
    Mat dual = herm_target ? Mat(-0.5 * i * (ejk - ekj)) : Mat(-i * ejk);
    return {ejk - ekj, std::move(dual)};
  }
  // i (E_jk + E_kj)
  Mat dual = herm_target ? Mat(0.5 * (ejk + ekj)) : ejk;
  return {i * (ejk + ekj), std::move(dual)};
}

}  // namespace detail

// a-th element without materializing the whole basis.
inline DualElement dual_element(SpacePair pair, Eigen::Index n, std::size_t a) {
  const auto nn = static_cast<std::size_t>(n);
  switch (pair) {
    case SpacePair::u0_b0:
    case SpacePair::u0_herm0:
      return detail::diagonal_element(n, static_cast<Eigen::Index>(a));
    case SpacePair::u_b:
      if (a < nn) return detail::diagonal_element(n, static_cast<Eigen::Index>(a));
      return detail::off_element(n, a - nn, false);
    case SpacePair::u_herm:
      if (a < nn) return detail::diagonal_element(n, static_cast<Eigen::Index>(a));
      return detail::off_element(n, a - nn, true);
    case SpacePair::uperp_bplus:
      return detail::off_element(n, a, false);
    case SpacePair::uperp_hermperp:
      return detail::off_element(n, a, true);
  }
  throw dimension_error("dual_element: unknown pair");
}

inline std::vector<DualElement> dual_basis(SpacePair pair, Eigen::Index n) {
  std::vector<DualElement> out;
  const std::size_t size = dual_basis_size(pair, n);
  out.reserve(size);
  for (std::size_t a = 0; a < size; ++a) out.push_back(dual_element(pair, n, a));
  return out;
}

// ---------------------------------------------------------------------------
// Exponentials

// e^{X} for anti-Hermitian X, through the spectrum of the Hermitian -iX.
inline Mat expm_skew(const Mat& x) {
  const cplx i(0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(-i * x));
  const auto& v = es.eigenvectors();
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) phases(j) = std::polar(1.0, es.eigenvalues()(j));
  return v * phases.asDiagonal() * v.adjoint();
}

// e^{X} for strictly upper triangular X; the series terminates at X^{n-1}.
inline Mat exp_nilpotent(const Mat& x) {
  const auto n = x.rows();
  Mat result = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    term = (term * x) / static_cast<double>(k);
    result += term;
  }
  // exact triangular structure: unit diagonal, zero lower part
  result.diagonal().setOnes();
  result.triangularView<Eigen::StrictlyLower>().setZero();
  return result;
}

}  // namespace rsh
