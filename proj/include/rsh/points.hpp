#pragma once

// Points of the four charts: the unreduced phase space U(n) x Herm(n), the
// reduced chart T^n_reg x Herm(n), and the Ruijsenaars (Q,p,lambda) and
// Sutherland (Q,p,phi) charts.

#include <string_view>

#include "rsh/algebra.hpp"

namespace rsh {

enum class ChartKind { full, red, rs, suth };

inline std::string_view chart_name(ChartKind c) {
  switch (c) {
    case ChartKind::full: return "full";
    case ChartKind::red: return "red";
    case ChartKind::rs: return "rs";
    case ChartKind::suth: return "suth";
  }
  return "?";
}

struct FullPoint {
  UnitaryMat g;
  HermitianMat L;

  FullPoint(UnitaryMat g_, HermitianMat L_) : g(std::move(g_)), L(std::move(L_)) {
    if (g.dim() != L.dim()) throw dimension_error("FullPoint: g and L differ in size");
  }
  Eigen::Index dim() const { return g.dim(); }
};

struct RedPoint {
  TorusReg Q;
  HermitianMat L;

  RedPoint(TorusReg Q_, HermitianMat L_) : Q(std::move(Q_)), L(std::move(L_)) {
    if (Q.dim() != L.dim()) throw dimension_error("RedPoint: Q and L differ in size");
  }
  Eigen::Index dim() const { return Q.dim(); }

  // (Q,L) viewed as a point of U(n) x Herm(n).
  FullPoint as_full() const { return FullPoint(UnitaryMat(Q.matrix()), L); }
};

struct RSPoint {
  TorusReg Q;
  RVec p;  // diagonal of the real diagonal matrix p
  UnipotentUpper lambda;

  RSPoint(TorusReg Q_, RVec p_, UnipotentUpper lambda_)
      : Q(std::move(Q_)), p(std::move(p_)), lambda(std::move(lambda_)) {
    if (Q.dim() != p.size() || Q.dim() != lambda.dim())
      throw dimension_error("RSPoint: component sizes differ");
  }
  Eigen::Index dim() const { return Q.dim(); }
};

struct SuthPoint {
  TorusReg Q;
  RVec p;
  Mat phi;  // Hermitian, zero diagonal

  SuthPoint(TorusReg Q_, RVec p_, const Mat& phi_, bool strict = false)
      : Q(std::move(Q_)), p(std::move(p_)), phi(enforce(phi_, Subspace::herm_perp, strict)) {
    if (Q.dim() != p.size() || Q.dim() != phi.rows())
      throw dimension_error("SuthPoint: component sizes differ");
  }
  Eigen::Index dim() const { return Q.dim(); }
};

inline Mat diag_matrix(const RVec& p) {
  return p.cast<cplx>().asDiagonal();
}

}  // namespace rsh
