#pragma once

// Free Hamiltonians, the exact flow (g, L) -> (exp(i t L^k) g, L), projection
// to T^n_reg x Herm(n), trajectories, and the model Hamiltonians in the
// Ruijsenaars and Sutherland charts.

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rsh/coords.hpp"

namespace rsh {

// H_k(L) = tr(L^k)/k from the spectrum of L.
inline double hk(const HermitianMat& L, int k) {
  if (k < 1) throw error("hk: k must be >= 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(L.matrix(), Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
    sum += std::pow(es.eigenvalues()(j), k);
  return sum / k;
}

namespace detail {

// Closest unitary matrix (polar factor).
inline Mat nearest_unitary(const Mat& g) {
  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline double principal_phase(cplx z) {
  double a = std::arg(z);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  if (a >= 2.0 * std::numbers::pi) a -= 2.0 * std::numbers::pi;
  return a;
}

inline double circular_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

}  // namespace detail

// exp(i t L^k), through the spectral decomposition of L.
inline Mat flow_propagator(const HermitianMat& L, int k, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(L.matrix());
  const auto& v = es.eigenvectors();
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j)
    phases(j) = std::polar(1.0, t * std::pow(es.eigenvalues()(j), k));
  return v * phases.asDiagonal() * v.adjoint();
}

inline FullPoint flow(const FullPoint& x0, int k, double t) {
  if (k < 1) throw error("flow: k must be >= 1");
  Mat g = flow_propagator(x0.L, k, t) * x0.g.matrix();
  if (UnitaryMat::unitarity_defect(g) > 1e-13) g = detail::nearest_unitary(g);
  return FullPoint(UnitaryMat(std::move(g)), x0.L);
}

struct Reduction {
  RedPoint point;  // (Q, eta^dagger L eta)
  UnitaryMat eta;  // g = eta Q eta^dagger
};

// Diagonalizes g by a unitary Schur decomposition. Phases of Q are sorted in
// [0, 2pi); each eigenvector is rotated so its largest-magnitude entry is
// real positive.
inline Reduction reduce_point(const FullPoint& x, const Config& cfg = {}) {
  const auto n = x.dim();
  Eigen::ComplexSchur<Mat> schur(x.g.matrix());
  const Mat& T = schur.matrixT();
  const Mat& U = schur.matrixU();

  RVec phase(n);
  for (Eigen::Index j = 0; j < n; ++j) phase(j) = detail::principal_phase(T(j, j));
  if (!(TorusReg::gap_of(phase) > cfg.regularity_gap))
    throw regularity_error("reduce_point: eigenvalue collision (gap " +
                           std::to_string(TorusReg::gap_of(phase)) + ")");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (phase(a) != phase(b)) return phase(a) < phase(b);
    return U(0, a).real() < U(0, b).real();
  });

  RVec q(n);
  Mat eta(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[std::size_t(j)];
    q(j) = phase(src);
    Eigen::VectorXcd v = U.col(src);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::conj(v(imax)) / std::abs(v(imax));
    v(imax) = std::abs(v(imax));
    eta.col(j) = v;
  }
  TorusReg Q(std::move(q), cfg);
  HermitianMat L(eta.adjoint() * x.L.matrix() * eta);
  return {RedPoint(std::move(Q), std::move(L)), UnitaryMat(std::move(eta))};
}

inline double reconstruction_defect(const Reduction& r, const FullPoint& x) {
  const Mat& eta = r.eta.matrix();
  return (eta * r.point.Q.matrix() * eta.adjoint() - x.g.matrix()).norm();
}

struct TrajectorySample {
  double t;
  RedPoint point;
  UnitaryMat eta;
  std::vector<double> conserved;  // h_1 .. h_K
  double gauge_defect;            // |eta Q eta^dagger - g(t)|
};

struct Trajectory {
  int k = 1;
  std::vector<TrajectorySample> samples;
  std::vector<std::string> warnings;
};

// Regularity was lost at sample `bad_index`; `partial` holds the samples before it.
class trajectory_error : public regularity_error {
 public:
  trajectory_error(const std::string& what, Trajectory partial_, std::size_t bad_index_)
      : regularity_error(what), partial(std::move(partial_)), bad_index(bad_index_) {}
  Trajectory partial;
  std::size_t bad_index;
};

struct Matching {
  std::vector<Eigen::Index> perm;  // current slot perm[j] continues previous slot j
  double cost;
  bool ambiguous;
};

// Minimal total circular distance assignment of current phases to previous
// ones. Exhaustive for n <= 8, greedy beyond.
inline Matching match_phases(const RVec& previous, const RVec& current) {
  const auto n = previous.size();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  auto cost_of = [&](const std::vector<Eigen::Index>& p) {
    double c = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      c += detail::circular_distance(previous(j), current(p[std::size_t(j)]));
    return c;
  };
  if (n <= 8) {
    double best = std::numeric_limits<double>::infinity();
    double second = best;
    std::vector<Eigen::Index> best_perm = perm;
    do {
      const double c = cost_of(perm);
      if (c < best) {
        second = best;
        best = c;
        best_perm = perm;
      } else if (c < second) {
        second = c;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best_perm, best, second - best <= 1e-12};
  }
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index pick = -1;
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < n; ++c) {
      if (used[std::size_t(c)]) continue;
      const double dc = detail::circular_distance(previous(j), current(c));
      if (dc < d) {
        d = dc;
        pick = c;
      }
    }
    used[std::size_t(pick)] = true;
    perm[std::size_t(j)] = pick;
  }
  return {perm, cost_of(perm), false};
}

inline Reduction permute_reduction(const Reduction& r, const std::vector<Eigen::Index>& perm) {
  const auto n = r.point.dim();
  RVec q(n);
  Mat eta(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    q(j) = r.point.Q.phases()(perm[std::size_t(j)]);
    eta.col(j) = r.eta.matrix().col(perm[std::size_t(j)]);
  }
  Mat P = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) P(perm[std::size_t(j)], j) = 1.0;
  HermitianMat L(P.adjoint() * r.point.L.matrix() * P);
  return {RedPoint(TorusReg(std::move(q), Config{0.0, 0.0, false}), std::move(L)),
          UnitaryMat(std::move(eta))};
}

// Flow samples at t_grid, reduced and permutation-matched between
// consecutive samples. K = 0 records h_1..h_n.
inline Trajectory trajectory(const FullPoint& x0, int k, const std::vector<double>& t_grid,
                             int K = 0, const Config& cfg = {}) {
  const int nk = K > 0 ? K : int(x0.dim());
  Trajectory traj;
  traj.k = k;
  for (std::size_t s = 0; s < t_grid.size(); ++s) {
    const double t = t_grid[s];
    const FullPoint x = flow(x0, k, t);
    Reduction r = [&] {
      try {
        return reduce_point(x, cfg);
      } catch (const regularity_error& e) {
        throw trajectory_error("trajectory: regularity lost at sample " + std::to_string(s) +
                                   " (t = " + std::to_string(t) + "): " + e.what(),
                               traj, s);
      }
    }();
    if (!traj.samples.empty()) {
      const Matching m = match_phases(traj.samples.back().point.Q.phases(), r.point.Q.phases());
      if (m.ambiguous)
        traj.warnings.push_back("sample " + std::to_string(s) +
                                ": permutation matching ambiguous within 1e-12");
      r = permute_reduction(r, m.perm);
    }
    std::vector<double> conserved;
    for (int l = 1; l <= nk; ++l) conserved.push_back(hk(r.point.L, l));
    const double defect = reconstruction_defect(r, x);
    traj.samples.push_back({t, r.point, r.eta, std::move(conserved), defect});
  }
  return traj;
}

// sum_i e^{2p_i} V_i(Q,lambda), V_i = (b+ b+^dagger)_ii
inline double h_rs(const RSPoint& x, const Config& cfg = {}) {
  const UnipotentUpper bplus = solve_bplus(x.Q, x.lambda, cfg);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.dim(); ++i)
    sum += std::exp(2.0 * x.p(i)) * bplus.matrix().row(i).squaredNorm();
  return sum;
}

// 1/2 sum p_i^2 + 1/8 sum_{j!=l} |phi_jl|^2 / sin^2((q_j - q_l)/2)
inline double h_suth2(const SuthPoint& x, const Config& cfg = {}) {
  double kinetic = 0.5 * x.p.squaredNorm();
  double potential = 0.0;
  const RVec& q = x.Q.phases();
  for (Eigen::Index j = 0; j < x.dim(); ++j)
    for (Eigen::Index l = 0; l < x.dim(); ++l) {
      if (j == l) continue;
      const double s = std::sin(0.5 * (q(j) - q(l)));
      if (!(2.0 * std::abs(s) > cfg.regularity_gap))
        throw regularity_error("h_suth2: Q not regular");
      potential += std::norm(x.phi(j, l)) / (s * s);
    }
  return kinetic + potential / 8.0;
}

}  // namespace rsh
