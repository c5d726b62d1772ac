#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rsh {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// Elements of gl(n,C) viewed as a real Lie algebra. Subspace roles
// (u(n), b(n), Herm(n), ...) are carried by the functions that produce them.
using GlElement = Mat;

inline constexpr const char* version = "0.1.0";

// Numerical margins for the open charts.
struct Config {
  double regularity_gap = 1e-6;  // min |e^{iq_j} - e^{iq_k}|
  double pd_floor = 1e-10;       // min eigenvalue of a positive definite L
  bool strict_subspace = false;  // error instead of silently projecting
};

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class dimension_error : public error {
 public:
  using error::error;
};

// Q left T^n_reg (or g left M_reg).
class regularity_error : public error {
 public:
  using error::error;
};

class not_positive_definite : public error {
 public:
  using error::error;
};

// Strict-mode projection discarded more than the allowed amount.
class subspace_error : public error {
 public:
  using error::error;
};

class invariant_error : public error {
 public:
  using error::error;
};

inline void require_same_dim(const Mat& a, const Mat& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw dimension_error(std::string(where) + ": dimension mismatch (" +
                          std::to_string(a.rows()) + " vs " +
                          std::to_string(b.rows()) + ")");
}

inline void require_square(const Mat& a, const char* where) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw dimension_error(std::string(where) + ": expected a square matrix");
}

inline Mat unit_matrix(Eigen::Index n, Eigen::Index j, Eigen::Index k,
                       cplx value = 1.0) {
  Mat e = Mat::Zero(n, n);
  e(j, k) = value;
  return e;
}

}  // namespace rsh
