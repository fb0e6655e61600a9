#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qwalk {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Matrix2c = Eigen::Matrix2cd;

/// max_ij |(U^H U - I)_ij|
inline double unitarity_defect(const CMatrix& u) {
  const CMatrix d = u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

inline long next_power_of_two(long n) {
  long p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace qwalk
