#include "qwalk/random.hpp"

#include <cmath>

namespace qwalk {

namespace {

CMatrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  }
  return z;
}

}  // namespace

CMatrix haar_unitary(int n, Rng& rng) {
  const CMatrix z = ginibre(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

CVector random_unit_vector(int n, Rng& rng) {
  CVector v = ginibre(n, 1, rng).col(0);
  return v / v.norm();
}

WalkState random_walk_state(int n, Rng& rng) {
  CMatrix a = ginibre(n, n, rng);
  a /= a.norm();
  return WalkState(std::move(a));
}

}  // namespace qwalk
