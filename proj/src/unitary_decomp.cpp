#include "qwalk/unitary_decomp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr double kInputUnitarityTol = 1e-10;
// Sines below this are treated as exactly zero when choosing free columns.
constexpr double kNullSine = 1e-13;

// U = diag(l1, l2) * [[C, -S], [S, C]] * diag(r1, r2) with C = diag(cos theta),
// S = diag(sin theta).
struct CosineSine {
  CMatrix l1, l2, r1, r2;
  Eigen::VectorXd theta;
};

// Nearest unitary in the Frobenius sense.
CMatrix reorthogonalize(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CosineSine cosine_sine(const CMatrix& u) {
  const Eigen::Index m = u.rows() / 2;
  const CMatrix u11 = u.topLeftCorner(m, m);
  const CMatrix u12 = u.topRightCorner(m, m);
  const CMatrix u21 = u.bottomLeftCorner(m, m);
  const CMatrix u22 = u.bottomRightCorner(m, m);

  CosineSine f;
  Eigen::JacobiSVD<CMatrix> svd(u11, Eigen::ComputeFullU | Eigen::ComputeFullV);
  f.l1 = svd.matrixU();
  const CMatrix v = svd.matrixV();
  f.r1 = v.adjoint();
  Eigen::VectorXd c = svd.singularValues().cwiseMin(1.0);

  // Columns of u21 * v are orthogonal with norms sin(theta). Factor them with
  // the largest norms first so the small ones only pick up O(eps) error.
  CMatrix q(m, m);
  for (Eigen::Index i = 0; i < m; ++i) q.col(i) = u21 * v.col(m - 1 - i);
  Eigen::HouseholderQR<CMatrix> qr(q);
  const CMatrix qfull = qr.householderQ() * CMatrix::Identity(m, m);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  f.l2.resize(m, m);
  Eigen::VectorXd s(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Complex diag = r(i, i);
    const double mag = std::abs(diag);
    const Complex phase = mag > 0.0 ? diag / mag : Complex(1.0);
    f.l2.col(m - 1 - i) = qfull.col(i) * phase;
    s(m - 1 - i) = mag;
  }
  // Columns with vanishing sine are free; complete them from the standard
  // basis so degenerate inputs (e.g. block-diagonal U) map to plain factors.
  std::vector<Eigen::Index> free_cols;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (s(i) < kNullSine) free_cols.push_back(i);
  }
  if (!free_cols.empty()) {
    std::vector<char> fixed(m, 1);
    for (auto i : free_cols) fixed[i] = 0;
    for (auto i : free_cols) {
      for (Eigen::Index tries = 0; tries < m; ++tries) {
        const Eigen::Index e = (i + tries) % m;
        CVector col = CVector::Unit(m, e);
        for (int pass = 0; pass < 2; ++pass) {
          for (Eigen::Index j = 0; j < m; ++j) {
            if (fixed[j]) col -= f.l2.col(j) * f.l2.col(j).dot(col);
          }
        }
        if (col.norm() > 0.5) {
          f.l2.col(i) = col.normalized();
          fixed[i] = 1;
          break;
        }
      }
    }
  }

  f.theta.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) f.theta(i) = std::atan2(s(i), c(i));
  const Eigen::VectorXd cos_t = f.theta.array().cos();
  const Eigen::VectorXd sin_t = f.theta.array().sin();

  // Right block column is diag(l1,l2) [[-S r2], [C r2]]; recover r2 = C y - S x.
  const CMatrix x = f.l1.adjoint() * u12;
  const CMatrix y = f.l2.adjoint() * u22;
  CMatrix r2 = cos_t.asDiagonal() * y - sin_t.asDiagonal() * x;
  f.r2 = reorthogonalize(r2);
  return f;
}

std::vector<Stage> merge_halves(std::vector<Stage> lower, const std::vector<Stage>& upper,
                                int offset) {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    for (PairRotation rot : upper[i].rotations) {
      rot.a += offset;
      rot.b += offset;
      lower[i].rotations.push_back(rot);
    }
  }
  return lower;
}

std::vector<Stage> decompose_block(const CMatrix& u) {
  const int n = static_cast<int>(u.rows());
  if (n == 2) {
    Stage st;
    st.d = 2;
    st.rotations.push_back(PairRotation{1, 2, u});
    return {st};
  }
  const int m = n / 2;
  const CosineSine f = cosine_sine(u);

  std::vector<Stage> out = merge_halves(decompose_block(f.r1), decompose_block(f.r2), m);
  Stage middle;
  middle.d = n;
  for (int r = 1; r <= m; ++r) {
    const double c = std::cos(f.theta(r - 1)), s = std::sin(f.theta(r - 1));
    Matrix2c rot;
    rot << c, -s, s, c;
    middle.rotations.push_back(PairRotation{r, r + m, rot});
  }
  out.push_back(std::move(middle));
  auto left = merge_halves(decompose_block(f.l1), decompose_block(f.l2), m);
  out.insert(out.end(), left.begin(), left.end());
  return out;
}

}  // namespace

CMatrix Stage::matrix(int n) const {
  CMatrix m = CMatrix::Identity(n, n);
  for (const auto& rot : rotations) {
    if (rot.a < 1 || rot.b > n || rot.a >= rot.b) throw std::out_of_range("stage pair out of range");
    m(rot.a - 1, rot.a - 1) = rot.u(0, 0);
    m(rot.a - 1, rot.b - 1) = rot.u(0, 1);
    m(rot.b - 1, rot.a - 1) = rot.u(1, 0);
    m(rot.b - 1, rot.b - 1) = rot.u(1, 1);
  }
  return m;
}

std::vector<std::pair<int, int>> stage_pairs(int n, int d) {
  if (!is_power_of_two(n) || n < 2) {
    throw std::invalid_argument("stage_pairs: n must be a power of two >= 2");
  }
  if (d < 2 || d > n || !is_power_of_two(d)) {
    throw std::invalid_argument("stage_pairs: stride " + std::to_string(d) +
                                " is not a power-of-two divisor of " + std::to_string(n));
  }
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n / 2);
  for (int k = 0; k < n / d; ++k) {
    for (int r = 1; r <= d / 2; ++r) pairs.emplace_back(k * d + r, k * d + r + d / 2);
  }
  return pairs;
}

std::vector<int> stride_schedule(int n) {
  if (n < 2 || !is_power_of_two(n)) throw std::invalid_argument("stride_schedule: bad n");
  if (n == 2) return {2};
  auto half = stride_schedule(n / 2);
  std::vector<int> out = half;
  out.push_back(n);
  out.insert(out.end(), half.begin(), half.end());
  return out;
}

void validate_stage(const Stage& stage, int n, double tol) {
  const auto expected = stage_pairs(n, stage.d);
  if (stage.rotations.size() != expected.size()) {
    throw std::invalid_argument("stage has " + std::to_string(stage.rotations.size()) +
                                " rotations, expected " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& rot = stage.rotations[i];
    if (rot.a != expected[i].first || rot.b != expected[i].second) {
      throw std::invalid_argument("stage pair (" + std::to_string(rot.a) + "," +
                                  std::to_string(rot.b) + ") breaks the stride-" +
                                  std::to_string(stage.d) + " pattern");
    }
    if (unitarity_defect(rot.u) >= tol) {
      throw std::invalid_argument("pair rotation is not unitary");
    }
  }
}

StageSequence cs_decompose(const CMatrix& u) {
  const int n = static_cast<int>(u.rows());
  if (u.rows() != u.cols()) throw std::invalid_argument("cs_decompose: matrix must be square");
  if (n < 2 || !is_power_of_two(n)) {
    throw std::invalid_argument("cs_decompose: dimension " + std::to_string(n) +
                                " is not a power of two >= 2; pad first");
  }
  const double defect = unitarity_defect(u);
  if (!(defect < kInputUnitarityTol)) {
    throw ToleranceError("cs_decompose: input is not unitary (defect " + std::to_string(defect) +
                         ")");
  }
  StageSequence seq;
  seq.n = n;
  seq.stages = decompose_block(u);
  return seq;
}

CMatrix reconstruct(const StageSequence& seq) {
  CMatrix out = CMatrix::Identity(seq.n, seq.n);
  for (const auto& st : seq.stages) out = st.matrix(seq.n) * out;
  return out;
}

CVector apply_stage(const CVector& line, const Stage& stage) {
  CVector out = line;
  const auto n = out.size();
  for (const auto& rot : stage.rotations) {
    if (rot.a < 1 || rot.b > n) throw std::out_of_range("stage pair outside the line");
    const Complex xa = out(rot.a - 1), xb = out(rot.b - 1);
    out(rot.a - 1) = rot.u(0, 0) * xa + rot.u(0, 1) * xb;
    out(rot.b - 1) = rot.u(1, 0) * xa + rot.u(1, 1) * xb;
  }
  return out;
}

CMatrix pad_to_power_of_two(const CMatrix& u) {
  const long n = u.rows();
  const long p = std::max(2L, next_power_of_two(n));
  CMatrix out = CMatrix::Identity(p, p);
  out.topLeftCorner(n, n) = u;
  return out;
}

}  // namespace qwalk
