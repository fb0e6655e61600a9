#pragma once

#include <utility>
#include <vector>

#include "qwalk/linalg.hpp"

namespace qwalk {

/// A 2x2 unitary acting on the 1-based index pair (a, b), a < b. Row/column 0
/// of u refers to a, row/column 1 to b.
struct PairRotation {
  int a = 0;
  int b = 0;
  Matrix2c u = Matrix2c::Identity();
};

/// One layer of n/2 disjoint, simultaneous pair rotations between kd+r and
/// kd+r+d/2 (k = 0..n/d-1, r = 1..d/2).
struct Stage {
  int d = 0;
  std::vector<PairRotation> rotations;

  /// Dense n x n matrix of the stage.
  CMatrix matrix(int n) const;
};

/// Stages in application order: stages.front() acts first, so the realized
/// unitary is S_last * ... * S_1.
struct StageSequence {
  int n = 0;
  std::vector<Stage> stages;
};

/// The n/2 index pairs of a stride-d stage, sorted by first index. Requires
/// n a power of two and d an even power of two dividing n.
std::vector<std::pair<int, int>> stage_pairs(int n, int d);

/// Stride of each stage emitted by cs_decompose for dimension n: the
/// sequence for n is the one for n/2, then n, then the one for n/2 again.
std::vector<int> stride_schedule(int n);

/// Throws std::invalid_argument if the stage's pairs are not exactly the
/// stage_pairs(n, d) pattern or any block is non-unitary beyond `tol`.
void validate_stage(const Stage& stage, int n, double tol = 1e-12);

/// Recursive cosine-sine factorization of a unitary into n-1 stages.
/// n must be a power of two >= 2 and U unitary within 1e-10.
StageSequence cs_decompose(const CMatrix& u);

/// Product of the stage matrices; the identity for an empty sequence.
CMatrix reconstruct(const StageSequence& seq);

/// Applies every pair rotation of the stage to a length-n amplitude vector.
CVector apply_stage(const CVector& line, const Stage& stage);

/// diag(u, I) up to the next power of two.
CMatrix pad_to_power_of_two(const CMatrix& u);

}  // namespace qwalk
