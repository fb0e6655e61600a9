#pragma once

#include <cstdint>
#include <random>

#include "qwalk/linalg.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

using Rng = std::mt19937_64;

/// Haar-distributed n x n unitary (QR of a complex Ginibre matrix with the
/// R-diagonal phases folded back in).
CMatrix haar_unitary(int n, Rng& rng);

/// Uniformly random unit vector in C^n.
CVector random_unit_vector(int n, Rng& rng);

WalkState random_walk_state(int n, Rng& rng);

}  // namespace qwalk
