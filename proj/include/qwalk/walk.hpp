#pragma once

#include <vector>

#include "qwalk/graph.hpp"
#include "qwalk/linalg.hpp"

namespace qwalk {

/// Walker state on the n x n grid: amplitude (j,k) is node j with coin
/// pointing at node k. Rows are nodes, columns are coin states.
class WalkState {
 public:
  /// Takes a square amplitude grid. Throws if it is empty or its norm is
  /// off by more than 1e-9.
  explicit WalkState(CMatrix amplitudes);

  int size() const noexcept { return static_cast<int>(amp_.rows()); }
  const CMatrix& amplitudes() const noexcept { return amp_; }

  /// 1-based access.
  Complex at(int j, int k) const { return amp_(j - 1, k - 1); }

  double norm_squared() const { return amp_.squaredNorm(); }
  WalkState transposed() const { return WalkState(amp_.transpose()); }

  friend bool operator==(const WalkState& a, const WalkState& b) {
    return a.amp_.rows() == b.amp_.rows() && a.amp_ == b.amp_;
  }

 private:
  CMatrix amp_;
};

/// Coins for one half-step: either one matrix shared by every line or one
/// matrix per line (row for H, column for V). Each must be unitary to 1e-12.
struct CoinSet {
  std::vector<CMatrix> coins;

  CoinSet() = default;
  explicit CoinSet(std::vector<CMatrix> per_line);
  static CoinSet uniform(CMatrix coin);

  bool is_uniform() const noexcept { return coins.size() == 1; }
  int dimension() const { return coins.empty() ? 0 : static_cast<int>(coins.front().rows()); }
  /// Coin for 1-based line j.
  const CMatrix& for_line(int j) const { return is_uniform() ? coins.front() : coins.at(j - 1); }
};

enum class Orientation { Horizontal, Vertical };

/// Step i (0-based) of a plan acts on rows when i is even and on columns when
/// i is odd, so the first application is horizontal.
inline Orientation orientation_of_step(int step) {
  return step % 2 == 0 ? Orientation::Horizontal : Orientation::Vertical;
}

struct CoinPlan {
  std::vector<CoinSet> steps;

  /// The same coin set repeated for `count` steps.
  static CoinPlan repeated(const CoinSet& coins, int count);
};

struct Distribution {
  std::vector<double> p;

  double total() const;
  /// Mean and standard deviation of the 1-based position.
  double mean() const;
  double stddev() const;
};

/// Least-squares line y = slope * x + intercept with its R^2.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

WalkState init_localized(int n, int j, int k);

Matrix2c hadamard_coin();
/// Entries 2/n - delta_jk.
CMatrix grover_coin(int n);
/// Entries exp(2 pi i jk / n) / sqrt(n), 0-based j, k.
CMatrix dft_coin(int n);

/// Embeds `sub` on the indices where `mask` is true (ascending order) and
/// leaves every masked-out basis state fixed. sub must be popcount(mask)
/// square; an all-false mask takes a 0x0 sub and returns the identity.
CMatrix mask_coin(const CMatrix& sub, const std::vector<bool>& mask);

enum class CoinKind { Grover, Dft, Hadamard };

/// Per-node coins for a graph: node j gets the chosen coin at dimension
/// deg(j) embedded on its neighbor set. Hadamard requires every node of
/// degree 2 (or 0).
CoinSet graph_coins(const Graph& g, CoinKind kind);

/// Row j becomes coin_j * row_j.
WalkState apply_coin_rows(const WalkState& s, const CoinSet& coins);
/// Column k becomes coin_k * column_k.
WalkState apply_coin_cols(const WalkState& s, const CoinSet& coins);

/// One grid half-step: step_index fixes the orientation (even = rows).
WalkState evolve_step(const WalkState& s, int step_index, const CoinSet& coins);

/// Alternating row/column coin applications, starting with rows. Throws if
/// the plan has fewer than `steps` entries.
WalkState evolve(const WalkState& s0, int steps, const CoinPlan& plan);

/// Coin on rows followed by the transpose translation |j,k> -> |k,j>, once
/// per step. Independent of evolve; agrees with it for even step counts.
WalkState reference_evolve(const WalkState& s0, int steps, const CoinPlan& plan);

/// p_j = sum_k |A_jk|^2.
Distribution position_distribution(const WalkState& s);

/// After an odd number of grid half-steps the nodes sit on the columns; this
/// returns the state with nodes back on the rows (a transpose) in that case.
WalkState walker_frame(const WalkState& s, int steps);

}  // namespace qwalk
