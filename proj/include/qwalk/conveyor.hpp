#pragma once

#include <string>
#include <vector>

#include "qwalk/linalg.hpp"
#include "qwalk/unitary_decomp.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

/// The 2n x 2n dot array. With 1-based physical coordinates, logical index p
/// sits on physical 2p-1 (data) and its register partner on 2p. A row line j
/// is physical row 2j-1 with its registers on the even columns; a column line
/// is the transpose of that picture.
class PhysicalGrid {
 public:
  explicit PhysicalGrid(int n);

  int logical_size() const noexcept { return n_; }
  const CMatrix& amplitudes() const noexcept { return amp_; }

  static int data_site(int p) { return 2 * p - 1; }
  static int register_site(int p) { return 2 * p; }

  /// 1-based physical position `pos` along logical line `line`.
  Complex& on_line(Orientation o, int line, int pos);
  Complex on_line(Orientation o, int line, int pos) const;

  /// Largest modulus over every non-data site.
  double max_register_amplitude() const;

  double norm_squared() const { return amp_.squaredNorm(); }

 private:
  int n_;
  CMatrix amp_;
};

enum class ActionKind { PiTransfer, Shift, Rotate };

struct ProtocolAction {
  int step = 0;  // 1..5 within a stage
  ActionKind kind = ActionKind::PiTransfer;
  int line = 0;
  Orientation orientation = Orientation::Horizontal;
  std::string params;
};

/// Ordered log of conveyor primitives.
struct ProtocolTrace {
  std::vector<ProtocolAction> actions;

  /// One line per action:
  /// STEP k ACTION=pi_transfer|shift|rotate line=<i> orient=<H|V> params=...
  std::string to_text() const;
};

PhysicalGrid embed(const WalkState& s);

/// Reads the data sites back. Throws ProtocolError if any register site holds
/// more than 1e-10.
WalkState extract(const PhysicalGrid& g);

/// Ideal pi rotation (plain exchange) between each listed logical position
/// and its register site.
PhysicalGrid pi_transfer(const PhysicalGrid& g, const std::vector<int>& positions, Orientation o,
                         int line);

/// Translates every register amplitude on the line by `offset` physical
/// cells. offset must be even; moving non-zero amplitude off the grid
/// throws ProtocolError.
PhysicalGrid shift_register(const PhysicalGrid& g, int offset, Orientation o, int line);

/// After a +d shift the register of b = a + d/2 carries a's amplitude; each
/// pair rotation mixes that register site with b's data site.
PhysicalGrid rotate_pairs(const PhysicalGrid& g, const Stage& stage, Orientation o, int line);

/// The five conveyor steps for one stage on one line: transfer, shift +d,
/// rotate, shift -d, transfer back. Appends the actions to `trace` if given.
PhysicalGrid run_stage(const PhysicalGrid& g, const Stage& stage, Orientation o, int line,
                       ProtocolTrace* trace = nullptr);

struct PhysicalRunStats {
  long stages_run = 0;
  long actions = 0;
  double max_register_residual = 0.0;
};

/// Decomposes every coin of every plan step and drives all lines through the
/// conveyor protocol. Dimensions that are not powers of two are padded with
/// fixed indices and cropped again on the way out.
WalkState run_walk_physical(const WalkState& s0, const CoinPlan& plan,
                            PhysicalRunStats* stats = nullptr);

}  // namespace qwalk
