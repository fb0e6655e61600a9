#include <cmath>

#include <doctest.h>

#include "qwalk/conveyor.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/random.hpp"

using namespace qwalk;

namespace {

Stage random_stage(int n, int d, Rng& rng) {
  Stage st{d, {}};
  for (auto [a, b] : stage_pairs(n, d)) st.rotations.push_back({a, b, haar_unitary(2, rng)});
  return st;
}

// Logical reference: apply the stage to one row (or column) of the grid.
WalkState logical_stage(const WalkState& s, const Stage& st, Orientation o, int line) {
  CMatrix a = s.amplitudes();
  if (o == Orientation::Horizontal) {
    a.row(line - 1) = apply_stage(a.row(line - 1).transpose(), st).transpose();
  } else {
    a.col(line - 1) = apply_stage(a.col(line - 1), st);
  }
  return WalkState(a);
}

}  // namespace

TEST_CASE("embed and extract") {
  const PhysicalGrid g = embed(init_localized(2, 1, 1));
  CHECK(g.amplitudes().rows() == 4);
  CHECK(g.amplitudes()(0, 0) == Complex(1.0));
  CHECK(g.amplitudes().cwiseAbs().sum() == 1.0);
  CHECK(extract(g) == init_localized(2, 1, 1));

  Rng rng(1);
  const WalkState s = random_walk_state(5, rng);
  const PhysicalGrid e = embed(s);
  CHECK(std::abs(e.norm_squared() - s.norm_squared()) < 1e-15);
  CHECK(e.max_register_amplitude() == 0.0);
  CHECK(extract(e) == s);

  const PhysicalGrid moved = pi_transfer(e, {2}, Orientation::Horizontal, 3);
  CHECK_THROWS_AS(extract(moved), ProtocolError);
}

TEST_CASE("pi_transfer") {
  const PhysicalGrid g = embed(init_localized(2, 1, 1));
  const PhysicalGrid t = pi_transfer(g, {1}, Orientation::Horizontal, 1);
  CHECK(t.on_line(Orientation::Horizontal, 1, 2) == Complex(1.0));
  CHECK(t.on_line(Orientation::Horizontal, 1, 1) == Complex(0.0));
  CHECK(pi_transfer(t, {1}, Orientation::Horizontal, 1).amplitudes() == g.amplitudes());

  Rng rng(2);
  const PhysicalGrid r = embed(random_walk_state(6, rng));
  for (Orientation o : {Orientation::Horizontal, Orientation::Vertical}) {
    const PhysicalGrid x = pi_transfer(r, {1, 3, 4, 6}, o, 2);
    CHECK(std::abs(x.norm_squared() - r.norm_squared()) < 1e-15);
    CHECK(pi_transfer(x, {1, 3, 4, 6}, o, 2).amplitudes() == r.amplitudes());
  }
  CHECK_THROWS(pi_transfer(r, {7}, Orientation::Horizontal, 1));
  CHECK_THROWS(pi_transfer(r, {1}, Orientation::Horizontal, 7));
}

TEST_CASE("shift_register") {
  PhysicalGrid g(4);
  g.on_line(Orientation::Horizontal, 2, 2) = 1.0;  // register column 2
  CHECK(shift_register(g, 0, Orientation::Horizontal, 2).amplitudes() == g.amplitudes());
  const PhysicalGrid s = shift_register(g, 4, Orientation::Horizontal, 2);
  CHECK(s.on_line(Orientation::Horizontal, 2, 6) == Complex(1.0));
  CHECK(s.on_line(Orientation::Horizontal, 2, 2) == Complex(0.0));
  CHECK(shift_register(s, -4, Orientation::Horizontal, 2).amplitudes() == g.amplitudes());

  // data sites are untouched
  Rng rng(3);
  const PhysicalGrid d = embed(random_walk_state(4, rng));
  CHECK(shift_register(d, 2, Orientation::Vertical, 3).amplitudes() == d.amplitudes());

  CHECK_THROWS_AS(shift_register(g, 3, Orientation::Horizontal, 2), std::invalid_argument);
  CHECK_THROWS_AS(shift_register(g, -2, Orientation::Horizontal, 2), ProtocolError);
  CHECK_THROWS_AS(shift_register(g, 8, Orientation::Horizontal, 2), ProtocolError);
}

TEST_CASE("rotate_pairs") {
  Rng rng(4);
  const WalkState s = random_walk_state(4, rng);
  Stage ident{4, {{1, 3, Matrix2c::Identity()}, {2, 4, Matrix2c::Identity()}}};
  const PhysicalGrid prepared =
      shift_register(pi_transfer(embed(s), {1, 2}, Orientation::Horizontal, 1), 4,
                     Orientation::Horizontal, 1);
  CHECK(rotate_pairs(prepared, ident, Orientation::Horizontal, 1).amplitudes() ==
        prepared.amplitudes());

  const Stage st = random_stage(4, 4, rng);
  CHECK(std::abs(rotate_pairs(prepared, st, Orientation::Horizontal, 1).norm_squared() -
                 prepared.norm_squared()) < 1e-14);

  // Unshifted registers are not adjacent to their partners.
  const PhysicalGrid unshifted = pi_transfer(embed(s), {1, 2}, Orientation::Horizontal, 1);
  CHECK_THROWS_AS(rotate_pairs(unshifted, st, Orientation::Horizontal, 1), ProtocolError);
}

TEST_CASE("swap through the full protocol") {
  Matrix2c x;
  x << 0, 1, 1, 0;
  const Stage st{4, {{1, 3, x}, {2, 4, Matrix2c::Identity()}}};
  const WalkState s = init_localized(4, 2, 1);
  const WalkState out = extract(run_stage(embed(s), st, Orientation::Horizontal, 2));
  CHECK(out == init_localized(4, 2, 3));
}

TEST_CASE("run_stage matches the logical stage") {
  Rng rng(5);
  for (int n : {2, 4, 8, 16}) {
    for (int trial = 0; trial < 20; ++trial) {
      int d = 2;
      const int levels = static_cast<int>(std::log2(n));
      d <<= static_cast<int>(rng() % levels);
      const Stage st = random_stage(n, d, rng);
      const Orientation o = trial % 2 ? Orientation::Vertical : Orientation::Horizontal;
      const int line = 1 + static_cast<int>(rng() % n);
      const WalkState s = random_walk_state(n, rng);
      const PhysicalGrid g = run_stage(embed(s), st, o, line);
      CHECK(g.max_register_amplitude() < 1e-12);
      CHECK(max_abs_diff(extract(g).amplitudes(),
                         logical_stage(s, st, o, line).amplitudes()) < 1e-12);
    }
  }
  const WalkState s = random_walk_state(8, rng);
  Stage ident{8, {}};
  for (auto [a, b] : stage_pairs(8, 8)) ident.rotations.push_back({a, b, Matrix2c::Identity()});
  CHECK(extract(run_stage(embed(s), ident, Orientation::Vertical, 4)) == s);
}

TEST_CASE("trace of a d=4 stage on n=8") {
  Rng rng(6);
  ProtocolTrace trace;
  run_stage(embed(random_walk_state(8, rng)), random_stage(8, 4, rng), Orientation::Horizontal, 3,
            &trace);
  REQUIRE(trace.actions.size() == 5);
  const ActionKind kinds[] = {ActionKind::PiTransfer, ActionKind::Shift, ActionKind::Rotate,
                              ActionKind::Shift, ActionKind::PiTransfer};
  for (int i = 0; i < 5; ++i) {
    CHECK(trace.actions[i].step == i + 1);
    CHECK(trace.actions[i].kind == kinds[i]);
    CHECK(trace.actions[i].line == 3);
  }
  CHECK(trace.actions[0].params == "positions=1,2,5,6");
  CHECK(trace.actions[1].params == "offset=+4");
  CHECK(trace.actions[2].params == "d=4;pairs=(1:3),(2:4),(5:7),(6:8)");
  CHECK(trace.actions[3].params == "offset=-4");
  CHECK(trace.actions[4].params == "positions=1,2,5,6");
  const std::string text = trace.to_text();
  CHECK(text.find("STEP 1 ACTION=pi_transfer line=3 orient=H params=positions=1,2,5,6\n") == 0);
  CHECK(text.find("STEP 2 ACTION=shift line=3 orient=H params=offset=+4\n") != std::string::npos);
}

TEST_CASE("run_walk_physical") {
  Rng rng(7);
  for (int n : {2, 4, 8}) {
    CoinPlan plan;
    for (int i = 0; i < 10; ++i) {
      std::vector<CMatrix> cs;
      for (int j = 0; j < n; ++j) cs.push_back(haar_unitary(n, rng));
      plan.steps.emplace_back(std::move(cs));
    }
    const WalkState s0 = random_walk_state(n, rng);
    PhysicalRunStats stats;
    const WalkState phys = run_walk_physical(s0, plan, &stats);
    CHECK(max_abs_diff(phys.amplitudes(), evolve(s0, 10, plan).amplitudes()) < 1e-10);
    CHECK(std::abs(phys.norm_squared() - 1.0) < 1e-10);
    CHECK(stats.stages_run == 10L * n * (n - 1));
    CHECK(stats.max_register_residual < 1e-12);
  }
  const WalkState s0 = random_walk_state(4, rng);
  const CoinPlan ident = CoinPlan::repeated(CoinSet::uniform(CMatrix::Identity(4, 4)), 3);
  CHECK(max_abs_diff(run_walk_physical(s0, ident).amplitudes(), s0.amplitudes()) < 1e-15);
}

TEST_CASE("run_walk_physical pads non-power-of-two graphs") {
  Rng rng(8);
  const Graph g = remove_edge(complete_graph(5), 1, 3);
  const CoinPlan plan = CoinPlan::repeated(graph_coins(g, CoinKind::Grover), 6);
  const WalkState s0 = init_localized(5, 2, 4);
  CHECK(max_abs_diff(run_walk_physical(s0, plan).amplitudes(), evolve(s0, 6, plan).amplitudes()) <
        1e-10);
}
