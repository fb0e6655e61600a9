#include "qwalk/conveyor.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr double kExtractTol = 1e-10;
constexpr double kRegisterTol = 1e-12;

char orient_char(Orientation o) { return o == Orientation::Horizontal ? 'H' : 'V'; }

const char* action_name(ActionKind k) {
  switch (k) {
    case ActionKind::PiTransfer:
      return "pi_transfer";
    case ActionKind::Shift:
      return "shift";
    case ActionKind::Rotate:
      return "rotate";
  }
  return "?";
}

void check_line(const PhysicalGrid& g, int line) {
  if (line < 1 || line > g.logical_size()) {
    throw std::out_of_range("line " + std::to_string(line) + " outside [1, " +
                            std::to_string(g.logical_size()) + "]");
  }
}

}  // namespace

PhysicalGrid::PhysicalGrid(int n) : n_(n), amp_(CMatrix::Zero(2 * n, 2 * n)) {
  if (n < 1) throw std::invalid_argument("physical grid needs n >= 1");
}

Complex& PhysicalGrid::on_line(Orientation o, int line, int pos) {
  const int fixed = data_site(line) - 1;
  return o == Orientation::Horizontal ? amp_(fixed, pos - 1) : amp_(pos - 1, fixed);
}

Complex PhysicalGrid::on_line(Orientation o, int line, int pos) const {
  const int fixed = data_site(line) - 1;
  return o == Orientation::Horizontal ? amp_(fixed, pos - 1) : amp_(pos - 1, fixed);
}

double PhysicalGrid::max_register_amplitude() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < amp_.rows(); ++i) {
    for (Eigen::Index j = 0; j < amp_.cols(); ++j) {
      if (i % 2 == 0 && j % 2 == 0) continue;  // data site
      m = std::max(m, std::abs(amp_(i, j)));
    }
  }
  return m;
}

std::string ProtocolTrace::to_text() const {
  std::ostringstream os;
  for (const auto& a : actions) {
    os << "STEP " << a.step << " ACTION=" << action_name(a.kind) << " line=" << a.line
       << " orient=" << orient_char(a.orientation) << " params=" << a.params << '\n';
  }
  return os.str();
}

PhysicalGrid embed(const WalkState& s) {
  PhysicalGrid g(s.size());
  for (int j = 1; j <= s.size(); ++j) {
    for (int k = 1; k <= s.size(); ++k) {
      g.on_line(Orientation::Horizontal, j, PhysicalGrid::data_site(k)) = s.at(j, k);
    }
  }
  return g;
}

WalkState extract(const PhysicalGrid& g) {
  const double residual = g.max_register_amplitude();
  if (residual > kExtractTol) {
    throw ProtocolError("register sites still occupied (max amplitude " +
                        std::to_string(residual) + ")");
  }
  const int n = g.logical_size();
  CMatrix amp(n, n);
  for (int j = 1; j <= n; ++j) {
    for (int k = 1; k <= n; ++k) {
      amp(j - 1, k - 1) = g.on_line(Orientation::Horizontal, j, PhysicalGrid::data_site(k));
    }
  }
  return WalkState(std::move(amp));
}

PhysicalGrid pi_transfer(const PhysicalGrid& g, const std::vector<int>& positions, Orientation o,
                         int line) {
  check_line(g, line);
  PhysicalGrid out = g;
  for (int p : positions) {
    if (p < 1 || p > g.logical_size()) throw std::out_of_range("transfer position out of range");
    std::swap(out.on_line(o, line, PhysicalGrid::data_site(p)),
              out.on_line(o, line, PhysicalGrid::register_site(p)));
  }
  return out;
}

PhysicalGrid shift_register(const PhysicalGrid& g, int offset, Orientation o, int line) {
  check_line(g, line);
  if (offset % 2 != 0) throw std::invalid_argument("register shift must be even");
  if (offset == 0) return g;
  const int n = g.logical_size();
  PhysicalGrid out = g;
  for (int p = 1; p <= n; ++p) out.on_line(o, line, PhysicalGrid::register_site(p)) = 0.0;
  for (int p = 1; p <= n; ++p) {
    const Complex v = g.on_line(o, line, PhysicalGrid::register_site(p));
    const int target = PhysicalGrid::register_site(p) + offset;
    if (target < 1 || target > 2 * n) {
      if (v != Complex(0.0)) {
        throw ProtocolError("shift by " + std::to_string(offset) +
                            " pushes register amplitude off the grid at logical " +
                            std::to_string(p));
      }
      continue;
    }
    out.on_line(o, line, target) = v;
  }
  return out;
}

PhysicalGrid rotate_pairs(const PhysicalGrid& g, const Stage& stage, Orientation o, int line) {
  check_line(g, line);
  const int n = g.logical_size();
  std::vector<char> target(n + 1, 0);
  for (const auto& rot : stage.rotations) {
    if (rot.a < 1 || rot.b > n || rot.b - rot.a != stage.d / 2) {
      throw std::invalid_argument("rotation pair does not match stage stride");
    }
    target[rot.b] = 1;
  }
  for (int p = 1; p <= n; ++p) {
    if (!target[p] && std::abs(g.on_line(o, line, PhysicalGrid::register_site(p))) > kRegisterTol) {
      throw ProtocolError("register at logical " + std::to_string(p) +
                          " is occupied but not coupled by this stage");
    }
  }
  PhysicalGrid out = g;
  for (const auto& rot : stage.rotations) {
    Complex& carried = out.on_line(o, line, PhysicalGrid::register_site(rot.b));
    Complex& data = out.on_line(o, line, PhysicalGrid::data_site(rot.b));
    const Complex xa = carried, xb = data;
    carried = rot.u(0, 0) * xa + rot.u(0, 1) * xb;
    data = rot.u(1, 0) * xa + rot.u(1, 1) * xb;
  }
  return out;
}

PhysicalGrid run_stage(const PhysicalGrid& g, const Stage& stage, Orientation o, int line,
                       ProtocolTrace* trace) {
  std::vector<int> sources;
  sources.reserve(stage.rotations.size());
  for (const auto& rot : stage.rotations) sources.push_back(rot.a);

  std::string positions;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    positions += (i ? "," : "") + std::to_string(sources[i]);
  }
  auto log = [&](int step, ActionKind kind, std::string params) {
    if (trace) trace->actions.push_back({step, kind, line, o, std::move(params)});
  };

  PhysicalGrid s = pi_transfer(g, sources, o, line);
  log(1, ActionKind::PiTransfer, "positions=" + positions);
  s = shift_register(s, stage.d, o, line);
  log(2, ActionKind::Shift, "offset=+" + std::to_string(stage.d));
  s = rotate_pairs(s, stage, o, line);
  {
    std::string pairs;
    for (std::size_t i = 0; i < stage.rotations.size(); ++i) {
      pairs += (i ? "," : "") + std::string("(") + std::to_string(stage.rotations[i].a) + ":" +
               std::to_string(stage.rotations[i].b) + ")";
    }
    log(3, ActionKind::Rotate, "d=" + std::to_string(stage.d) + ";pairs=" + pairs);
  }
  s = shift_register(s, -stage.d, o, line);
  log(4, ActionKind::Shift, "offset=-" + std::to_string(stage.d));
  s = pi_transfer(s, sources, o, line);
  log(5, ActionKind::PiTransfer, "positions=" + positions);
  return s;
}

WalkState run_walk_physical(const WalkState& s0, const CoinPlan& plan, PhysicalRunStats* stats) {
  const int n = s0.size();
  const int padded = static_cast<int>(std::max(2L, next_power_of_two(n)));

  CMatrix start = CMatrix::Zero(padded, padded);
  start.topLeftCorner(n, n) = s0.amplitudes();
  PhysicalGrid grid = embed(WalkState(std::move(start)));

  PhysicalRunStats local;
  for (std::size_t step = 0; step < plan.steps.size(); ++step) {
    const CoinSet& coins = plan.steps[step];
    if (coins.dimension() != n) throw std::invalid_argument("coin dimension mismatch");
    const Orientation o = orientation_of_step(static_cast<int>(step));

    // One decomposition per distinct coin in this step.
    std::map<const CMatrix*, StageSequence> cache;
    const StageSequence identity_seq = cs_decompose(CMatrix::Identity(padded, padded));
    for (int line = 1; line <= padded; ++line) {
      const StageSequence* seq = &identity_seq;
      if (line <= n) {
        const CMatrix* key = &coins.for_line(line);
        auto it = cache.find(key);
        if (it == cache.end()) {
          it = cache.emplace(key, cs_decompose(pad_to_power_of_two(*key))).first;
        }
        seq = &it->second;
      }
      for (const auto& st : seq->stages) {
        grid = run_stage(grid, st, o, line);
        ++local.stages_run;
        local.actions += 5;
        local.max_register_residual =
            std::max(local.max_register_residual, grid.max_register_amplitude());
        if (local.max_register_residual >= kRegisterTol) {
          throw ProtocolError("register not empty after stage");
        }
      }
    }
  }
  const WalkState padded_state = extract(grid);
  if (stats) *stats = local;
  if (padded == n) return padded_state;
  const CMatrix& a = padded_state.amplitudes();
  const double spill = a.squaredNorm() - a.topLeftCorner(n, n).squaredNorm();
  if (spill > 1e-20) throw ToleranceError("amplitude leaked into padding indices");
  return WalkState(a.topLeftCorner(n, n));
}

}  // namespace qwalk
