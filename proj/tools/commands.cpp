#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qwalk/conveyor.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/random.hpp"
#include "qwalk/serialization.hpp"
#include "qwalk/tdse.hpp"
#include "qwalk/unitary_decomp.hpp"
#include "qwalk/walk.hpp"

namespace qwalk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kConfigVersion = 1;

struct Loaded {
  json doc;
  fs::path dir;
  std::uint64_t seed = 0;
};

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      throw ConfigError("unknown key \"" + key + "\" in " + where + " (expected one of: " + list +
                        ")");
    }
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("key \"") + key + "\" has the wrong type");
  }
}

template <class T>
T require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + " needs \"" + key + "\"");
  return get_or<T>(obj, key, T{});
}

Loaded load(const Options& opt, std::initializer_list<const char*> allowed) {
  Loaded l;
  std::string text;
  try {
    text = read_file(opt.config);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  try {
    l.doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(opt.config.string() + ": " + e.what());
  }
  check_keys(l.doc, allowed, "config");
  if (!l.doc.contains("version")) throw ConfigError("config needs a \"version\" field");
  const int version = get_or<int>(l.doc, "version", 0);
  if (version != kConfigVersion) {
    throw ConfigError("config version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kConfigVersion) + ")");
  }
  l.dir = opt.config.parent_path();
  l.seed = opt.seed ? *opt.seed : get_or<std::uint64_t>(l.doc, "seed", 0);
  return l;
}

void write_out(const Options& opt, const std::string& name, const std::string& content) {
  try {
    fs::create_directories(opt.out);
    write_file_atomic(opt.out / name, content);
  } catch (const std::exception& e) {
    throw ConfigError("cannot write " + (opt.out / name).string() + ": " + e.what());
  }
}

void write_json(const Options& opt, const std::string& name, const json& doc) {
  write_out(opt, name, doc.dump(2) + "\n");
}

// ---- walk ----

Graph load_graph(const json& spec, const fs::path& dir) {
  if (spec.is_string()) {
    const fs::path p = dir / spec.get<std::string>();
    std::string text;
    try {
      text = read_file(p);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    try {
      return parse_graph(text);
    } catch (const ParseError& e) {
      throw ConfigError(p.string() + ":" + std::to_string(e.line()) + ": " + e.what());
    }
  }
  if (spec.is_object() && spec.contains("family")) {
    check_keys(spec, {"family", "n"}, "graph");
    const auto family = require<std::string>(spec, "family", "graph");
    const int n = require<int>(spec, "n", "graph");
    if (family == "complete") return complete_graph(n);
    if (family == "cycle") return cycle_graph(n);
    if (family == "path") return path_graph(n);
    throw ConfigError("unknown graph family \"" + family + "\" (complete, cycle, path)");
  }
  if (spec.is_object()) return parse_graph(spec.dump());
  throw ConfigError("\"graph\" must be a file path, a family object or an inline edge list");
}

CoinSet random_graph_coins(const Graph& g, Rng& rng) {
  const EdgeMask mask(g);
  std::vector<CMatrix> coins;
  for (int j = 1; j <= g.size(); ++j) {
    const auto row = mask.row(j);
    const int degree = static_cast<int>(std::count(row.begin(), row.end(), true));
    coins.push_back(mask_coin(degree > 0 ? haar_unitary(degree, rng) : CMatrix(0, 0), row));
  }
  return CoinSet(std::move(coins));
}

WalkState initial_state(const json& doc, const Graph& g) {
  const int n = g.size();
  if (!doc.contains("initial")) {
    const auto nb = g.neighbors(1);
    return init_localized(n, 1, nb.empty() ? 1 : nb.front());
  }
  const json& init = doc["initial"];
  check_keys(init, {"node", "coin"}, "initial");
  const int node = require<int>(init, "node", "initial");
  if (node < 1 || node > n) throw ConfigError("initial node " + std::to_string(node) + " is not in 1.." + std::to_string(n));
  if (!init.contains("coin")) {
    const auto nb = g.neighbors(node);
    return init_localized(n, node, nb.empty() ? node : nb.front());
  }
  CMatrix a = CMatrix::Zero(n, n);
  const json& coin = init["coin"];
  if (!coin.is_object()) throw ConfigError("initial.coin must map coin index to [re, im]");
  for (const auto& [key, value] : coin.items()) {
    int k = 0;
    try {
      k = std::stoi(key);
    } catch (const std::exception&) {
      throw ConfigError("initial.coin key \"" + key + "\" is not a node index");
    }
    if (k < 1 || k > n) throw ConfigError("initial.coin index " + key + " is out of range");
    if (!value.is_array() || value.size() != 2) throw ConfigError("initial.coin values are [re, im]");
    a(node - 1, k - 1) = Complex(value[0].get<double>(), value[1].get<double>());
  }
  const double norm = a.squaredNorm();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw ConfigError("initial coin state has squared norm " + std::to_string(norm) + ", not 1");
  }
  return WalkState(a);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int cmd_walk(const Options& opt) {
  const Loaded cfg = load(opt, {"version", "seed", "graph", "coin", "steps", "initial", "snapshot"});
  if (!cfg.doc.contains("graph")) throw ConfigError("walk config needs \"graph\"");
  const Graph g = load_graph(cfg.doc["graph"], cfg.dir);
  const int steps = require<int>(cfg.doc, "steps", "walk config");
  if (steps < 0) throw ConfigError("\"steps\" must be non-negative");
  const auto coin_name = get_or<std::string>(cfg.doc, "coin", "grover");

  Rng rng(cfg.seed);
  CoinPlan plan;
  if (coin_name == "random") {
    for (int i = 0; i < steps; ++i) plan.steps.push_back(random_graph_coins(g, rng));
  } else {
    CoinKind kind;
    if (coin_name == "grover") {
      kind = CoinKind::Grover;
    } else if (coin_name == "dft") {
      kind = CoinKind::Dft;
    } else if (coin_name == "hadamard") {
      kind = CoinKind::Hadamard;
    } else {
      throw ConfigError("unknown coin \"" + coin_name + "\" (grover, dft, hadamard, random)");
    }
    plan = CoinPlan::repeated(graph_coins(g, kind), steps);
  }
  const WalkState s0 = initial_state(cfg.doc, g);

  std::ostringstream sigma;
  sigma << "# step\tmean\tsigma\n";
  std::vector<double> xs, ys;
  WalkState s = s0;
  for (int i = 0; i <= steps; ++i) {
    if (i > 0) s = evolve_step(s, i - 1, plan.steps[i - 1]);
    const Distribution d = position_distribution(walker_frame(s, i));
    sigma << i << '\t' << fmt(d.mean()) << '\t' << fmt(d.stddev()) << '\n';
    if (3 * i >= steps && i > 0) {
      xs.push_back(i);
      ys.push_back(d.stddev());
    }
  }
  const WalkState final_frame = walker_frame(s, steps);
  const Distribution dist = position_distribution(final_frame);
  const double norm_err = std::abs(s.norm_squared() - 1.0);

  json report{{"command", "walk"},
              {"seed", cfg.seed},
              {"n", g.size()},
              {"edges", g.edges().size()},
              {"coin", coin_name},
              {"steps", steps},
              {"norm_error", norm_err},
              {"mean", dist.mean()},
              {"sigma", dist.stddev()}};
  if (xs.size() >= 2) {
    const LineFit f = fit_line(xs, ys);
    report["sigma_fit"] = {{"from_step", static_cast<int>(xs.front())},
                           {"slope", f.slope},
                           {"intercept", f.intercept},
                           {"r2", f.r2}};
  }
  int code = kOk;
  if (opt.oracle) {
    const WalkState ref = reference_evolve(s0, steps, plan);
    const double dev = max_abs_diff(final_frame.amplitudes(), ref.amplitudes());
    report["oracle_max_deviation"] = dev;
    if (dev > 1e-10) code = kToleranceFailure;
  }
  write_out(opt, "distribution.tsv", distribution_tsv(dist));
  write_out(opt, "sigma.tsv", sigma.str());
  if (get_or<bool>(cfg.doc, "snapshot", false)) {
    write_json(opt, "state.json", walk_state_to_json(final_frame));
  }
  write_json(opt, "report.json", report);
  if (norm_err > 1e-10) {
    throw InvariantViolation("norm drifted by " + std::to_string(norm_err));
  }
  if (code != kOk) std::fprintf(stderr, "qwalk: oracle deviation exceeds 1e-10\n");
  return code;
}

// ---- decompose ----

int cmd_decompose(const Options& opt) {
  const Loaded cfg = load(opt, {"version", "seed", "unitary", "random"});
  CMatrix u;
  std::string source;
  if (cfg.doc.contains("unitary") == cfg.doc.contains("random")) {
    throw ConfigError("decompose config needs exactly one of \"unitary\" or \"random\"");
  }
  if (cfg.doc.contains("unitary")) {
    const json& spec = cfg.doc["unitary"];
    if (spec.is_string()) {
      const fs::path p = cfg.dir / spec.get<std::string>();
      std::string text;
      try {
        text = read_file(p);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      try {
        u = unitary_from_json(json::parse(text));
      } catch (const json::parse_error& e) {
        throw ConfigError(p.string() + ": " + e.what());
      }
      source = spec.get<std::string>();
    } else {
      u = unitary_from_json(spec);
      source = "inline";
    }
  } else {
    const json& r = cfg.doc["random"];
    check_keys(r, {"n"}, "random");
    const int n = require<int>(r, "n", "random");
    if (n < 1) throw ConfigError("random.n must be positive");
    Rng rng(cfg.seed);
    u = haar_unitary(n, rng);
    source = "haar";
  }
  const int n = static_cast<int>(u.rows());
  const double defect = unitarity_defect(u);
  if (defect >= 1e-10) {
    throw ToleranceError("input matrix is not unitary (defect " + std::to_string(defect) + ")");
  }
  const CMatrix padded = pad_to_power_of_two(u);
  const StageSequence seq = cs_decompose(padded);
  for (const auto& st : seq.stages) validate_stage(st, seq.n);
  const double err = max_abs_diff(reconstruct(seq), padded);

  json report{{"command", "decompose"},
              {"seed", cfg.seed},
              {"source", source},
              {"n", n},
              {"padded_n", seq.n},
              {"stages", seq.stages.size()},
              {"input_unitarity_defect", defect},
              {"reconstruction_error", err}};
  write_json(opt, "stages.json", stage_sequence_to_json(seq));
  write_json(opt, "report.json", report);
  if (static_cast<int>(seq.stages.size()) != seq.n - 1) {
    throw InvariantViolation("expected " + std::to_string(seq.n - 1) + " stages");
  }
  if (err > 1e-10) {
    std::fprintf(stderr, "qwalk: reconstruction error %.3e exceeds 1e-10\n", err);
    return kToleranceFailure;
  }
  return kOk;
}

// ---- conveyor-verify ----

int cmd_conveyor_verify(const Options& opt) {
  const Loaded cfg = load(opt, {"version", "seed", "n", "stages", "mode", "walk_steps"});
  const int n = require<int>(cfg.doc, "n", "conveyor-verify config");
  if (n < 2 || !is_power_of_two(n)) throw ConfigError("\"n\" must be a power of two >= 2");
  const int count = get_or<int>(cfg.doc, "stages", 50);
  const int walk_steps = get_or<int>(cfg.doc, "walk_steps", 0);
  if (count < 0 || walk_steps < 0) throw ConfigError("counts must be non-negative");
  const auto mode = get_or<std::string>(cfg.doc, "mode", "random");
  if (mode != "random" && mode != "identity") {
    throw ConfigError("unknown mode \"" + mode + "\" (random, identity)");
  }

  Rng rng(cfg.seed);
  std::vector<int> strides;
  for (int d = 2; d <= n; d *= 2) strides.push_back(d);

  double max_dev = 0.0, max_residual = 0.0;
  long actions = 0, transfers = 0, shifts = 0, rotations = 0;
  std::string trace_text;
  for (int i = 0; i < count; ++i) {
    const int d = strides[rng() % strides.size()];
    Stage st{d, {}};
    for (auto [a, b] : stage_pairs(n, d)) {
      st.rotations.push_back(
          {a, b, mode == "identity" ? Matrix2c(Matrix2c::Identity()) : Matrix2c(haar_unitary(2, rng))});
    }
    const Orientation o = rng() % 2 ? Orientation::Vertical : Orientation::Horizontal;
    const int line = 1 + static_cast<int>(rng() % n);
    const WalkState s = random_walk_state(n, rng);

    ProtocolTrace trace;
    const PhysicalGrid g = run_stage(embed(s), st, o, line, &trace);
    max_residual = std::max(max_residual, g.max_register_amplitude());
    CMatrix expect = s.amplitudes();
    if (o == Orientation::Horizontal) {
      expect.row(line - 1) = apply_stage(expect.row(line - 1).transpose(), st).transpose();
    } else {
      expect.col(line - 1) = apply_stage(expect.col(line - 1), st);
    }
    max_dev = std::max(max_dev, max_abs_diff(extract(g).amplitudes(), expect));
    for (const auto& a : trace.actions) {
      ++actions;
      transfers += a.kind == ActionKind::PiTransfer;
      shifts += a.kind == ActionKind::Shift;
      rotations += a.kind == ActionKind::Rotate;
    }
    trace_text += "# stage " + std::to_string(i + 1) + "\n" + trace.to_text();
  }

  json report{{"command", "conveyor-verify"},
              {"seed", cfg.seed},
              {"n", n},
              {"mode", mode},
              {"stages", count},
              {"max_deviation", max_dev},
              {"max_register_residual", max_residual},
              {"actions", actions},
              {"pi_transfers", transfers},
              {"shifts", shifts},
              {"rotations", rotations}};
  if (walk_steps > 0) {
    CoinPlan plan;
    for (int i = 0; i < walk_steps; ++i) {
      std::vector<CMatrix> coins;
      for (int j = 0; j < n; ++j) coins.push_back(haar_unitary(n, rng));
      plan.steps.emplace_back(std::move(coins));
    }
    const WalkState s0 = random_walk_state(n, rng);
    PhysicalRunStats stats;
    const WalkState phys = run_walk_physical(s0, plan, &stats);
    const double dev = max_abs_diff(phys.amplitudes(), evolve(s0, walk_steps, plan).amplitudes());
    report["walk"] = {{"steps", walk_steps},
                      {"max_deviation", dev},
                      {"stages_run", stats.stages_run},
                      {"actions", stats.actions},
                      {"max_register_residual", stats.max_register_residual}};
    max_dev = std::max(max_dev, dev);
  }
  write_out(opt, "trace.txt", trace_text);
  write_json(opt, "report.json", report);
  std::printf("max deviation %.3e over %d stages (%ld actions)\n", max_dev, count, actions);
  if (max_dev > 1e-10) {
    std::fprintf(stderr, "qwalk: conveyor deviation exceeds 1e-10\n");
    return kToleranceFailure;
  }
  return kOk;
}

// ---- tdse / calibrate ----

namespace {

struct TdseSetup {
  SpatialGrid grid;
  DoubleWellSpec spec;
  BarrierTimeline timeline;
  PropagationSettings settings;
};

TdseSetup tdse_setup(const json& doc) {
  TdseSetup s;
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    check_keys(g, {"x_min", "x_max", "m"}, "grid");
    s.grid = SpatialGrid(get_or(g, "x_min", s.grid.x_min), get_or(g, "x_max", s.grid.x_max),
                         get_or(g, "m", s.grid.m));
  }
  if (doc.contains("well")) {
    const json& w = doc["well"];
    check_keys(w, {"depth", "width", "separation", "barrier_width", "barrier_height"}, "well");
    s.spec.well_depth = get_or(w, "depth", s.spec.well_depth);
    s.spec.well_width = get_or(w, "width", s.spec.well_width);
    s.spec.well_separation = get_or(w, "separation", s.spec.well_separation);
    s.spec.barrier_width = get_or(w, "barrier_width", s.spec.barrier_width);
    s.spec.barrier_height = get_or(w, "barrier_height", s.spec.barrier_height);
    if (s.spec.barrier_height < 0.0) throw ConfigError("well.barrier_height must be >= 0");
  }
  s.timeline.high = s.spec.barrier_height;
  if (doc.contains("timeline")) {
    const json& t = doc["timeline"];
    check_keys(t, {"ramp_down", "hold", "ramp_up", "high", "low"}, "timeline");
    s.timeline.ramp_down = get_or(t, "ramp_down", s.timeline.ramp_down);
    s.timeline.hold = get_or(t, "hold", s.timeline.hold);
    s.timeline.ramp_up = get_or(t, "ramp_up", s.timeline.ramp_up);
    s.timeline.high = get_or(t, "high", s.timeline.high);
    s.timeline.low = get_or(t, "low", s.timeline.low);
  }
  if (doc.contains("propagation")) {
    const json& p = doc["propagation"];
    check_keys(p, {"dt", "tail_tolerance", "sample_every"}, "propagation");
    s.settings.dt = get_or(p, "dt", s.settings.dt);
    s.settings.tail_tolerance = get_or(p, "tail_tolerance", s.settings.tail_tolerance);
    s.settings.sample_every = get_or(p, "sample_every", s.settings.sample_every);
  }
  return s;
}

json timeline_json(const BarrierTimeline& t) {
  return {{"ramp_down", t.ramp_down}, {"hold", t.hold}, {"ramp_up", t.ramp_up},
          {"high", t.high},           {"low", t.low}};
}

json psi_json(const CVector& psi, const SpatialGrid& g) {
  json amp = json::array();
  for (Eigen::Index i = 0; i < psi.size(); ++i) amp.push_back({psi(i).real(), psi(i).imag()});
  return {{"m", g.m}, {"x_min", g.x_min}, {"x_max", g.x_max}, {"psi", std::move(amp)}};
}

void check_trajectory(const std::vector<BlochSample>& bloch) {
  for (const auto& b : bloch) {
    if (std::abs(b.norm - 1.0) > 1e-10) {
      throw InvariantViolation("norm drifted to " + fmt(b.norm) + " at t = " + fmt(b.t));
    }
  }
}

}  // namespace

int cmd_tdse(const Options& opt) {
  const Loaded cfg = load(opt, {"version", "seed", "grid", "well", "timeline", "propagation",
                                "initial", "snapshot"});
  const TdseSetup s = tdse_setup(cfg.doc);
  const auto start = get_or<std::string>(cfg.doc, "initial", "left");
  if (start != "left" && start != "right") throw ConfigError("\"initial\" must be left or right");

  const QubitBasis basis = well_ground_states(s.grid, s.spec);
  const CVector psi0 = start == "left" ? basis.left : basis.right;
  const Trajectory traj = evolve_timeline(psi0, s.grid, s.spec, s.timeline, s.settings);
  const auto bloch = bloch_trajectory(traj, basis, s.grid);
  const BlochSample& last = bloch.back();

  json report{{"command", "tdse"},
              {"seed", cfg.seed},
              {"initial", start},
              {"timeline", timeline_json(s.timeline)},
              {"dt", s.settings.dt},
              {"samples", bloch.size()},
              {"splitting_low", doublet_splitting(s.grid, s.spec, s.timeline.low)},
              {"final",
               {{"t", last.t},
                {"alpha2", last.abs_alpha * last.abs_alpha},
                {"beta2", last.abs_beta * last.abs_beta},
                {"leakage", last.leakage},
                {"norm", last.norm}}}};
  if (last.phase_defined()) report["final"]["relative_phase"] = last.relative_phase;
  write_out(opt, "trajectory.tsv", bloch_tsv(bloch));
  if (get_or<bool>(cfg.doc, "snapshot", false)) {
    write_json(opt, "final_state.json", psi_json(traj.psi.back(), s.grid));
  }
  write_json(opt, "report.json", report);
  check_trajectory(bloch);
  return kOk;
}

int cmd_calibrate(const Options& opt) {
  const Loaded cfg = load(opt, {"version", "seed", "grid", "well", "timeline", "propagation",
                                "target", "tolerance", "scan_points", "periods"});
  const TdseSetup s = tdse_setup(cfg.doc);
  const double target = require<double>(cfg.doc, "target", "calibrate config");
  if (!(target >= 0.0 && target <= 1.0)) throw ConfigError("\"target\" must lie in [0, 1]");
  CalibrationOptions co;
  co.tolerance = get_or(cfg.doc, "tolerance", co.tolerance);
  co.scan_points = get_or(cfg.doc, "scan_points", co.scan_points);
  co.periods = get_or(cfg.doc, "periods", co.periods);

  json out{{"command", "calibrate"}, {"seed", cfg.seed}, {"target", target},
           {"tolerance", co.tolerance}};
  CalibrationResult r;
  try {
    r = calibrate_hold_time(s.grid, s.spec, s.timeline, target, s.settings, co);
  } catch (const CalibrationError& e) {
    out["status"] = "unreachable";
    out["max_transfer"] = e.max_achieved();
    write_json(opt, "calibration.json", out);
    throw;
  }
  BarrierTimeline tl = s.timeline;
  tl.hold = r.hold;
  const QubitBasis basis = well_ground_states(s.grid, s.spec);
  const auto bloch =
      bloch_trajectory(evolve_timeline(basis.left, s.grid, s.spec, tl, s.settings), basis, s.grid);

  out["status"] = "ok";
  out["hold"] = r.hold;
  out["achieved"] = r.achieved;
  out["leakage"] = r.leakage;
  out["relative_phase"] = r.relative_phase;
  out["max_transfer"] = r.max_transfer;
  out["evaluations"] = r.evaluations;
  out["timeline"] = timeline_json(tl);
  write_out(opt, "trajectory.tsv", bloch_tsv(bloch));
  write_json(opt, "calibration.json", out);
  check_trajectory(bloch);
  std::printf("hold %.6f gives transfer %.6f (leakage %.2e)\n", r.hold, r.achieved, r.leakage);
  return kOk;
}

}  // namespace qwalk::cli
