// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qwalk/conveyor.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/random.hpp"
#include "qwalk/tdse.hpp"
#include "qwalk/unitary_decomp.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;
using std::numbers::pi;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (cond ? "" : " [violated]");
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < budget_s, "runtime " + fixed(secs, 2) + " s < " + fixed(budget_s, 0) + " s");
  std::printf("%s [%d] %s: %s\n", out.ok ? "PASS" : "FAIL", id, title, out.detail.c_str());
  std::fflush(stdout);
  if (!out.ok) ++failures;
}

CoinSet masked_haar(const Graph& g, Rng& rng) {
  const EdgeMask mask(g);
  std::vector<CMatrix> coins;
  for (int j = 1; j <= g.size(); ++j) {
    const auto row = mask.row(j);
    int degree = 0;
    for (bool b : row) degree += b;
    coins.push_back(mask_coin(haar_unitary(degree, rng), row));
  }
  return CoinSet(std::move(coins));
}

// ---- 1 ----
Outcome grid_oracle() {
  Outcome out;
  Rng rng(101);
  double worst = 0.0;
  for (int n : {2, 4, 8}) {
    const Graph g = complete_graph(n);
    for (int trial = 0; trial < 5; ++trial) {
      CoinPlan uniform, masked;
      for (int i = 0; i < 20; ++i) {
        uniform.steps.push_back(CoinSet::uniform(haar_unitary(n, rng)));
        masked.steps.push_back(masked_haar(g, rng));
      }
      for (const CoinPlan* plan : {&uniform, &masked}) {
        const WalkState s0 = random_walk_state(n, rng);
        worst = std::max(worst, max_abs_diff(evolve(s0, 20, *plan).amplitudes(),
                                             reference_evolve(s0, 20, *plan).amplitudes()));
      }
    }
  }
  out.require(worst <= 1e-10, "K_2,K_4,K_8 x 20 steps, max deviation " + sci(worst) + " <= 1e-10");
  return out;
}

// ---- 2 ----

// Two-state walk on the integer line, written directly: coin components
// (left, right) at each site, Hadamard coin, then the right component hops to
// x+1 and arrives pointing back left (and vice versa).
struct LineWalk {
  int offset;
  std::vector<Complex> left, right;

  LineWalk(int half_width) : offset(half_width), left(2 * half_width + 1), right(2 * half_width + 1) {}

  void step() {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<Complex> nl(left.size()), nr(right.size());
    for (std::size_t x = 0; x < left.size(); ++x) {
      const Complex l = r * (left[x] + right[x]);
      const Complex rr = r * (left[x] - right[x]);
      if (x + 1 < left.size()) nl[x + 1] += rr;
      if (x >= 1) nr[x - 1] += l;
      if ((x + 1 == left.size() && std::abs(rr) > 0) || (x == 0 && std::abs(l) > 0)) {
        throw std::runtime_error("line walk oracle ran off its window");
      }
    }
    left = std::move(nl);
    right = std::move(nr);
  }
};

Outcome hadamard_line() {
  Outcome out;
  const int n = 64, start = 32, last = 30;
  const Graph g = cycle_graph(n);
  const CoinPlan plan = CoinPlan::repeated(graph_coins(g, CoinKind::Hadamard), last);
  const double r = 1.0 / std::sqrt(2.0);
  CMatrix a0 = CMatrix::Zero(n, n);
  a0(start - 1, start - 2) = r;                 // coin toward 31
  a0(start - 1, start) = Complex(0.0, r);       // coin toward 33
  WalkState s(a0);

  LineWalk oracle(40);
  oracle.left[oracle.offset] = r;
  oracle.right[oracle.offset] = Complex(0.0, r);

  std::vector<double> ns, sigmas, classical;
  for (int step = 1; step <= last; ++step) {
    s = evolve_step(s, step - 1, plan.steps[step - 1]);
    oracle.step();
    if (step >= 10) {
      ns.push_back(step);
      sigmas.push_back(position_distribution(walker_frame(s, step)).stddev());
      // classical +-1 walk: binomial distribution of right moves
      double mean = 0, second = 0;
      for (int k = 0; k <= step; ++k) {
        const double p = std::exp(std::lgamma(step + 1.0) - std::lgamma(k + 1.0) -
                                  std::lgamma(step - k + 1.0) - step * std::log(2.0));
        const double x = 2.0 * k - step;
        mean += p * x;
        second += p * x * x;
      }
      classical.push_back(std::sqrt(second - mean * mean));
    }
  }
  const LineFit fit = fit_line(ns, sigmas);
  out.require(fit.r2 > 0.999, "sigma(n) = " + fixed(fit.slope) + " n + " + fixed(fit.intercept) +
                                  ", R^2 " + fixed(fit.r2, 6) + " > 0.999");
  const double classical_dev = std::abs(classical.back() - std::sqrt(30.0));
  out.require(classical_dev < 1e-9 && sigmas.back() > 2.0 * classical.back(),
              "classical sigma(30) = " + fixed(classical.back()) + " = sqrt(30), quantum " +
                  fixed(sigmas.back()));

  const WalkState fin = walker_frame(s, last);
  double amp_dev = 0.0, prob_dev = 0.0;
  for (int j = 1; j <= n; ++j) {
    const int x = j - start + oracle.offset;
    const bool in = x >= 0 && x < static_cast<int>(oracle.left.size());
    const Complex l = in ? oracle.left[x] : Complex(0.0);
    const Complex rr = in ? oracle.right[x] : Complex(0.0);
    const int jl = (j - 2 + n) % n + 1, jr = j % n + 1;
    amp_dev = std::max(amp_dev, std::abs(fin.at(j, jl) - l));
    amp_dev = std::max(amp_dev, std::abs(fin.at(j, jr) - rr));
    prob_dev = std::max(prob_dev, std::abs(position_distribution(fin).p[j - 1] -
                                           (std::norm(l) + std::norm(rr))));
  }
  out.require(prob_dev <= 1e-10 && amp_dev <= 1e-10,
              "line-walk oracle: distribution " + sci(prob_dev) + ", amplitudes " + sci(amp_dev) +
                  " <= 1e-10");
  return out;
}

// ---- 3 ----
Outcome decomposition() {
  Outcome out;
  Rng rng(303);
  double worst = 0.0;
  bool counts = true, pattern = true;
  for (int n : {4, 8, 16}) {
    const auto schedule = stride_schedule(n);
    for (int i = 0; i < 100; ++i) {
      const CMatrix u = haar_unitary(n, rng);
      const StageSequence seq = cs_decompose(u);
      counts = counts && static_cast<int>(seq.stages.size()) == n - 1;
      for (std::size_t k = 0; k < seq.stages.size(); ++k) {
        try {
          validate_stage(seq.stages[k], n);
          pattern = pattern && seq.stages[k].d == schedule[k];
        } catch (const std::exception&) {
          pattern = false;
        }
      }
      worst = std::max(worst, max_abs_diff(reconstruct(seq), u));
    }
  }
  out.require(worst <= 1e-10, "300 Haar unitaries, reconstruction " + sci(worst) + " <= 1e-10");
  out.require(counts, "n-1 stages each");
  out.require(pattern, "stride pattern kd+r, kd+r+d/2 in every stage");
  return out;
}

// ---- 4 ----
Outcome conveyor() {
  Outcome out;
  Rng rng(404);
  double worst = 0.0, residual = 0.0;
  long checked = 0;
  for (int n : {4, 8, 16}) {
    std::vector<int> strides;
    for (int d = 2; d <= n; d *= 2) strides.push_back(d);
    for (int i = 0; i < 200; ++i) {
      const int d = strides[rng() % strides.size()];
      Stage st{d, {}};
      for (auto [a, b] : stage_pairs(n, d)) st.rotations.push_back({a, b, haar_unitary(2, rng)});
      const Orientation o = rng() % 2 ? Orientation::Vertical : Orientation::Horizontal;
      const int line = 1 + static_cast<int>(rng() % n);
      const WalkState s = random_walk_state(n, rng);
      const PhysicalGrid g = run_stage(embed(s), st, o, line);
      residual = std::max(residual, g.max_register_amplitude());
      CMatrix expect = s.amplitudes();
      if (o == Orientation::Horizontal) {
        expect.row(line - 1) = apply_stage(expect.row(line - 1).transpose(), st).transpose();
      } else {
        expect.col(line - 1) = apply_stage(expect.col(line - 1), st);
      }
      worst = std::max(worst, max_abs_diff(extract(g).amplitudes(), expect));
      ++checked;
    }
  }
  out.require(worst <= 1e-12, std::to_string(checked) + " stages, physical vs logical " +
                                  sci(worst) + " <= 1e-12");
  out.require(residual < 1e-12, "register residual " + sci(residual) + " < 1e-12");
  return out;
}

// ---- 5 ----

CMatrix dft_hamiltonian(const SpatialGrid& g, const RVector& v) {
  const int m = g.m;
  CMatrix f(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) f(j, i) = std::polar(1.0, -2.0 * pi * j * i / m);
  }
  RVector t(m);
  for (int j = 0; j < m; ++j) {
    const double k = 2.0 * pi / g.length() * (j <= m / 2 ? j : j - m);
    t(j) = 0.5 * k * k;
  }
  CMatrix h = f.adjoint() * t.cast<Complex>().asDiagonal() * f / static_cast<double>(m);
  h.diagonal() += v.cast<Complex>();
  return h;
}

CVector packet(const SpatialGrid& g, double x0, double sigma, double k0) {
  CVector psi(g.m);
  for (int i = 0; i < g.m; ++i) {
    const double x = g.x(i) - x0;
    psi(i) = std::pow(2.0 * pi * sigma * sigma, -0.25) * std::exp(-x * x / (4.0 * sigma * sigma)) *
             std::polar(1.0, k0 * x);
  }
  return psi;
}

ChebyshevParams window(const SpatialGrid& g, const RVector& v, double dt) {
  const auto [lo, hi] = energy_bounds(g, v);
  return {dt, lo, hi, 1e-14};
}

Outcome chebyshev() {
  Outcome out;
  {
    const SpatialGrid g(-12, 12, 64);
    const RVector v = build_double_well(g, DoubleWellSpec{}, 6.0);
    CVector psi0 = packet(g, -1.5, 1.0, 0.0);
    psi0 /= std::sqrt(norm_squared(psi0, g));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(dft_hamiltonian(g, v));
    const double dt = 0.05;
    const ChebyshevPropagator prop(g, window(g, v, dt));
    CVector psi = psi0;
    double worst = 0.0;
    for (int s = 1; s <= 200; ++s) {
      psi = prop.step(psi, v);
      if (s % 10 == 0) {
        CVector phases(g.m);
        for (int i = 0; i < g.m; ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * s * dt);
        const CVector exact =
            es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * psi0);
        worst = std::max(worst, (psi - exact).cwiseAbs().maxCoeff());
      }
    }
    out.require(worst <= 1e-8, "m=64 double well vs eigensolve over t=10: " + sci(worst) +
                                   " <= 1e-8");

    CVector cur = psi0;
    const ChebyshevPropagator fine(g, window(g, v, 0.02));
    for (int s = 0; s < 1000; ++s) cur = fine.step(cur, v);
    const double drift = std::abs(norm_squared(cur, g) - 1.0);
    out.require(drift <= 1e-10, "norm drift over 1000 steps " + sci(drift) + " <= 1e-10");
  }
  {
    const SpatialGrid g(-30, 30, 512);
    const double sigma = 1.0, k0 = 1.0, t = 1.0;
    CVector psi = packet(g, 0.0, sigma, k0);
    const RVector zero = RVector::Zero(g.m);
    const ChebyshevPropagator prop(g, window(g, zero, 0.05));
    for (int s = 0; s < 20; ++s) psi = prop.step(psi, zero);
    const Complex st(1.0, t / (2 * sigma * sigma));
    double worst = 0.0;
    for (int i = 0; i < g.m; ++i) {
      const double x = g.x(i);
      const Complex expected = std::pow(2 * pi * sigma * sigma, -0.25) / std::sqrt(st) *
                               std::exp(-(x - k0 * t) * (x - k0 * t) / (4 * sigma * sigma * st)) *
                               std::exp(Complex(0, k0 * x - 0.5 * k0 * k0 * t));
      worst = std::max(worst, std::abs(psi(i) - expected));
    }
    out.require(worst <= 1e-8, "free Gaussian at t=1 " + sci(worst) + " <= 1e-8");
  }
  return out;
}

// ---- 6 ----
Outcome calibration() {
  Outcome out;
  const SpatialGrid g;
  const DoubleWellSpec spec;
  const BarrierTimeline tmpl;
  const PropagationSettings ps;
  const QubitBasis basis = well_ground_states(g, spec);
  for (double target : {1.0, 0.5}) {
    const CalibrationResult r = calibrate_hold_time(g, spec, tmpl, target, ps);
    // rerun the calibrated timeline on its own
    BarrierTimeline tl = tmpl;
    tl.hold = r.hold;
    const auto q =
        qubit_projection(evolve_timeline(basis.left, g, spec, tl, ps).psi.back(), basis, g);
    const double transfer = std::norm(q.beta);
    const std::string name = target == 1.0 ? "pi" : "pi/2";
    if (target == 1.0) {
      out.require(transfer >= 0.99, name + ": hold " + fixed(r.hold, 3) + ", transfer " +
                                        fixed(transfer) + " >= 0.99");
    } else {
      out.require(std::abs(transfer - 0.5) <= 0.01, name + ": hold " + fixed(r.hold, 3) +
                                                        ", transfer " + fixed(transfer) +
                                                        " in 0.50 +- 0.01");
    }
    out.require(q.leakage <= 0.01, name + " leakage " + sci(q.leakage) + " <= 0.01");
  }
  return out;
}

// ---- 7 ----
Outcome end_to_end() {
  Outcome out;
  Rng rng(707);
  const int n = 8;
  CoinPlan plan;
  for (int i = 0; i < 10; ++i) {
    std::vector<CMatrix> coins;
    for (int j = 0; j < n; ++j) coins.push_back(haar_unitary(n, rng));
    plan.steps.emplace_back(std::move(coins));
  }
  const WalkState s0 = random_walk_state(n, rng);
  PhysicalRunStats stats;
  const WalkState phys = run_walk_physical(s0, plan, &stats);
  const double dev = max_abs_diff(phys.amplitudes(), evolve(s0, 10, plan).amplitudes());
  out.require(dev <= 1e-10, "K_8, 10 steps, " + std::to_string(stats.stages_run) +
                                " conveyor stages, deviation " + sci(dev) + " <= 1e-10");
  return out;
}

}  // namespace

int main() {
  criterion(1, "grid evolution matches coin-and-transpose reference", 5, grid_oracle);
  criterion(2, "Hadamard walk on C_64 spreads ballistically", 10, hadamard_line);
  criterion(3, "pairwise-stage decomposition round trip", 30, decomposition);
  criterion(4, "conveyor protocol equals logical stage", 30, conveyor);
  criterion(5, "Chebyshev propagator correctness", 60, chebyshev);
  criterion(6, "calibrated pi and pi/2 barrier gates", 120, calibration);
  criterion(7, "physical conveyor walk equals grid walk", 60, end_to_end);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
