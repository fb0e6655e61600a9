#include "qwalk/walk.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qwalk {

namespace {

constexpr double kCoinUnitarityTol = 1e-12;

void check_coin(const CMatrix& c) {
  if (c.rows() != c.cols() || c.rows() == 0) throw std::invalid_argument("coin must be square");
  if (unitarity_defect(c) >= kCoinUnitarityTol) {
    throw std::invalid_argument("coin is not unitary (defect " +
                                std::to_string(unitarity_defect(c)) + ")");
  }
}

void check_coins_match(const WalkState& s, const CoinSet& coins) {
  if (coins.coins.empty()) throw std::invalid_argument("empty coin set");
  if (coins.dimension() != s.size()) {
    throw std::invalid_argument("coin dimension " + std::to_string(coins.dimension()) +
                                " does not match walk dimension " + std::to_string(s.size()));
  }
  if (!coins.is_uniform() && static_cast<int>(coins.coins.size()) != s.size()) {
    throw std::invalid_argument("per-line coin count does not match walk dimension");
  }
}

}  // namespace

WalkState::WalkState(CMatrix amplitudes) : amp_(std::move(amplitudes)) {
  if (amp_.rows() == 0 || amp_.rows() != amp_.cols()) {
    throw std::invalid_argument("walk state must be a non-empty square grid");
  }
  const double norm2 = amp_.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-9) {
    throw std::invalid_argument("walk state is not normalized (norm^2 = " +
                                std::to_string(norm2) + ")");
  }
}

CoinSet::CoinSet(std::vector<CMatrix> per_line) : coins(std::move(per_line)) {
  for (const auto& c : coins) {
    check_coin(c);
    if (c.rows() != coins.front().rows()) throw std::invalid_argument("coin dimensions differ");
  }
}

CoinSet CoinSet::uniform(CMatrix coin) { return CoinSet(std::vector<CMatrix>{std::move(coin)}); }

CoinPlan CoinPlan::repeated(const CoinSet& coins, int count) {
  CoinPlan plan;
  plan.steps.assign(static_cast<std::size_t>(count), coins);
  return plan;
}

double Distribution::total() const {
  double t = 0.0;
  for (double v : p) t += v;
  return t;
}

double Distribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m += static_cast<double>(i + 1) * p[i];
  return m / total();
}

double Distribution::stddev() const {
  const double mu = mean();
  double var = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dx = static_cast<double>(i + 1) - mu;
    var += dx * dx * p[i];
  }
  return std::sqrt(var / total());
}

WalkState init_localized(int n, int j, int k) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  if (j < 1 || j > n || k < 1 || k > n) throw std::out_of_range("initial index out of range");
  CMatrix amp = CMatrix::Zero(n, n);
  amp(j - 1, k - 1) = 1.0;
  return WalkState(std::move(amp));
}

Matrix2c hadamard_coin() {
  const double h = 1.0 / std::numbers::sqrt2;
  Matrix2c m;
  m << h, h, h, -h;
  return m;
}

CMatrix grover_coin(int n) {
  if (n < 1) throw std::invalid_argument("grover_coin: n must be positive");
  CMatrix c = CMatrix::Constant(n, n, 2.0 / n);
  c.diagonal().array() -= 1.0;
  return c;
}

CMatrix dft_coin(int n) {
  if (n < 1) throw std::invalid_argument("dft_coin: n must be positive");
  if (n == 2) return hadamard_coin();
  CMatrix c(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // Reduce jk mod n first so the phase argument stays small.
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / n;
      c(j, k) = std::polar(scale, angle);
    }
  }
  return c;
}

CMatrix mask_coin(const CMatrix& sub, const std::vector<bool>& mask) {
  const int n = static_cast<int>(mask.size());
  std::vector<int> in;
  for (int i = 0; i < n; ++i) {
    if (mask[i]) in.push_back(i);
  }
  const int m = static_cast<int>(in.size());
  if (sub.rows() != m || sub.cols() != m) {
    throw std::invalid_argument("sub-coin is " + std::to_string(sub.rows()) + "x" +
                                std::to_string(sub.cols()) + " but the mask selects " +
                                std::to_string(m) + " states");
  }
  CMatrix c = CMatrix::Identity(n, n);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) c(in[a], in[b]) = sub(a, b);
  }
  return c;
}

CoinSet graph_coins(const Graph& g, CoinKind kind) {
  const EdgeMask mask(g);
  std::vector<CMatrix> coins;
  coins.reserve(g.size());
  for (int j = 1; j <= g.size(); ++j) {
    const auto row = mask.row(j);
    int degree = 0;
    for (bool b : row) degree += b ? 1 : 0;
    CMatrix sub;
    switch (kind) {
      case CoinKind::Grover:
        sub = degree > 0 ? grover_coin(degree) : CMatrix(0, 0);
        break;
      case CoinKind::Dft:
        sub = degree > 0 ? dft_coin(degree) : CMatrix(0, 0);
        break;
      case CoinKind::Hadamard:
        if (degree != 2 && degree != 0) {
          throw std::invalid_argument("Hadamard coin needs degree 2; node " + std::to_string(j) +
                                      " has degree " + std::to_string(degree));
        }
        sub = degree == 2 ? CMatrix(hadamard_coin()) : CMatrix(0, 0);
        break;
    }
    coins.push_back(mask_coin(sub, row));
  }
  return CoinSet(std::move(coins));
}

WalkState apply_coin_rows(const WalkState& s, const CoinSet& coins) {
  check_coins_match(s, coins);
  const CMatrix& a = s.amplitudes();
  CMatrix out(a.rows(), a.cols());
  if (coins.is_uniform()) {
    out.noalias() = a * coins.coins.front().transpose();
  } else {
    for (int j = 0; j < s.size(); ++j) {
      out.row(j).noalias() = (coins.coins[j] * a.row(j).transpose()).transpose();
    }
  }
  return WalkState(std::move(out));
}

WalkState apply_coin_cols(const WalkState& s, const CoinSet& coins) {
  check_coins_match(s, coins);
  const CMatrix& a = s.amplitudes();
  CMatrix out(a.rows(), a.cols());
  if (coins.is_uniform()) {
    out.noalias() = coins.coins.front() * a;
  } else {
    for (int k = 0; k < s.size(); ++k) out.col(k).noalias() = coins.coins[k] * a.col(k);
  }
  return WalkState(std::move(out));
}

WalkState evolve(const WalkState& s0, int steps, const CoinPlan& plan) {
  if (steps < 0) throw std::invalid_argument("step count must be non-negative");
  if (static_cast<int>(plan.steps.size()) < steps) {
    throw std::invalid_argument("coin plan has " + std::to_string(plan.steps.size()) +
                                " steps, " + std::to_string(steps) + " requested");
  }
  WalkState s = s0;
  for (int i = 0; i < steps; ++i) s = evolve_step(s, i, plan.steps[i]);
  return s;
}

WalkState evolve_step(const WalkState& s, int step_index, const CoinSet& coins) {
  return orientation_of_step(step_index) == Orientation::Horizontal ? apply_coin_rows(s, coins)
                                                                    : apply_coin_cols(s, coins);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

WalkState reference_evolve(const WalkState& s0, int steps, const CoinPlan& plan) {
  if (steps < 0) throw std::invalid_argument("step count must be non-negative");
  if (static_cast<int>(plan.steps.size()) < steps) {
    throw std::invalid_argument("coin plan shorter than requested step count");
  }
  // Full N^2 x N^2 operators: block-diagonal coin over the node index,
  // followed by the permutation |j,k> -> |k,j>. Vector index is j*n + k.
  const int n = s0.size();
  const int dim = n * n;
  CVector psi(dim);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) psi(j * n + k) = s0.amplitudes()(j, k);
  }
  for (int i = 0; i < steps; ++i) {
    const CoinSet& cs = plan.steps[i];
    if (cs.dimension() != n) throw std::invalid_argument("coin dimension mismatch");
    CVector coined(dim);
    for (int j = 0; j < n; ++j) {
      const CMatrix& c = cs.for_line(j + 1);
      coined.segment(j * n, n).noalias() = c * psi.segment(j * n, n);
    }
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) psi(k * n + j) = coined(j * n + k);
    }
  }
  CMatrix amp(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) amp(j, k) = psi(j * n + k);
  }
  return WalkState(std::move(amp));
}

Distribution position_distribution(const WalkState& s) {
  Distribution d;
  d.p.resize(s.size());
  for (int j = 0; j < s.size(); ++j) d.p[j] = s.amplitudes().row(j).squaredNorm();
  return d;
}

WalkState walker_frame(const WalkState& s, int steps) {
  return steps % 2 == 0 ? s : s.transposed();
}

}  // namespace qwalk
