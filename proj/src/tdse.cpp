#include "qwalk/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

using std::numbers::pi;

double gaussian(double x, double width) { return std::exp(-x * x / (2.0 * width * width)); }

// k^2/2 in FFT storage order.
RVector kinetic_multipliers(const SpatialGrid& grid) {
  const int m = grid.m;
  RVector t(m);
  const double dk = 2.0 * pi / grid.length();
  for (int j = 0; j < m; ++j) {
    const double k = (j < m / 2 ? j : j - m) * dk;
    t(j) = 0.5 * k * k;
  }
  return t;
}

CVector apply_kinetic(const CVector& psi, const RVector& kinetic, Eigen::FFT<double>& fft) {
  std::vector<Complex> in(psi.data(), psi.data() + psi.size()), spec, out;
  fft.fwd(spec, in);
  for (std::size_t j = 0; j < spec.size(); ++j) spec[j] *= kinetic(static_cast<Eigen::Index>(j));
  fft.inv(out, spec);
  return Eigen::Map<CVector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

void check_potential(const SpatialGrid& grid, const RVector& v) {
  if (v.size() != grid.m) throw std::invalid_argument("potential length does not match grid");
}

double window_slack(double e) { return 1e-12 * std::max(1.0, std::abs(e)); }

}  // namespace

SpatialGrid::SpatialGrid(double lo, double hi, int points) : x_min(lo), x_max(hi), m(points) {
  if (m < 16) throw std::invalid_argument("spatial grid needs at least 16 points");
  if (!(hi > lo)) throw std::invalid_argument("spatial grid needs x_max > x_min");
}

double SpatialGrid::k_max() const { return pi / dx(); }

std::pair<RVector, RVector> double_well_parts(const SpatialGrid& grid, const DoubleWellSpec& spec) {
  if (spec.well_width <= 0.0 || spec.barrier_width <= 0.0) {
    throw std::invalid_argument("well and barrier widths must be positive");
  }
  const double half = spec.well_separation / 2.0;
  RVector base(grid.m), profile(grid.m);
  for (int i = 0; i < grid.m; ++i) {
    const double x = grid.offset(i);
    base(i) = -spec.well_depth *
              (gaussian(x - half, spec.well_width) + gaussian(x + half, spec.well_width));
    profile(i) = gaussian(x, spec.barrier_width);
  }
  return {base, profile};
}

RVector build_double_well(const SpatialGrid& grid, const DoubleWellSpec& spec, double barrier) {
  if (barrier < 0.0) throw std::invalid_argument("barrier height must be non-negative");
  auto [base, profile] = double_well_parts(grid, spec);
  return base + barrier * profile;
}

double BarrierTimeline::barrier_at(double t) const {
  if (t <= 0.0) return high;
  if (t < ramp_down) return low + (high - low) * 0.5 * (1.0 + std::cos(pi * t / ramp_down));
  t -= ramp_down;
  if (t <= hold) return low;
  t -= hold;
  if (t < ramp_up) return low + (high - low) * 0.5 * (1.0 - std::cos(pi * t / ramp_up));
  return high;
}

CVector apply_hamiltonian(const CVector& psi, const RVector& v, const SpatialGrid& grid) {
  check_potential(grid, v);
  if (psi.size() != grid.m) throw std::invalid_argument("wave function length does not match grid");
  Eigen::FFT<double> fft;
  CVector out = apply_kinetic(psi, kinetic_multipliers(grid), fft);
  out += v.cast<Complex>().cwiseProduct(psi);
  return out;
}

RMatrix dense_hamiltonian(const SpatialGrid& grid, const RVector& v) {
  check_potential(grid, v);
  const int m = grid.m;
  const RVector kin = kinetic_multipliers(grid);
  const double dk = 2.0 * pi / grid.length();
  // Kinetic kernel depends only on (i - j) mod m.
  RVector kernel(m);
  for (int d = 0; d < m; ++d) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      const double k = (j < m / 2 ? j : j - m) * dk;
      s += kin(j) * std::cos(k * d * grid.dx());
    }
    kernel(d) = s / m;
  }
  RMatrix h(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) h(i, j) = kernel((i - j + m) % m);
  }
  h.diagonal() += v;
  return h;
}

std::pair<double, double> energy_bounds(const SpatialGrid& grid, const RVector& v) {
  check_potential(grid, v);
  const double km = grid.k_max();
  return {v.minCoeff(), v.maxCoeff() + 0.5 * km * km};
}

ChebyshevPropagator::ChebyshevPropagator(const SpatialGrid& grid, const ChebyshevParams& params)
    : grid_(grid), params_(params), kinetic_(kinetic_multipliers(grid)) {
  if (!(params.e_max > params.e_min)) throw std::invalid_argument("need e_max > e_min");
  if (!(params.tail_tolerance > 0.0 && params.tail_tolerance <= 1e-8)) {
    throw std::invalid_argument("tail tolerance must lie in (0, 1e-8]");
  }
  if (params.dt == 0.0) throw std::invalid_argument("time step must be nonzero");
  const double a = std::abs(params.alpha());
  const int hard_cap = static_cast<int>(a) + 400;
  for (int n = 0;; ++n) {
    if (n > hard_cap) throw ToleranceError("Chebyshev series failed to converge");
    const double j = std::cyl_bessel_j(static_cast<double>(n), a);
    if (n > a && std::abs(j) < params.tail_tolerance) break;
    const double sign = (params.alpha() < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
    coeff_.push_back((n == 0 ? 1.0 : 2.0) * sign * j);
  }
  if (params.tail_tolerance >= 1e-14 && terms() > a + 60.0) {
    throw ToleranceError("Chebyshev truncation order " + std::to_string(terms()) +
                         " exceeds alpha + 60");
  }
}

CVector ChebyshevPropagator::step(const CVector& psi, const RVector& v) const {
  check_potential(grid_, v);
  const auto [lo, hi] = energy_bounds(grid_, v);
  if (lo < params_.e_min - window_slack(params_.e_min) ||
      hi > params_.e_max + window_slack(params_.e_max)) {
    throw SpectralBoundsError("potential spectrum [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "] exceeds the Chebyshev window");
  }
  const double span = params_.e_max - params_.e_min;
  const double mid = params_.e_max + params_.e_min;
  Eigen::FFT<double> fft;
  const CVector vc = v.cast<Complex>();
  // -i * Hnorm * phi, Hnorm = (2H - mid) / span
  auto minus_i_hnorm = [&](const CVector& phi) -> CVector {
    CVector h = apply_kinetic(phi, kinetic_, fft) + vc.cwiseProduct(phi);
    return Complex(0.0, -1.0) * ((2.0 * h - mid * phi) / span);
  };

  CVector prev = psi;
  CVector out = coeff_[0] * prev;
  if (coeff_.size() > 1) {
    CVector cur = minus_i_hnorm(prev);
    out += coeff_[1] * cur;
    for (std::size_t n = 2; n < coeff_.size(); ++n) {
      CVector next = 2.0 * minus_i_hnorm(cur) + prev;
      out += coeff_[n] * next;
      prev = std::move(cur);
      cur = std::move(next);
    }
  }
  out *= std::polar(1.0, -mid * params_.dt / 2.0);

  const double before = psi.squaredNorm();
  const double after = out.squaredNorm();
  if (after > before * (1.0 + 1e-8)) {
    throw SpectralBoundsError("norm grew by " + std::to_string(after / before - 1.0) +
                              " in one step; spectral bounds are too tight");
  }
  return out;
}

CVector chebyshev_step(const CVector& psi, const RVector& v, const SpatialGrid& grid,
                       const ChebyshevParams& params) {
  return ChebyshevPropagator(grid, params).step(psi, v);
}

double norm_squared(const CVector& psi, const SpatialGrid& grid) {
  return psi.squaredNorm() * grid.dx();
}

Complex inner(const CVector& a, const CVector& b, const SpatialGrid& grid) {
  return a.dot(b) * grid.dx();
}

double energy(const CVector& psi, const RVector& v, const SpatialGrid& grid) {
  return inner(psi, apply_hamiltonian(psi, v, grid), grid).real();
}

Trajectory evolve_timeline(const CVector& psi0, const SpatialGrid& grid,
                           const DoubleWellSpec& spec, const BarrierTimeline& timeline,
                           const PropagationSettings& settings) {
  if (timeline.ramp_down < 0.0 || timeline.hold < 0.0 || timeline.ramp_up < 0.0) {
    throw std::invalid_argument("timeline durations must be non-negative");
  }
  if (timeline.high < 0.0 || timeline.low < 0.0) {
    throw std::invalid_argument("barrier heights must be non-negative");
  }
  if (!(settings.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (psi0.size() != grid.m) throw std::invalid_argument("wave function length does not match grid");

  Trajectory traj;
  traj.t.push_back(0.0);
  traj.psi.push_back(psi0);
  const double total = timeline.total();
  if (total == 0.0) return traj;

  const long steps = std::max(1L, static_cast<long>(std::ceil(total / settings.dt - 1e-9)));
  const double dt = total / static_cast<double>(steps);
  for (double ramp : {timeline.ramp_down, timeline.ramp_up}) {
    if (ramp > 0.0 && ramp / dt < 16.0 - 1e-9) {
      throw std::invalid_argument("time step " + std::to_string(dt) +
                                  " gives fewer than 16 steps per ramp");
    }
  }

  // Fourth-order commutator-free Magnus: two half-steps whose barriers are
  // weighted mixes of the two Gauss-point samples. The weights overshoot the
  // sampled range slightly, so the window is widened to cover that.
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double w1 = (3.0 - 2.0 * std::sqrt(3.0)) / 6.0, w2 = (3.0 + 2.0 * std::sqrt(3.0)) / 6.0;
  const double b_lo = std::min(timeline.low, timeline.high);
  const double b_hi = std::max(timeline.low, timeline.high);
  const double overshoot = -w1 * (b_hi - b_lo);

  const auto [base, profile] = double_well_parts(grid, spec);
  const auto [lo_a, hi_a] = energy_bounds(grid, base + (b_lo - overshoot) * profile);
  const auto [lo_b, hi_b] = energy_bounds(grid, base + (b_hi + overshoot) * profile);
  ChebyshevParams params;
  params.dt = dt / 2.0;
  params.e_min = std::min(lo_a, lo_b);
  params.e_max = std::max(hi_a, hi_b);
  params.tail_tolerance = settings.tail_tolerance;
  const ChebyshevPropagator prop(grid, params);

  const int every = std::max(1, settings.sample_every);
  CVector psi = psi0;
  for (long s = 0; s < steps; ++s) {
    const double t0 = static_cast<double>(s) * dt;
    const double b1 = timeline.barrier_at(t0 + c1 * dt), b2 = timeline.barrier_at(t0 + c2 * dt);
    psi = prop.step(psi, base + (w2 * b1 + w1 * b2) * profile);
    psi = prop.step(psi, base + (w1 * b1 + w2 * b2) * profile);
    if ((s + 1) % every == 0 || s + 1 == steps) {
      traj.t.push_back(static_cast<double>(s + 1) * dt);
      traj.psi.push_back(psi);
    }
  }
  return traj;
}

namespace {

struct Doublet {
  RVector even;
  RVector odd;
  double splitting;
};

Doublet lowest_doublet(const SpatialGrid& grid, const DoubleWellSpec& spec, double barrier) {
  const RMatrix h = dense_hamiltonian(grid, build_double_well(grid, spec, barrier));
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  Doublet d{es.eigenvectors().col(0), es.eigenvectors().col(1),
            es.eigenvalues()(1) - es.eigenvalues()(0)};
  // Project onto exact parity sectors; a near-degenerate pair otherwise mixes
  // at the level of eps * |H| / splitting.
  auto parity = [&](const RVector& u, double sign) {
    RVector out(grid.m);
    for (int i = 0; i < grid.m; ++i) out(i) = 0.5 * (u(i) + sign * u(grid.mirror(i)));
    return out;
  };
  RVector g_even = parity(d.even, 1.0), e_odd = parity(d.odd, -1.0);
  if (g_even.norm() < 0.5 || e_odd.norm() < 0.5) {
    throw std::runtime_error("lowest doublet is not an even/odd pair; are the wells symmetric?");
  }
  d.even = g_even.normalized();
  d.odd = e_odd.normalized();
  return d;
}

}  // namespace

QubitBasis well_ground_states(const SpatialGrid& grid, const DoubleWellSpec& spec) {
  Doublet d = lowest_doublet(grid, spec, spec.barrier_height);
  const int left_min = static_cast<int>(
      std::lround(grid.m / 2.0 - spec.well_separation / 2.0 / grid.dx()));
  if (left_min < 0 || left_min >= grid.m) throw std::invalid_argument("wells lie outside the grid");
  if (d.even(left_min) < 0.0) d.even = -d.even;
  if (d.odd(left_min) < 0.0) d.odd = -d.odd;
  const double scale = 1.0 / std::sqrt(2.0 * grid.dx());
  QubitBasis basis;
  basis.left = ((d.even + d.odd) * scale).cast<Complex>();
  basis.right = ((d.even - d.odd) * scale).cast<Complex>();
  return basis;
}

double doublet_splitting(const SpatialGrid& grid, const DoubleWellSpec& spec, double barrier) {
  const RMatrix h = dense_hamiltonian(grid, build_double_well(grid, spec, barrier));
  Eigen::SelfAdjointEigenSolver<RMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

QubitProjection qubit_projection(const CVector& psi, const QubitBasis& basis,
                                 const SpatialGrid& grid) {
  QubitProjection q;
  q.alpha = inner(basis.left, psi, grid);
  q.beta = inner(basis.right, psi, grid);
  q.leakage = 1.0 - std::norm(q.alpha) - std::norm(q.beta);
  return q;
}

bool BlochSample::phase_defined() const { return !std::isnan(relative_phase); }

std::vector<BlochSample> bloch_trajectory(const Trajectory& traj, const QubitBasis& basis,
                                          const SpatialGrid& grid) {
  std::vector<BlochSample> out;
  out.reserve(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const auto q = qubit_projection(traj.psi[i], basis, grid);
    BlochSample s;
    s.t = traj.t[i];
    s.abs_alpha = std::abs(q.alpha);
    s.abs_beta = std::abs(q.beta);
    s.relative_phase = (s.abs_alpha > 1e-6 && s.abs_beta > 1e-6)
                           ? std::arg(q.beta / q.alpha)
                           : std::numeric_limits<double>::quiet_NaN();
    s.leakage = q.leakage;
    s.norm = norm_squared(traj.psi[i], grid);
    out.push_back(s);
  }
  return out;
}

std::string bloch_tsv(const std::vector<BlochSample>& samples) {
  std::ostringstream os;
  os << "# t\talpha2\tbeta2\trelative_phase\tleakage\tnorm\n";
  char buf[256], phase[32];
  for (const auto& s : samples) {
    if (s.phase_defined()) {
      std::snprintf(phase, sizeof phase, "%.12g", s.relative_phase);
    } else {
      std::snprintf(phase, sizeof phase, "nan");
    }
    std::snprintf(buf, sizeof buf, "%.10g\t%.12g\t%.12g\t%s\t%.6e\t%.15g\n", s.t,
                  s.abs_alpha * s.abs_alpha, s.abs_beta * s.abs_beta, phase, s.leakage, s.norm);
    os << buf;
  }
  return os.str();
}

namespace {

struct GateOutcome {
  double transfer;
  double leakage;
  double phase;
};

class GateEvaluator {
 public:
  GateEvaluator(const SpatialGrid& grid, const DoubleWellSpec& spec, BarrierTimeline tmpl,
                const PropagationSettings& settings)
      : grid_(grid), spec_(spec), tmpl_(tmpl), settings_(settings),
        basis_(well_ground_states(grid, spec)) {
    settings_.sample_every = std::numeric_limits<int>::max();
  }

  GateOutcome operator()(double hold) {
    ++evaluations;
    BarrierTimeline tl = tmpl_;
    tl.hold = hold;
    const Trajectory traj = evolve_timeline(basis_.left, grid_, spec_, tl, settings_);
    const auto q = qubit_projection(traj.psi.back(), basis_, grid_);
    const double t = std::norm(q.beta);
    max_transfer = std::max(max_transfer, t);
    return {t, q.leakage, std::arg(q.beta / q.alpha)};
  }

  int evaluations = 0;
  double max_transfer = 0.0;

 private:
  SpatialGrid grid_;
  DoubleWellSpec spec_;
  BarrierTimeline tmpl_;
  PropagationSettings settings_;
  QubitBasis basis_;
};

}  // namespace

CalibrationResult calibrate_hold_time(const SpatialGrid& grid, const DoubleWellSpec& spec,
                                      const BarrierTimeline& timeline_template,
                                      double target_transfer,
                                      const PropagationSettings& settings,
                                      const CalibrationOptions& options) {
  if (!(target_transfer >= 0.0 && target_transfer <= 1.0)) {
    throw std::invalid_argument("target transfer must lie in [0, 1]");
  }
  if (options.scan_points < 3) throw std::invalid_argument("need at least 3 scan points");
  GateEvaluator eval(grid, spec, timeline_template, settings);

  const double period = 2.0 * pi / doublet_splitting(grid, spec, timeline_template.low);
  const double window = options.periods * period;
  const int n = options.scan_points;
  // Scan lazily from short holds up; the first usable bracket gives the
  // smallest duration, so later points are never needed.
  std::vector<double> holds(n), cache(n, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < n; ++i) holds[i] = window * i / (n - 1);
  auto value = [&](int i) {
    if (std::isnan(cache[i])) cache[i] = eval(holds[i]).transfer - target_transfer;
    return cache[i];
  };

  auto finish = [&](double hold) {
    const GateOutcome g = eval(hold);
    CalibrationResult r;
    r.hold = hold;
    r.achieved = g.transfer;
    r.leakage = g.leakage;
    r.relative_phase = g.phase;
    r.max_transfer = eval.max_transfer;
    r.evaluations = eval.evaluations;
    return r;
  };
  const double tol = options.tolerance;

  for (int i = 0; i + 1 < n; ++i) {
    if (std::abs(value(i)) <= tol / 4) return finish(holds[i]);
    // Crossing inside [i, i+1]: bisect.
    if ((value(i) < 0.0) != (value(i + 1) < 0.0)) {
      double a = holds[i], b = holds[i + 1], fa = value(i);
      for (int it = 0; it < 60 && b - a > 1e-9; ++it) {
        const double c = 0.5 * (a + b);
        const double fc = eval(c).transfer - target_transfer;
        if (std::abs(fc) <= tol / 4) return finish(c);
        if ((fc < 0.0) == (fa < 0.0)) {
          a = c;
          fa = fc;
        } else {
          b = c;
        }
      }
      return finish(0.5 * (a + b));
    }
    // Extremum at i+1 that approaches the target without crossing it.
    if (i + 2 < n) {
      const double f0 = value(i), f1 = value(i + 1), f2 = value(i + 2);
      const bool peak = f1 >= f0 && f1 >= f2 && f1 < 0.0;
      const bool dip = f1 <= f0 && f1 <= f2 && f1 > 0.0;
      if (peak || dip) {
        const double sign = peak ? 1.0 : -1.0;
        double a = holds[i], b = holds[i + 2];
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = sign * eval(c).transfer, fd = sign * eval(d).transfer;
        for (int it = 0; it < 40 && b - a > 1e-6; ++it) {
          if (std::abs(sign * std::max(fc, fd) - target_transfer) <= tol / 4) break;
          if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = sign * eval(c).transfer;
          } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = sign * eval(d).transfer;
          }
        }
        const double best = fc > fd ? c : d;
        const double reached = sign * std::max(fc, fd);
        if (std::abs(reached - target_transfer) <= tol) return finish(best);
      }
    }
  }
  if (std::abs(value(n - 1)) <= tol) return finish(holds[n - 1]);
  throw CalibrationError("transfer never reaches " + std::to_string(target_transfer) +
                             " (max achieved " + std::to_string(eval.max_transfer) + ")",
                         eval.max_transfer);
}

}  // namespace qwalk
