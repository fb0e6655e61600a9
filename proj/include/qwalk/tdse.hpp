#pragma once

#include <utility>
#include <vector>

#include "qwalk/linalg.hpp"

namespace qwalk {

// Single-particle 1D dynamics in units with hbar = m* = 1. Wave functions are
// sampled on a periodic grid and normalized so that sum |psi_i|^2 dx = 1.

using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

struct SpatialGrid {
  double x_min = -12.0;
  double x_max = 12.0;
  int m = 160;

  SpatialGrid() = default;
  SpatialGrid(double lo, double hi, int points);

  double dx() const { return (x_max - x_min) / m; }
  double length() const { return x_max - x_min; }
  double x(int i) const { return x_min + i * dx(); }
  /// x_i measured from the grid midpoint, computed so mirror points are exact.
  double offset(int i) const { return (i - m / 2) * dx(); }
  /// Index of the mirror image of sample i about the midpoint.
  int mirror(int i) const { return (m - i) % m; }
  /// pi / dx
  double k_max() const;
};

/// Two inverted Gaussian wells at midpoint +- separation/2 plus a central
/// Gaussian barrier whose height is the control parameter. With separation
/// no larger than twice the well width the barrier-free potential has a
/// single minimum.
struct DoubleWellSpec {
  double well_depth = 8.0;
  double well_width = 1.5;
  double well_separation = 3.0;
  double barrier_width = 0.6;
  /// Barrier used to define the localized qubit states.
  double barrier_height = 20.0;
};

RVector build_double_well(const SpatialGrid& grid, const DoubleWellSpec& spec, double barrier);

/// Barrier-free part and unit-height barrier profile, so that
/// build_double_well(..., b) == base + b * profile.
std::pair<RVector, RVector> double_well_parts(const SpatialGrid& grid, const DoubleWellSpec& spec);

/// Cosine ramp from `high` to `low`, hold at `low`, cosine ramp back.
struct BarrierTimeline {
  double ramp_down = 25.0;
  double hold = 0.0;
  double ramp_up = 25.0;
  double high = 20.0;
  double low = 2.0;

  double total() const { return ramp_down + hold + ramp_up; }
  double barrier_at(double t) const;
};

/// (-1/2 d^2/dx^2 + V) psi with the derivative taken spectrally.
CVector apply_hamiltonian(const CVector& psi, const RVector& v, const SpatialGrid& grid);

/// Dense Hamiltonian matrix (real symmetric) built from the explicit Fourier
/// sum; for eigensolves at desk scale.
RMatrix dense_hamiltonian(const SpatialGrid& grid, const RVector& v);

/// (min V, max V + k_max^2 / 2); brackets the discretized spectrum.
std::pair<double, double> energy_bounds(const SpatialGrid& grid, const RVector& v);

struct ChebyshevParams {
  double dt = 0.02;
  double e_min = 0.0;
  double e_max = 1.0;
  double tail_tolerance = 1e-14;

  double alpha() const { return (e_max - e_min) * dt / 2.0; }
};

/// exp(-i H dt) by Chebyshev expansion for a fixed grid, step and spectral
/// window. The Bessel coefficients are computed once and reused across steps
/// with any potential that fits inside the window.
class ChebyshevPropagator {
 public:
  ChebyshevPropagator(const SpatialGrid& grid, const ChebyshevParams& params);

  /// Throws SpectralBoundsError if v does not fit the window or the norm
  /// grows by more than 1e-8.
  CVector step(const CVector& psi, const RVector& v) const;

  /// Number of series terms kept.
  int terms() const noexcept { return static_cast<int>(coeff_.size()); }
  const ChebyshevParams& params() const noexcept { return params_; }

 private:
  SpatialGrid grid_;
  ChebyshevParams params_;
  RVector kinetic_;
  std::vector<double> coeff_;
};

CVector chebyshev_step(const CVector& psi, const RVector& v, const SpatialGrid& grid,
                       const ChebyshevParams& params);

double norm_squared(const CVector& psi, const SpatialGrid& grid);
/// <a|b> with the dx weight.
Complex inner(const CVector& a, const CVector& b, const SpatialGrid& grid);
/// <psi|H|psi> (real part).
double energy(const CVector& psi, const RVector& v, const SpatialGrid& grid);

struct PropagationSettings {
  double dt = 0.02;
  double tail_tolerance = 1e-14;
  /// Keep every n-th step in the trajectory (the final state is always kept).
  int sample_every = 1;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<CVector> psi;
};

/// Propagates through the barrier timeline. Each step is a fourth-order
/// commutator-free Magnus step: two Chebyshev half-steps with constant
/// potentials mixed from the barrier at the two Gauss points. The step is
/// shortened so that an integer number of steps covers the timeline; each
/// nonzero ramp must get at least 16 steps.
Trajectory evolve_timeline(const CVector& psi0, const SpatialGrid& grid,
                           const DoubleWellSpec& spec, const BarrierTimeline& timeline,
                           const PropagationSettings& settings);

struct QubitBasis {
  CVector left;
  CVector right;
};

/// Left/right localized combinations of the two lowest eigenstates at
/// spec.barrier_height, each real positive at its own well minimum.
QubitBasis well_ground_states(const SpatialGrid& grid, const DoubleWellSpec& spec);

/// Energy gap between the two lowest eigenstates at the given barrier.
double doublet_splitting(const SpatialGrid& grid, const DoubleWellSpec& spec, double barrier);

struct QubitProjection {
  Complex alpha;
  Complex beta;
  double leakage = 0.0;
};

QubitProjection qubit_projection(const CVector& psi, const QubitBasis& basis,
                                 const SpatialGrid& grid);

struct BlochSample {
  double t = 0.0;
  double abs_alpha = 0.0;
  double abs_beta = 0.0;
  /// arg(beta / alpha), NaN when either modulus is below 1e-6.
  double relative_phase = 0.0;
  double leakage = 0.0;
  double norm = 0.0;

  bool phase_defined() const;
};

std::vector<BlochSample> bloch_trajectory(const Trajectory& traj, const QubitBasis& basis,
                                          const SpatialGrid& grid);

/// Delimited text: t, |alpha|^2, |beta|^2, relative_phase, leakage, norm.
std::string bloch_tsv(const std::vector<BlochSample>& samples);

struct CalibrationResult {
  double hold = 0.0;
  double achieved = 0.0;
  double leakage = 0.0;
  double relative_phase = 0.0;
  double max_transfer = 0.0;
  int evaluations = 0;
};

struct CalibrationOptions {
  double tolerance = 0.005;
  /// Scan points across the search window.
  int scan_points = 32;
  /// Window length in units of the low-barrier oscillation period.
  double periods = 1.25;
};

/// Hold duration that takes the left-localized state to the target transfer
/// probability |beta|^2 for the template's ramps and barrier levels.
/// Throws CalibrationError if no duration in the window gets within tolerance.
CalibrationResult calibrate_hold_time(const SpatialGrid& grid, const DoubleWellSpec& spec,
                                      const BarrierTimeline& timeline_template,
                                      double target_transfer,
                                      const PropagationSettings& settings,
                                      const CalibrationOptions& options = {});

}  // namespace qwalk
