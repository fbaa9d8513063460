#pragma once

// Characteristic solver on the unit-CFL lattice.
//
// Along x - t = const the right mover obeys du/ds = -i N1(u, v); along
// x + t = const the left mover obeys dv/ds = -i N2(u, v).  With dt = h both
// families pass through lattice nodes, so one step is a node-local update
// from u[j-1] and v[j+1] with no interpolation.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "nld/fields.hpp"

namespace nld {

enum class SchemeKind {
  trapezoidal,  ///< implicit trapezoidal rule, per-node 2x2 fixed point (default)
  phase_split,  ///< exact modulus transport with midpoint phase rotation, beta == 0 only
  oracle4,      ///< classical RK4 with half-node partner values; a test oracle
};

std::string_view to_string(SchemeKind kind) noexcept;
std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept;

struct Scheme {
  SchemeKind kind = SchemeKind::trapezoidal;
  double fixed_point_tol = 1e-12;
  int fixed_point_max_iter = 50;
};

struct StepStats {
  int max_iterations = 0;  ///< worst per-node fixed-point count (trapezoidal only)
};

/// Abort threshold on max(|u|, |v|).
inline constexpr double kBlowUpThreshold = 1e6;

SpinorField init_state(const InitialData& data, const Grid& grid);

/// One step of size field.h.  Throws Error(fixed_point_divergence) when a
/// node fails to converge and Error(blow_up) when the state leaves the
/// finite range.
SpinorField step(const SpinorField& state, const ModelParams& m, const Scheme& s,
                 StepStats* stats = nullptr);

/// Per-step |u|^2, |v|^2 on a spatial window, for checks that walk
/// characteristic lines through every time level.
struct DensityFrames {
  std::size_t j_lo = 0;  ///< first array index in the window
  std::size_t j_hi = 0;  ///< one past the last
  std::vector<std::vector<double>> u2;  ///< u2[n][j - j_lo] at t = n h
  std::vector<std::vector<double>> v2;

  std::size_t steps() const noexcept { return u2.empty() ? 0 : u2.size() - 1; }
  bool covers(std::size_t j, std::size_t n) const noexcept {
    return j >= j_lo && j < j_hi && n < u2.size();
  }
};

struct DenseWindow {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double t_hi = 0.0;
};

/// Quadrature along the characteristics of the N-values, per foot point.
/// Label i is the array index of the foot point at t = 0: the right mover
/// with label i sits at index i + n after n steps, the left mover at i - n.
struct CharIntegrals {
  double t = 0.0;
  std::size_t steps = 0;
  std::vector<Complex> n1;  ///< int_0^t N1(u(y+s,s), v(y+s,s)) ds
  std::vector<Complex> n2;  ///< int_0^t N2(u(z-s,s), v(z-s,s)) ds
};

enum class TraceRule {
  scheme,   ///< the increments the scheme itself adds to the deviation, e.g. h/2 (N_k + N_{k+1})
  simpson,  ///< Simpson rule on node values of N; needs an even step count at every readout
};

/// Per-step maxima over every lattice node, gathered while the run advances.
struct TransportMonitor {
  /// max | |u(x,t)| - |u0(x-t)| | and the left-mover analogue
  double modulus_defect = 0.0;
  /// max |u(x,t)|^2 - e^{8|beta| c0} |u0(x-t)|^2 and the left-mover analogue
  double envelope_violation = 0.0;
};

struct Trajectory {
  Grid grid;
  ModelParams params;
  Scheme scheme;
  InitialData data;
  std::vector<SpinorField> snapshots;     ///< t = 0 and every requested time, ascending
  std::vector<CharIntegrals> char_traces; ///< one per snapshot, same times
  std::optional<DensityFrames> dense;
  TraceRule trace_rule = TraceRule::scheme;
  std::size_t steps_completed = 0;
  int max_fixed_point_iterations = 0;
  TransportMonitor monitor;

  const SpinorField* snapshot_at(double t) const noexcept;
  const CharIntegrals* traces_at(double t) const noexcept;
  double t_max() const noexcept { return static_cast<double>(steps_completed) * grid.h(); }
};

struct RunOptions {
  std::vector<double> record_times;
  std::optional<DenseWindow> dense;
  bool monitor = true;  ///< fill Trajectory::monitor
};

/// Advances data over grid.n_steps() steps.  The final time is always
/// recorded.  oracle4 traces use the Simpson rule, the other schemes record
/// their own increments.
Trajectory run(const InitialData& data, const Grid& grid, const ModelParams& m, const Scheme& s,
               const RunOptions& options);

/// Values of a fine field at the nodes of a coarser lattice covering the
/// same window; `factor` is the ratio of the spacings.
SpinorField restrict_to(const SpinorField& fine, const Grid& fine_grid, const Grid& coarse_grid,
                        std::size_t factor);

/// Number of worker threads (NLD_NUM_THREADS, default: hardware).
int thread_count() noexcept;

}  // namespace nld
