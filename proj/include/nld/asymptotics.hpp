#pragma once

// Large-time profiles u ~ u0(x - t) + G1(x - t), v ~ v0(x + t) + G2(x + t)
// extracted from the characteristic integrals of a trajectory, the residual
// norms against them, and the explicit tail envelopes built from the
// initial data alone.

#include <vector>

#include "nld/fields.hpp"
#include "nld/solver.hpp"

namespace nld {

enum class Side {
  right_mover,  ///< G1, label y = x - t
  left_mover,   ///< G2, label y = x + t
};

struct Profile {
  Side side = Side::right_mover;
  std::vector<double> y;       ///< characteristic labels (array positions at t = 0)
  std::vector<Complex> values; ///< -i int_0^{t_max} N along the characteristic
  double t_max = 0.0;
  /// Rigorous L2 bound on the discarded part int_{t_max}^infinity.
  double tail_certificate = 0.0;
};

struct ResidualReport {
  double t = 0.0;
  double l2_u = 0.0;
  double sup_u = 0.0;
  double l2_v = 0.0;
  double sup_v = 0.0;
  double analytic_bound_u = 0.0;  ///< sqrt(tail_bound(t)), the L2 envelope for l2_u
  double analytic_bound_v = 0.0;
  double sup_bound_u = 0.0;       ///< sup_tail_bound(t, split_point)
  double sup_bound_v = 0.0;
  double h = 0.0;
};

/// Profile truncated at `horizon` (default: the end of the run).  The
/// horizon must be a recorded time.
Profile compute_profile(const Trajectory& traj, Side side, std::optional<double> horizon = {});

/// Residual norms at the recorded time t.  `split_point` is the M of the
/// sup-norm envelope (mirrored to -M for the left mover).
ResidualReport residual(const Trajectory& traj, double t, const Profile& p_u, const Profile& p_v,
                        double split_point = -5.0);

/// Squared-L2 bound on i int_t^infinity N1 along the right movers:
///   c_star^2 / 4 e^{24|beta| C0} int |u0(y)|^2 (int_{y+2t}^infinity |v0|^2)^2 dy,
/// and the mirror image for the left movers.  C0 is the data's charge.
double tail_bound(const InitialData& data, const ModelParams& m, double t, Side side);

/// Uniform bound on the same remainder, split at the label M:
///   c_star e^{12|beta| C0} max(sup_{y<=M} |u0| ||v0||^2, ||u0||_inf / 2 int_{M+2t}^infinity |v0|^2).
/// The left mover uses the mirrored split at -M.
double sup_tail_bound(const InitialData& data, const ModelParams& m, double t, double split_point,
                      Side side);

}  // namespace nld
