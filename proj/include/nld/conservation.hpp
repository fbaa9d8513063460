#pragma once

// Numerical certificates for the charge identities: global conservation, the
// balance law on backward characteristic triangles, and the pointwise
// exponential envelope along characteristics.

#include "nld/fields.hpp"
#include "nld/solver.hpp"

namespace nld {

struct BalanceReport {
  TriangleRegion region;
  double tau = 0.0;
  double interior_charge = 0.0;  ///< int_{a-t0+tau}^{b+t0-tau} |u|^2 + |v|^2 at t = tau
  double right_flux = 0.0;       ///< 2 int_{t0}^{tau} |u(b+t0-s, s)|^2 ds
  double left_flux = 0.0;        ///< 2 int_{t0}^{tau} |v(a-t0+s, s)|^2 ds
  double initial_charge = 0.0;   ///< int_a^b |u|^2 + |v|^2 at t = t0
  double defect = 0.0;           ///< interior + right + left - initial
};

/// max over snapshots of |Q(t) - Q(0)| / max(Q(0), 1e-300).
double total_charge_drift(const Trajectory& traj);

/// Requires the trajectory's density frames to cover the region up to tau.
BalanceReport triangle_balance(const Trajectory& traj, const TriangleRegion& region, double tau);

/// Largest value of |u(x,t)|^2 - e^{8|beta| c0} |u0(x-t)|^2 and of the
/// left-mover analogue over every recorded node (snapshots and density
/// frames).  Non-positive when the envelope holds.
double check_pointwise_bound(const Trajectory& traj, double c0);

}  // namespace nld
