#include "nld/conservation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nld {

namespace {

std::size_t lattice_index(const Grid& g, double x, const char* what) {
  const auto j = g.index_of(x);
  if (!j) {
    std::ostringstream os;
    os << "triangle_balance: " << what << " = " << x << " is not a lattice node of the grid";
    throw Error(ErrorCode::off_lattice, os.str());
  }
  return *j;
}

std::size_t lattice_step(const Grid& g, double t, const char* what) {
  const auto k = lattice_multiple(t, g.h());
  if (!k || *k < 0) {
    std::ostringstream os;
    os << "triangle_balance: " << what << " = " << t << " is not a non-negative multiple of h";
    throw Error(ErrorCode::off_lattice, os.str());
  }
  return static_cast<std::size_t>(*k);
}

// Trapezoid sum of samples f(0..m) with unit spacing; a single point integrates to zero.
template <class F>
double trapezoid(std::size_t m, F&& f) {
  if (m == 0) return 0.0;
  double sum = 0.5 * (f(0) + f(m));
  for (std::size_t k = 1; k < m; ++k) sum += f(k);
  return sum;
}

}  // namespace

double total_charge_drift(const Trajectory& traj) {
  if (traj.snapshots.empty()) return 0.0;
  const double q0 = charge(traj.snapshots.front());
  double worst = 0.0;
  for (const auto& s : traj.snapshots) worst = std::max(worst, std::abs(charge(s) - q0));
  return worst / std::max(q0, 1e-300);
}

BalanceReport triangle_balance(const Trajectory& traj, const TriangleRegion& region, double tau) {
  const Grid& g = traj.grid;
  if (!(region.a < region.b))
    throw Error(ErrorCode::invalid_argument, "triangle_balance: need a < b");
  const std::size_t ja = lattice_index(g, region.a, "a");
  const std::size_t jb = lattice_index(g, region.b, "b");
  const std::size_t n0 = lattice_step(g, region.t0, "t0");
  const std::size_t n1 = lattice_step(g, tau, "tau");
  const std::size_t half_width = (jb - ja) / 2;
  if (n1 < n0 || n1 - n0 > half_width)
    throw Error(ErrorCode::invalid_argument, "triangle_balance: need t0 <= tau <= (b - a)/2 + t0");

  if (!traj.dense)
    throw Error(ErrorCode::missing_data,
                "triangle_balance: trajectory has no per-step density frames (enable dense recording)");
  const DensityFrames& d = *traj.dense;
  if (!d.covers(ja, n1) || !d.covers(jb, n1) || n1 > d.steps())
    throw Error(ErrorCode::missing_data,
                "triangle_balance: region lies outside the recorded density window");

  const auto density = [&](std::size_t j, std::size_t n) {
    return d.u2[n][j - d.j_lo] + d.v2[n][j - d.j_lo];
  };
  const double h = g.h();
  const std::size_t m = n1 - n0;

  BalanceReport r;
  r.region = region;
  r.tau = tau;
  // Base: x from a to b at t0.  Top: x from a + m h to b - m h at tau.
  r.initial_charge = h * trapezoid(jb - ja, [&](std::size_t k) { return density(ja + k, n0); });
  r.interior_charge =
      h * trapezoid(jb - ja - 2 * m, [&](std::size_t k) { return density(ja + m + k, n1); });
  // Sides: (b + t0 - s, s) and (a - t0 + s, s) land on nodes jb - k, ja + k at step n0 + k.
  r.right_flux = 2.0 * h * trapezoid(m, [&](std::size_t k) { return d.u2[n0 + k][jb - k - d.j_lo]; });
  r.left_flux = 2.0 * h * trapezoid(m, [&](std::size_t k) { return d.v2[n0 + k][ja + k - d.j_lo]; });
  r.defect = r.interior_charge + r.right_flux + r.left_flux - r.initial_charge;
  return r;
}

double check_pointwise_bound(const Trajectory& traj, double c0) {
  const double factor = std::exp(8.0 * std::abs(traj.params.beta) * c0);
  const auto& u0 = traj.data.u0();
  const auto& v0 = traj.data.v0();
  const std::size_t n = u0.size();
  const auto origin_u = [&](std::size_t j, std::size_t step) {
    return j >= step ? std::norm(u0[j - step]) : 0.0;
  };
  const auto origin_v = [&](std::size_t j, std::size_t step) {
    return j + step < n ? std::norm(v0[j + step]) : 0.0;
  };

  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snapshots) {
    const std::size_t step = *traj.grid.step_of(s.t);
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max(worst, std::norm(s.u[j]) - factor * origin_u(j, step));
      worst = std::max(worst, std::norm(s.v[j]) - factor * origin_v(j, step));
    }
  }
  if (traj.dense) {
    const auto& d = *traj.dense;
    for (std::size_t step = 0; step < d.u2.size(); ++step)
      for (std::size_t j = d.j_lo; j < d.j_hi; ++j) {
        worst = std::max(worst, d.u2[step][j - d.j_lo] - factor * origin_u(j, step));
        worst = std::max(worst, d.v2[step][j - d.j_lo] - factor * origin_v(j, step));
      }
  }
  return std::isfinite(worst) ? worst : 0.0;
}

}  // namespace nld
