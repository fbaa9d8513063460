#include "nld/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nld {

namespace {

// Characteristic labels move 2t apart between the two families; t is rounded
// down to the lattice so the inner integrals only get longer.
std::size_t overlap_shift(double t, double h) {
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_argument, "tail bound: t must be non-negative");
  return 2 * static_cast<std::size_t>(std::floor(t / h + 1e-9));
}

std::vector<double> densities(const std::vector<Complex>& a) {
  std::vector<double> out(a.size());
  std::transform(a.begin(), a.end(), out.begin(), [](Complex z) { return std::norm(z); });
  return out;
}

// suffix[k] = int_{x_k}^{x_end} f, trapezoid rule.
std::vector<double> suffix_integral(const std::vector<double>& f, double h) {
  std::vector<double> s(f.size(), 0.0);
  for (std::size_t k = f.size(); k-- > 1;) s[k - 1] = s[k] + 0.5 * h * (f[k - 1] + f[k]);
  return s;
}

// prefix[k] = int_{x_0}^{x_k} f, trapezoid rule.
std::vector<double> prefix_integral(const std::vector<double>& f, double h) {
  std::vector<double> p(f.size(), 0.0);
  for (std::size_t k = 1; k < f.size(); ++k) p[k] = p[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
  return p;
}

double max_abs(const std::vector<Complex>& a, std::size_t lo, std::size_t hi) {
  double m = 0.0;
  for (std::size_t k = lo; k < hi; ++k) m = std::max(m, std::abs(a[k]));
  return m;
}

// sqrt(h sum |a|^2), scaled by the largest entry so tiny remainders do not underflow.
double scaled_l2(const std::vector<Complex>& a, double peak, double h) {
  if (peak == 0.0) return 0.0;
  double sum = 0.0;
  for (Complex z : a) sum += std::norm(z / peak);
  return peak * std::sqrt(h * sum);
}

}  // namespace

Profile compute_profile(const Trajectory& traj, Side side, std::optional<double> horizon) {
  const CharIntegrals* traces = nullptr;
  if (horizon) {
    traces = traj.traces_at(*horizon);
  } else if (!traj.char_traces.empty()) {
    traces = &traj.char_traces.back();
  }
  if (!traces) {
    std::ostringstream os;
    os << "compute_profile: no characteristic traces recorded";
    if (horizon) os << " at t = " << *horizon;
    throw Error(ErrorCode::missing_data, os.str());
  }

  Profile p;
  p.side = side;
  p.t_max = traces->t;
  const auto& integral = side == Side::right_mover ? traces->n1 : traces->n2;
  p.values.resize(integral.size());
  p.y.resize(integral.size());
  for (std::size_t i = 0; i < integral.size(); ++i) {
    p.values[i] = {integral[i].imag(), -integral[i].real()};
    p.y[i] = traj.grid.x(i);
  }
  p.tail_certificate = std::sqrt(tail_bound(traj.data, traj.params, p.t_max, side));
  return p;
}

ResidualReport residual(const Trajectory& traj, double t, const Profile& p_u, const Profile& p_v,
                        double split_point) {
  const SpinorField* snap = traj.snapshot_at(t);
  if (!snap) {
    std::ostringstream os;
    os << "residual: t = " << t << " is not a recorded snapshot time";
    throw Error(ErrorCode::missing_data, os.str());
  }
  const std::size_t n = traj.grid.size();
  if (p_u.values.size() != n || p_v.values.size() != n || p_u.side != Side::right_mover ||
      p_v.side != Side::left_mover)
    throw Error(ErrorCode::grid_mismatch, "residual: profiles do not belong to this trajectory");

  const std::size_t step = *traj.grid.step_of(t);
  // The remainder is the deviation from free transport minus the profile.
  // Forming it from the deviation avoids cancelling against u0 itself.
  const bool split = snap->has_split();
  const auto& dev_u = split ? snap->u_dev : snap->u;
  const auto& dev_v = split ? snap->v_dev : snap->v;
  const auto& u0 = traj.data.u0();
  const auto& v0 = traj.data.v0();
  std::vector<Complex> ru(dev_u), rv(dev_v);
  for (std::size_t j = 0; j < n; ++j) {
    if (j >= step) ru[j] -= split ? p_u.values[j - step] : u0[j - step] + p_u.values[j - step];
    if (j + step < n) rv[j] -= split ? p_v.values[j + step] : v0[j + step] + p_v.values[j + step];
  }

  ResidualReport r;
  r.t = snap->t;
  r.h = traj.grid.h();
  r.sup_u = max_abs(ru, 0, n);
  r.sup_v = max_abs(rv, 0, n);
  r.l2_u = scaled_l2(ru, r.sup_u, r.h);
  r.l2_v = scaled_l2(rv, r.sup_v, r.h);
  r.analytic_bound_u = std::sqrt(tail_bound(traj.data, traj.params, r.t, Side::right_mover));
  r.analytic_bound_v = std::sqrt(tail_bound(traj.data, traj.params, r.t, Side::left_mover));
  r.sup_bound_u = sup_tail_bound(traj.data, traj.params, r.t, split_point, Side::right_mover);
  r.sup_bound_v = sup_tail_bound(traj.data, traj.params, r.t, split_point, Side::left_mover);
  return r;
}

double tail_bound(const InitialData& data, const ModelParams& m, double t, Side side) {
  const double h = data.grid().h();
  const std::size_t shift = overlap_shift(t, h);
  const double c = m.c_star();
  const double factor = 0.25 * c * c * std::exp(24.0 * std::abs(m.beta) * data.c0());
  if (factor == 0.0) return 0.0;

  const auto fu = densities(data.u0());
  const auto fv = densities(data.v0());
  const std::size_t n = fu.size();
  std::vector<double> integrand(n, 0.0);
  if (side == Side::right_mover) {
    const auto tail = suffix_integral(fv, h);
    for (std::size_t i = 0; i + shift < n; ++i) integrand[i] = fu[i] * tail[i + shift] * tail[i + shift];
  } else {
    const auto head = prefix_integral(fu, h);
    for (std::size_t i = shift; i < n; ++i) integrand[i] = fv[i] * head[i - shift] * head[i - shift];
  }
  const auto total = suffix_integral(integrand, h);
  return factor * (n == 0 ? 0.0 : total.front());
}

double sup_tail_bound(const InitialData& data, const ModelParams& m, double t, double split_point,
                      Side side) {
  const Grid& g = data.grid();
  const double h = g.h();
  const std::size_t shift = overlap_shift(t, h);
  const double factor = m.c_star() * std::exp(12.0 * std::abs(m.beta) * data.c0());
  if (factor == 0.0) return 0.0;

  const auto fu = densities(data.u0());
  const auto fv = densities(data.v0());
  const auto n = static_cast<long long>(fu.size());
  const double offset = static_cast<double>(g.pad()) - g.x_min() / h;

  if (side == Side::right_mover) {
    const auto tail = suffix_integral(fv, h);
    // Last node with y <= M.
    const long long k = static_cast<long long>(std::floor(split_point / h + offset + 1e-9));
    const double near = max_abs(data.u0(), 0, static_cast<std::size_t>(std::clamp(k + 1, 0LL, n)));
    const auto far_start = std::clamp(k + static_cast<long long>(shift), 0LL, n - 1);
    const double far = tail[static_cast<std::size_t>(far_start)];
    const double a = near * tail.front();
    const double b = max_abs(data.u0(), 0, fu.size()) * 0.5 * far;
    return factor * std::max(a, b);
  }
  const auto head = prefix_integral(fu, h);
  // First node with y >= -M.
  const long long k = static_cast<long long>(std::ceil(-split_point / h + offset - 1e-9));
  const double near = max_abs(data.v0(), static_cast<std::size_t>(std::clamp(k, 0LL, n)), fv.size());
  const auto far_end = std::clamp(k - static_cast<long long>(shift), 0LL, n - 1);
  const double far = head[static_cast<std::size_t>(far_end)];
  const double a = near * head.back();
  const double b = max_abs(data.v0(), 0, fv.size()) * 0.5 * far;
  return factor * std::max(a, b);
}

}  // namespace nld
