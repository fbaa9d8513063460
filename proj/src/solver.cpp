#include "nld/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nld/nonlinearity.hpp"

namespace nld {

namespace {

using std::ptrdiff_t;

// Multiplication by -i, exact in floating point.
inline Complex minus_i(Complex z) noexcept { return {z.imag(), -z.real()}; }

Complex at(const std::vector<Complex>& a, ptrdiff_t j) {
  return (j < 0 || j >= static_cast<ptrdiff_t>(a.size())) ? Complex{} : a[static_cast<std::size_t>(j)];
}

// Quadrature increments applied by one step, indexed by the arrival node:
// u_dev[j] = u_dev[j-1] - i n1[j].
struct Increments {
  std::vector<Complex> n1;
  std::vector<Complex> n2;
};

struct Split {
  const std::vector<Complex>& u_free;
  const std::vector<Complex>& v_free;
  const std::vector<Complex>& u_dev;
  const std::vector<Complex>& v_dev;
};

// A plain field is its own free part.
Split split_of(const SpinorField& s, std::vector<Complex>& zeros) {
  if (s.has_split()) return {s.u_free, s.v_free, s.u_dev, s.v_dev};
  zeros.assign(s.u.size(), Complex{});
  return {s.u, s.v, zeros, zeros};
}

// Sizes `next` for a step from `s`; reuses its storage across steps.
void prepare_next(const SpinorField& s, SpinorField& next) {
  const std::size_t n = s.u.size();
  next.t = s.t + s.h;
  next.h = s.h;
  next.u.resize(n);
  next.v.resize(n);
  next.u_dev.resize(n);
  next.v_dev.resize(n);
  next.u_free.resize(n);
  next.v_free.resize(n);
}

void shift_free(const Split& sp, SpinorField& next) {
  const auto n = static_cast<ptrdiff_t>(next.u.size());
  for (ptrdiff_t j = 0; j < n; ++j) {
    next.u_free[static_cast<std::size_t>(j)] = at(sp.u_free, j - 1);
    next.v_free[static_cast<std::size_t>(j)] = at(sp.v_free, j + 1);
  }
}

void check_finite(const SpinorField& f) {
  double peak = 0.0;
  bool finite = true;
  for (std::size_t j = 0; j < f.u.size(); ++j) {
    const double a = std::abs(f.u[j]);
    const double b = std::abs(f.v[j]);
    finite = finite && std::isfinite(a) && std::isfinite(b);
    peak = std::max(peak, std::max(a, b));
  }
  if (!finite || peak > kBlowUpThreshold) {
    std::ostringstream os;
    os << "solver blow-up at t = " << f.t << ": max(|u|,|v|) = " << peak << " exceeds "
       << kBlowUpThreshold << " or is not finite; reduce h";
    throw Error(ErrorCode::blow_up, os.str());
  }
}

void step_trapezoidal(const SpinorField& s, SpinorField& next, const ModelParams& m,
                      const Scheme& scheme, StepStats* stats, Increments* inc) {
  std::vector<Complex> zeros;
  const Split sp = split_of(s, zeros);
  prepare_next(s, next);
  shift_free(sp, next);
  if (inc) {
    inc->n1.assign(s.u.size(), Complex{});
    inc->n2.assign(s.u.size(), Complex{});
  }

  const auto n = static_cast<ptrdiff_t>(s.u.size());
  const double h = s.h;
  const double half_h = 0.5 * h;
  std::atomic<ptrdiff_t> failed{-1};
  int worst = 0;

#pragma omp parallel for schedule(static) reduction(max : worst)
  for (ptrdiff_t j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const Complex n1_prev = eval_N1({at(s.u, j - 1), at(s.v, j - 1)}, m);
    const Complex n2_prev = eval_N2({at(s.u, j + 1), at(s.v, j + 1)}, m);
    const Complex du_prev = at(sp.u_dev, j - 1);
    const Complex dv_prev = at(sp.v_dev, j + 1);
    const Complex fu = next.u_free[k];
    const Complex fv = next.v_free[k];

    // Explicit Euler predictor, then fixed-point sweeps of the trapezoidal map
    // u = u_prev - i h/2 (N1_prev + N1(u, v)) written for the deviations.
    Complex du = du_prev + minus_i(h * n1_prev);
    Complex dv = dv_prev + minus_i(h * n2_prev);
    Complex q1, q2;
    int it = 0;
    bool converged = false;
    while (it < scheme.fixed_point_max_iter) {
      ++it;
      const SpinorPair p{fu + du, fv + dv};
      q1 = half_h * (n1_prev + eval_N1(p, m));
      q2 = half_h * (n2_prev + eval_N2(p, m));
      const Complex du_new = du_prev + minus_i(q1);
      const Complex dv_new = dv_prev + minus_i(q2);
      const double change = std::max(std::abs(du_new - du), std::abs(dv_new - dv));
      const double scale = std::max({1.0, std::abs(fu + du_new), std::abs(fv + dv_new)});
      du = du_new;
      dv = dv_new;
      if (!(change > scheme.fixed_point_tol * scale)) {
        converged = std::isfinite(change);
        break;
      }
    }
    if (!converged) failed = j;
    next.u_dev[k] = du;
    next.v_dev[k] = dv;
    next.u[k] = fu + du;
    next.v[k] = fv + dv;
    if (inc) {
      inc->n1[k] = q1;
      inc->n2[k] = q2;
    }
    worst = std::max(worst, it);
  }

  if (failed.load() >= 0) {
    std::ostringstream os;
    os << "trapezoidal fixed point did not converge within " << scheme.fixed_point_max_iter
       << " iterations at array index " << failed.load() << ", t = " << next.t << " (h = " << h
       << "); h is too large for the data amplitude";
    throw Error(ErrorCode::fixed_point_divergence, os.str());
  }
  if (stats) stats->max_iterations = worst;
}

void step_phase_split(const SpinorField& s, SpinorField& next, const ModelParams& m, Increments* inc) {
  if (m.beta != 0.0) throw Error(ErrorCode::invalid_argument, "phase_split scheme requires beta == 0");
  std::vector<Complex> zeros;
  const Split sp = split_of(s, zeros);
  prepare_next(s, next);
  shift_free(sp, next);
  if (inc) {
    inc->n1.assign(s.u.size(), Complex{});
    inc->n2.assign(s.u.size(), Complex{});
  }
  const auto n = static_cast<ptrdiff_t>(s.u.size());
  // exp(-i theta) - 1 without cancellation for small theta.
  const auto rot_minus_one = [](double theta) {
    const double s_half = std::sin(0.5 * theta);
    return Complex{-2.0 * s_half * s_half, -std::sin(theta)};
  };

#pragma omp parallel for schedule(static)
  for (ptrdiff_t j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const Complex u_prev = at(s.u, j - 1);
    const Complex v_prev = at(s.v, j + 1);
    // Moduli travel unchanged, so both endpoint moduli of the partner are
    // known before the update.
    const double v_mid = 0.5 * (std::abs(at(s.v, j - 1)) + std::abs(v_prev));
    const double u_mid = 0.5 * (std::abs(at(s.u, j + 1)) + std::abs(u_prev));
    const double theta_u = m.alpha * s.h * v_mid * v_mid;
    const double theta_v = m.alpha * s.h * u_mid * u_mid;
    next.u[k] = u_prev * std::polar(1.0, -theta_u);
    next.v[k] = v_prev * std::polar(1.0, -theta_v);
    // The deviation accumulates the same change, u_prev (e^{-i theta} - 1)
    // = -i q, and q is what the step contributed to the integral of N.
    const Complex du = u_prev * rot_minus_one(theta_u);
    const Complex dv = v_prev * rot_minus_one(theta_v);
    next.u_dev[k] = at(sp.u_dev, j - 1) + du;
    next.v_dev[k] = at(sp.v_dev, j + 1) + dv;
    if (inc) {
      inc->n1[k] = {-du.imag(), du.real()};
      inc->n2[k] = {-dv.imag(), dv.real()};
    }
  }
}

// RK4 along both characteristic families.  Stages two and three live on the
// half nodes x_{j+1/2}, reached at t + h/2 by the right mover from x_j and by
// the left mover from x_{j+1}.  The stages update the deviations; the free
// parts are constant along their characteristics.
struct RkScratch {
  std::vector<Complex> k1u, k1v, k2u, k2v, k3u, k3v;
};

void step_oracle4(const SpinorField& s, SpinorField& next, const ModelParams& m, RkScratch& w) {
  std::vector<Complex> zeros;
  const Split sp = split_of(s, zeros);
  prepare_next(s, next);
  shift_free(sp, next);

  const std::size_t n = s.u.size();
  const auto sn = static_cast<ptrdiff_t>(n);
  const double h = s.h;
  const auto rhs_u = [&m](Complex u, Complex v) { return minus_i(eval_N1({u, v}, m)); };
  const auto rhs_v = [&m](Complex u, Complex v) { return minus_i(eval_N2({u, v}, m)); };

  for (auto* a : {&w.k1u, &w.k1v, &w.k2u, &w.k2v, &w.k3u, &w.k3v}) a->resize(n);
  auto& k1u = w.k1u;
  auto& k1v = w.k1v;
  auto& k2u = w.k2u;
  auto& k2v = w.k2v;
  auto& k3u = w.k3u;
  auto& k3v = w.k3v;

#pragma omp parallel for schedule(static)
  for (ptrdiff_t j = 0; j < sn; ++j) {
    const auto k = static_cast<std::size_t>(j);
    k1u[k] = rhs_u(s.u[k], s.v[k]);
    k1v[k] = rhs_v(s.u[k], s.v[k]);
  }
  // Half node k stands for x_{k+1/2}; the last one sees zero inflow.
#pragma omp parallel for schedule(static)
  for (ptrdiff_t j = 0; j < sn; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const Complex vr = k + 1 < n ? s.v[k + 1] : Complex{};
    const Complex kvr = k + 1 < n ? k1v[k + 1] : Complex{};
    const Complex u2 = s.u[k] + 0.5 * h * k1u[k];
    const Complex v2 = vr + 0.5 * h * kvr;
    k2u[k] = rhs_u(u2, v2);
    k2v[k] = rhs_v(u2, v2);
    const Complex u3 = s.u[k] + 0.5 * h * k2u[k];
    const Complex v3 = vr + 0.5 * h * k2v[k];
    k3u[k] = rhs_u(u3, v3);
    k3v[k] = rhs_v(u3, v3);
  }

#pragma omp parallel for schedule(static)
  for (ptrdiff_t j = 0; j < sn; ++j) {
    const auto k = static_cast<std::size_t>(j);
    Complex u_from, du_from, k1_u, k2_u, k3_u;
    if (k > 0) {
      u_from = s.u[k - 1];
      du_from = sp.u_dev[k - 1];
      k1_u = k1u[k - 1];
      k2_u = k2u[k - 1];
      k3_u = k3u[k - 1];
    }
    Complex v_from, dv_from, k1_v, k2_v, k3_v;
    if (k + 1 < n) {
      v_from = s.v[k + 1];
      dv_from = sp.v_dev[k + 1];
      k1_v = k1v[k + 1];
      k2_v = k2v[k];
      k3_v = k3v[k];
    }
    const Complex k4_u = rhs_u(u_from + h * k3_u, v_from + h * k3_v);
    const Complex k4_v = rhs_v(u_from + h * k3_u, v_from + h * k3_v);
    next.u_dev[k] = du_from + (h / 6.0) * (k1_u + 2.0 * k2_u + 2.0 * k3_u + k4_u);
    next.v_dev[k] = dv_from + (h / 6.0) * (k1_v + 2.0 * k2_v + 2.0 * k3_v + k4_v);
    next.u[k] = next.u_free[k] + next.u_dev[k];
    next.v[k] = next.v_free[k] + next.v_dev[k];
  }
}

void dispatch_step(const SpinorField& state, SpinorField& next, const ModelParams& m, const Scheme& s,
                   StepStats* stats, Increments* inc, RkScratch& scratch) {
  if (state.u.size() != state.v.size())
    throw Error(ErrorCode::grid_mismatch, "step: u and v lengths differ");
  if (state.has_split() && (state.u_free.size() != state.u.size() || state.v_free.size() != state.u.size() ||
                            state.u_dev.size() != state.u.size() || state.v_dev.size() != state.u.size()))
    throw Error(ErrorCode::grid_mismatch, "step: interaction-picture arrays have the wrong length");
  switch (s.kind) {
    case SchemeKind::trapezoidal: step_trapezoidal(state, next, m, s, stats, inc); break;
    case SchemeKind::phase_split: step_phase_split(state, next, m, inc); break;
    case SchemeKind::oracle4: step_oracle4(state, next, m, scratch); break;
  }
  if (s.kind != SchemeKind::trapezoidal && stats) stats->max_iterations = 0;
  check_finite(next);
}

// Per-label quadrature of N along the characteristics.  Label i is the foot
// index at t = 0; the right mover i sits at index i + step, the left mover at
// i - step.
class TraceAccumulator {
 public:
  TraceAccumulator(std::size_t n, TraceRule rule, double h)
      : rule_(rule), h_(h), acc1_(n), acc2_(n), lvl1_(n), lvl2_(n) {}

  // Called once per time level, before the step leaving it.
  void add_level(const SpinorField& f, const ModelParams& m, std::size_t step,
                 std::optional<CharIntegrals>* readout) {
    const std::size_t n = f.u.size();
    if (rule_ == TraceRule::scheme) {
      if (readout) *readout = CharIntegrals{f.t, step, acc1_, acc2_};
      return;
    }

    const auto sn = static_cast<ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (ptrdiff_t j = 0; j < sn; ++j) {
      const auto k = static_cast<std::size_t>(j);
      const SpinorPair p{f.u[k], f.v[k]};
      lvl1_[k] = eval_N1(p, m);
      lvl2_[k] = eval_N2(p, m);
    }

    if (readout) {
      if (step % 2 != 0)
        throw Error(ErrorCode::off_lattice, "Simpson trace readout needs an even step count");
      CharIntegrals out{f.t, step, std::vector<Complex>(n), std::vector<Complex>(n)};
      if (step > 0) {
        const double scale = h_ / 3.0;
        for (std::size_t i = 0; i < n; ++i) {
          const Complex e1 = i + step < n ? lvl1_[i + step] : Complex{};
          const Complex e2 = i >= step ? lvl2_[i - step] : Complex{};
          out.n1[i] = scale * (acc1_[i] + e1);
          out.n2[i] = scale * (acc2_[i] + e2);
        }
      }
      *readout = std::move(out);
    }

    const double w = weight(step);
    for (std::size_t i = 0; i + step < n; ++i) acc1_[i] += w * lvl1_[i + step];
    for (std::size_t i = step; i < n; ++i) acc2_[i] += w * lvl2_[i - step];
  }

  // Increments of the step from level `step` to `step + 1`, by arrival node.
  void add_increments(const Increments& inc, std::size_t step) {
    const std::size_t n = acc1_.size();
    const std::size_t arrive = step + 1;
    for (std::size_t i = 0; i + arrive < n; ++i) acc1_[i] += inc.n1[i + arrive];
    for (std::size_t i = arrive; i < n; ++i) acc2_[i] += inc.n2[i - arrive];
  }

 private:
  double weight(std::size_t step) const noexcept {
    if (step == 0) return 1.0;
    return step % 2 == 1 ? 4.0 : 2.0;
  }

  TraceRule rule_;
  double h_;
  std::vector<Complex> acc1_, acc2_, lvl1_, lvl2_;
};

void append_density(DensityFrames& d, const SpinorField& f) {
  std::vector<double> u2(d.j_hi - d.j_lo), v2(d.j_hi - d.j_lo);
  for (std::size_t j = d.j_lo; j < d.j_hi; ++j) {
    u2[j - d.j_lo] = std::norm(f.u[j]);
    v2[j - d.j_lo] = std::norm(f.v[j]);
  }
  d.u2.push_back(std::move(u2));
  d.v2.push_back(std::move(v2));
}

void update_monitor(TransportMonitor& mon, const SpinorField& f, const InitialData& data, std::size_t step,
                    double envelope) {
  const auto& u0 = data.u0();
  const auto& v0 = data.v0();
  const std::size_t n = f.u.size();
  double defect = mon.modulus_defect;
  double violation = mon.envelope_violation;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex a = j >= step ? u0[j - step] : Complex{};
    const Complex b = j + step < n ? v0[j + step] : Complex{};
    defect = std::max({defect, std::abs(std::abs(f.u[j]) - std::abs(a)), std::abs(std::abs(f.v[j]) - std::abs(b))});
    violation = std::max({violation, std::norm(f.u[j]) - envelope * std::norm(a),
                          std::norm(f.v[j]) - envelope * std::norm(b)});
  }
  mon.modulus_defect = defect;
  mon.envelope_violation = violation;
}

}  // namespace

std::string_view to_string(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::trapezoidal: return "trapezoidal";
    case SchemeKind::phase_split: return "phase_split";
    case SchemeKind::oracle4: return "oracle4";
  }
  return "trapezoidal";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept {
  for (auto k : {SchemeKind::trapezoidal, SchemeKind::phase_split, SchemeKind::oracle4})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

int thread_count() noexcept {
  if (const char* env = std::getenv("NLD_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

SpinorField init_state(const InitialData& data, const Grid& grid) {
  if (!(data.grid() == grid))
    throw Error(ErrorCode::grid_mismatch, "init_state: initial data was sampled on a different grid");
  SpinorField f;
  f.t = 0.0;
  f.h = grid.h();
  f.u = data.u0();
  f.v = data.v0();
  f.u_free = data.u0();
  f.v_free = data.v0();
  f.u_dev.assign(grid.size(), Complex{});
  f.v_dev.assign(grid.size(), Complex{});
  return f;
}

SpinorField step(const SpinorField& state, const ModelParams& m, const Scheme& s, StepStats* stats) {
  SpinorField next;
  RkScratch scratch;
  dispatch_step(state, next, m, s, stats, nullptr, scratch);
  return next;
}

const SpinorField* Trajectory::snapshot_at(double t) const noexcept {
  const auto k = grid.step_of(t);
  if (!k) return nullptr;
  for (const auto& s : snapshots)
    if (grid.step_of(s.t) == k) return &s;
  return nullptr;
}

const CharIntegrals* Trajectory::traces_at(double t) const noexcept {
  const auto k = grid.step_of(t);
  if (!k) return nullptr;
  for (const auto& c : char_traces)
    if (c.steps == *k) return &c;
  return nullptr;
}

Trajectory run(const InitialData& data, const Grid& grid, const ModelParams& m, const Scheme& s,
               const RunOptions& options) {
  if (s.kind == SchemeKind::phase_split && m.beta != 0.0)
    throw Error(ErrorCode::invalid_argument, "phase_split scheme requires beta == 0");
#ifdef _OPENMP
  omp_set_num_threads(thread_count());
#endif

  const std::size_t n_steps = grid.n_steps();
  std::vector<bool> record(n_steps + 1, false);
  record[0] = true;
  record[n_steps] = true;
  for (double t : options.record_times) {
    const auto k = grid.step_of(t);
    if (!k) {
      std::ostringstream os;
      os << "run: record time " << t << " is not a multiple of h = " << grid.h() << " within [0, "
         << grid.horizon() << "]";
      throw Error(ErrorCode::off_lattice, os.str());
    }
    record[*k] = true;
  }

  const TraceRule rule = s.kind == SchemeKind::oracle4 ? TraceRule::simpson : TraceRule::scheme;
  if (rule == TraceRule::simpson)
    for (std::size_t k = 1; k <= n_steps; k += 2)
      if (record[k]) throw Error(ErrorCode::off_lattice, "run: oracle4 record times need an even step count");

  Trajectory traj{grid, m, s, data, {}, {}, std::nullopt, rule, 0, 0, {}};
  const double envelope = std::exp(8.0 * std::abs(m.beta) * data.c0());
  std::size_t dense_steps = 0;
  if (options.dense) {
    const auto& w = *options.dense;
    DensityFrames d;
    const double last = static_cast<double>(grid.size() - 1);
    const double lo = std::floor((w.x_lo - grid.x_min()) / grid.h()) + static_cast<double>(grid.pad());
    const double hi = std::ceil((w.x_hi - grid.x_min()) / grid.h()) + static_cast<double>(grid.pad());
    d.j_lo = static_cast<std::size_t>(std::clamp(lo, 0.0, last));
    d.j_hi = static_cast<std::size_t>(std::clamp(hi, 0.0, last)) + 1;
    dense_steps = std::min<std::size_t>(
        n_steps, static_cast<std::size_t>(std::max(0.0, std::ceil(w.t_hi / grid.h() - 1e-9))));
    traj.dense = std::move(d);
  }

  SpinorField state = init_state(data, grid);
  TraceAccumulator traces(state.u.size(), rule, grid.h());
  Increments inc;
  RkScratch scratch;
  SpinorField next;
  for (std::size_t k = 0;; ++k) {
    std::optional<CharIntegrals> readout;
    traces.add_level(state, m, k, record[k] ? &readout : nullptr);
    if (record[k]) {
      traj.snapshots.push_back(state);
      traj.char_traces.push_back(std::move(*readout));
    }
    if (traj.dense && k <= dense_steps) append_density(*traj.dense, state);
    if (options.monitor) update_monitor(traj.monitor, state, data, k, envelope);
    if (k == n_steps) break;

    StepStats stats;
    dispatch_step(state, next, m, s, &stats, rule == TraceRule::scheme ? &inc : nullptr, scratch);
    std::swap(state, next);
    state.t = static_cast<double>(k + 1) * grid.h();
    if (rule == TraceRule::scheme) traces.add_increments(inc, k);
    traj.max_fixed_point_iterations = std::max(traj.max_fixed_point_iterations, stats.max_iterations);
    traj.steps_completed = k + 1;
  }
  return traj;
}

SpinorField restrict_to(const SpinorField& fine, const Grid& fine_grid, const Grid& coarse_grid,
                        std::size_t factor) {
  if (std::abs(fine_grid.h() * static_cast<double>(factor) - coarse_grid.h()) > 1e-15 * coarse_grid.h() ||
      fine_grid.x_min() != coarse_grid.x_min())
    throw Error(ErrorCode::grid_mismatch, "restrict_to: grids are not nested");
  SpinorField out;
  out.t = fine.t;
  out.h = coarse_grid.h();
  out.u.assign(coarse_grid.size(), Complex{});
  out.v.assign(coarse_grid.size(), Complex{});
  for (std::size_t j = 0; j < coarse_grid.size(); ++j) {
    const long long offset =
        (static_cast<long long>(j) - static_cast<long long>(coarse_grid.pad())) * static_cast<long long>(factor);
    const long long jf = offset + static_cast<long long>(fine_grid.pad());
    if (jf < 0 || jf >= static_cast<long long>(fine_grid.size())) continue;
    out.u[j] = fine.u[static_cast<std::size_t>(jf)];
    out.v[j] = fine.v[static_cast<std::size_t>(jf)];
  }
  return out;
}

}  // namespace nld
