#pragma once

// Domain types: lattice, spinor state, couplings and the initial-data families.

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nld {

using Complex = std::complex<double>;

enum class ErrorCode {
  invalid_argument = 1,
  support_overflow,
  grid_mismatch,
  off_lattice,
  blow_up,
  fixed_point_divergence,
  missing_data,
  config_invalid,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Couplings of W(u,v) = alpha |u|^2 |v|^2 + beta (conj(u) v + u conj(v))^2.
struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;

  /// Envelope constant with |N1| <= c_star |u| |v|^2; always derived, never stored.
  double c_star() const noexcept;

  static ModelParams thirring() noexcept { return {1.0, 0.0}; }
  static ModelParams gross_neveu() noexcept { return {0.0, 0.25}; }
};

/// Uniform lattice with unit CFL: the time step equals the space step, so the
/// characteristics x -/+ t = const pass through lattice nodes.  The unpadded
/// nodes are x_min, x_min + h, ..., x_min + (n_cells - 1) h; `pad` nodes of
/// zeros are added on each side.
class Grid {
 public:
  Grid(double x_min, double h, std::size_t n_cells, std::size_t n_steps, std::size_t pad);

  /// Grid for x in [x_min, x_max] and horizon T with the default padding
  /// pad = n_steps + 8.  Rejects non-integral (x_max - x_min)/h or T/h.
  static Grid for_run(double x_min, double x_max, double h, double horizon);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_min_ + static_cast<double>(n_cells_ - 1) * h_; }
  double h() const noexcept { return h_; }
  double dt() const noexcept { return h_; }
  std::size_t n_cells() const noexcept { return n_cells_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t pad() const noexcept { return pad_; }
  std::size_t size() const noexcept { return n_cells_ + 2 * pad_; }
  double horizon() const noexcept { return static_cast<double>(n_steps_) * h_; }

  /// Position of array index j (padding included).
  double x(std::size_t j) const noexcept {
    return x_min_ + (static_cast<double>(j) - static_cast<double>(pad_)) * h_;
  }
  /// Array index of a lattice position, if it is a node of the padded array.
  std::optional<std::size_t> index_of(double x) const noexcept;
  /// Step count of a lattice time in [0, horizon].
  std::optional<std::size_t> step_of(double t) const noexcept;

  /// Same physical window and horizon on a lattice `factor` times finer.
  Grid refined(std::size_t factor) const;

  bool operator==(const Grid&) const = default;

 private:
  double x_min_;
  double h_;
  std::size_t n_cells_;
  std::size_t n_steps_;
  std::size_t pad_;
};

/// Lattice multiple test shared by grid construction and config validation.
std::optional<long long> lattice_multiple(double value, double h) noexcept;

/// Lattice state at time t.  Besides the values u, v the solver carries the
/// interaction-picture split u = u_free + u_dev, where u_free[j] = u0(x_j - t)
/// is the freely transported initial value and u_dev the accumulated effect
/// of the nonlinearity along the characteristic (likewise v with x_j + t).
/// The split is empty for a plain field; the solver then takes the field
/// itself as the free part.
struct SpinorField {
  double t = 0.0;
  double h = 1.0;
  std::vector<Complex> u;
  std::vector<Complex> v;
  std::vector<Complex> u_free;
  std::vector<Complex> v_free;
  std::vector<Complex> u_dev;
  std::vector<Complex> v_dev;

  bool has_split() const noexcept { return !u_free.empty(); }
};

/// Q = integral of |u|^2 + |v|^2 by the trapezoid rule on the lattice.
/// Throws Error(blow_up) on non-finite samples.
double charge(const SpinorField& field);

enum class DataFamily { gaussian, bump, separated, zero };

std::string_view to_string(DataFamily family) noexcept;
std::optional<DataFamily> parse_family(std::string_view name) noexcept;

/// amplitude * exp(i phase) * profile((x - center) / width)
struct PulseShape {
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  double phase = 0.0;
};

struct DataSpec {
  DataFamily family = DataFamily::zero;
  PulseShape u;
  PulseShape v;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Closed interval outside which the sampled pulse is exactly zero; nullopt
/// for a pulse that vanishes identically.  Gaussians are cut at the
/// 1e-300 underflow floor.
std::optional<Interval> pulse_support(DataFamily family, const PulseShape& shape);

/// Validation messages for a data spec (empty when valid).
std::vector<std::string> validate(const DataSpec& spec, double x_min, double x_max);

class InitialData {
 public:
  const DataSpec& spec() const noexcept { return spec_; }
  const Grid& grid() const noexcept { return grid_; }
  const std::vector<Complex>& u0() const noexcept { return u0_; }
  const std::vector<Complex>& v0() const noexcept { return v0_; }
  /// Initial charge budget, the lattice trapezoid charge of the samples.
  double c0() const noexcept { return c0_; }

 private:
  friend InitialData make_initial_data(const DataSpec&, const Grid&);
  InitialData(DataSpec spec, Grid grid) : spec_(spec), grid_(grid) {}

  DataSpec spec_;
  Grid grid_;
  std::vector<Complex> u0_;
  std::vector<Complex> v0_;
  double c0_ = 0.0;
};

InitialData make_initial_data(const DataSpec& spec, const Grid& grid);

/// Backward characteristic triangle with base [a, b] at time t0 and apex at
/// ((a + b) / 2, (b - a) / 2 + t0).
struct TriangleRegion {
  double a = 0.0;
  double b = 0.0;
  double t0 = 0.0;

  double apex_time() const noexcept { return 0.5 * (b - a) + t0; }
};

}  // namespace nld
