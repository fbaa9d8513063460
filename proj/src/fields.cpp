#include "nld/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nld {

namespace {

constexpr double kUnderflowFloor = 1e-300;
constexpr std::size_t kExtraPad = 8;

double gaussian_profile(double s) { return std::exp(-s * s); }

// Smooth compactly supported bump with peak value 1 at s = 0.
double bump_profile(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

Complex sample(DataFamily family, const PulseShape& p, double x) {
  if (p.amplitude == 0.0) return {0.0, 0.0};
  const double s = (x - p.center) / p.width;
  double magnitude = 0.0;
  switch (family) {
    case DataFamily::gaussian:
      magnitude = std::abs(p.amplitude) * gaussian_profile(s);
      if (magnitude < kUnderflowFloor) return {0.0, 0.0};
      break;
    case DataFamily::bump:
    case DataFamily::separated:
      magnitude = std::abs(p.amplitude) * bump_profile(s);
      break;
    case DataFamily::zero:
      return {0.0, 0.0};
  }
  const double phase = p.phase + (p.amplitude < 0.0 ? M_PI : 0.0);
  return std::polar(magnitude, phase);
}

std::string describe(const Interval& iv) {
  std::ostringstream os;
  os << "[" << iv.lo << ", " << iv.hi << "]";
  return os.str();
}

}  // namespace

double ModelParams::c_star() const noexcept { return std::abs(alpha) + 4.0 * std::abs(beta); }

std::optional<long long> lattice_multiple(double value, double h) noexcept {
  if (!(h > 0.0) || !std::isfinite(value)) return std::nullopt;
  const double q = value / h;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) return std::nullopt;
  return static_cast<long long>(r);
}

Grid::Grid(double x_min, double h, std::size_t n_cells, std::size_t n_steps, std::size_t pad)
    : x_min_(x_min), h_(h), n_cells_(n_cells), n_steps_(n_steps), pad_(pad) {
  if (!(h > 0.0) || !std::isfinite(h) || !std::isfinite(x_min))
    throw Error(ErrorCode::invalid_argument, "grid: h must be a positive finite number");
  if (n_cells == 0) throw Error(ErrorCode::invalid_argument, "grid: n_cells must be positive");
  if (n_steps == 0) throw Error(ErrorCode::invalid_argument, "grid: n_steps must be positive");
  if (pad < n_steps)
    throw Error(ErrorCode::invalid_argument,
                "grid: pad must be at least n_steps so no signal reaches the array boundary");
}

Grid Grid::for_run(double x_min, double x_max, double h, double horizon) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "grid: h must be positive");
  if (!(x_max > x_min)) throw Error(ErrorCode::invalid_argument, "grid: x_max must exceed x_min");
  const auto cells = lattice_multiple(x_max - x_min, h);
  if (!cells) throw Error(ErrorCode::off_lattice, "grid: x_max - x_min not a multiple of h");
  const auto steps = lattice_multiple(horizon, h);
  if (!steps || *steps <= 0)
    throw Error(ErrorCode::off_lattice, "grid: T not a positive multiple of h");
  const auto n_steps = static_cast<std::size_t>(*steps);
  return Grid(x_min, h, static_cast<std::size_t>(*cells) + 1, n_steps, n_steps + kExtraPad);
}

std::optional<std::size_t> Grid::index_of(double x) const noexcept {
  const auto k = lattice_multiple(x - x_min_, h_);
  if (!k) return std::nullopt;
  const long long j = *k + static_cast<long long>(pad_);
  if (j < 0 || j >= static_cast<long long>(size())) return std::nullopt;
  return static_cast<std::size_t>(j);
}

std::optional<std::size_t> Grid::step_of(double t) const noexcept {
  const auto k = lattice_multiple(t, h_);
  if (!k || *k < 0 || *k > static_cast<long long>(n_steps_)) return std::nullopt;
  return static_cast<std::size_t>(*k);
}

Grid Grid::refined(std::size_t factor) const {
  if (factor == 0) throw Error(ErrorCode::invalid_argument, "grid: refinement factor must be positive");
  const std::size_t steps = n_steps_ * factor;
  return Grid(x_min_, h_ / static_cast<double>(factor), (n_cells_ - 1) * factor + 1, steps,
              steps + kExtraPad);
}

double charge(const SpinorField& field) {
  if (field.u.size() != field.v.size())
    throw Error(ErrorCode::grid_mismatch, "charge: u and v lengths differ");
  const std::size_t n = field.u.size();
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double density = std::norm(field.u[j]) + std::norm(field.v[j]);
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    sum += w * density;
  }
  if (!std::isfinite(sum))
    throw Error(ErrorCode::blow_up, "charge: non-finite samples (solver blow-up)");
  return field.h * sum;
}

std::string_view to_string(DataFamily family) noexcept {
  switch (family) {
    case DataFamily::gaussian: return "gaussian";
    case DataFamily::bump: return "bump";
    case DataFamily::separated: return "separated";
    case DataFamily::zero: return "zero";
  }
  return "zero";
}

std::optional<DataFamily> parse_family(std::string_view name) noexcept {
  for (auto f : {DataFamily::gaussian, DataFamily::bump, DataFamily::separated, DataFamily::zero})
    if (to_string(f) == name) return f;
  return std::nullopt;
}

std::optional<Interval> pulse_support(DataFamily family, const PulseShape& p) {
  if (family == DataFamily::zero || p.amplitude == 0.0) return std::nullopt;
  if (family == DataFamily::gaussian) {
    // |A| exp(-s^2) >= floor  <=>  |s| <= sqrt(ln(|A| / floor))
    const double r = std::log(std::abs(p.amplitude) / kUnderflowFloor);
    if (r <= 0.0) return std::nullopt;
    const double half = p.width * std::sqrt(r);
    return Interval{p.center - half, p.center + half};
  }
  return Interval{p.center - p.width, p.center + p.width};
}

std::vector<std::string> validate(const DataSpec& spec, double x_min, double x_max) {
  std::vector<std::string> errors;
  if (spec.family == DataFamily::zero) return errors;
  const std::pair<const char*, const PulseShape*> parts[] = {{"u", &spec.u}, {"v", &spec.v}};
  for (const auto& [name, shape] : parts) {
    const std::string key = std::string("data.") + name;
    if (!(shape->width > 0.0) || !std::isfinite(shape->width))
      errors.push_back(key + ".width: must be positive and finite");
    if (!std::isfinite(shape->amplitude)) errors.push_back(key + ".amplitude: must be finite");
    if (!std::isfinite(shape->center)) errors.push_back(key + ".center: must be finite");
    if (!std::isfinite(shape->phase)) errors.push_back(key + ".phase: must be finite");
  }
  if (!errors.empty()) return errors;

  const auto su = pulse_support(spec.family, spec.u);
  const auto sv = pulse_support(spec.family, spec.v);
  for (const auto& [name, support] : {std::pair{"u", su}, std::pair{"v", sv}}) {
    if (support && (support->lo < x_min || support->hi > x_max)) {
      std::ostringstream os;
      os << "data." << name << ": support " << describe(*support)
         << " does not fit the unpadded grid [" << x_min << ", " << x_max
         << "]; enlarge grid.x_min/grid.x_max";
      errors.push_back(os.str());
    }
  }
  if (spec.family == DataFamily::separated && su && sv && !(su->lo > sv->hi)) {
    errors.push_back("data: separated family needs supp(u0) " + describe(*su) +
                     " strictly right of supp(v0) " + describe(*sv));
  }
  return errors;
}

InitialData make_initial_data(const DataSpec& spec, const Grid& grid) {
  const auto errors = validate(spec, grid.x_min(), grid.x_max());
  if (!errors.empty()) {
    std::string msg = "initial data rejected:";
    for (const auto& e : errors) msg += "\n  " + e;
    const bool sizing = std::any_of(errors.begin(), errors.end(), [](const std::string& e) {
      return e.find("support") != std::string::npos && e.find("separated") == std::string::npos;
    });
    throw Error(sizing ? ErrorCode::support_overflow : ErrorCode::invalid_argument, msg);
  }

  InitialData data(spec, grid);
  const std::size_t n = grid.size();
  data.u0_.assign(n, Complex{});
  data.v0_.assign(n, Complex{});
  if (spec.family != DataFamily::zero) {
    const std::size_t lo = grid.pad();
    const std::size_t hi = grid.pad() + grid.n_cells();
    for (std::size_t j = lo; j < hi; ++j) {
      const double x = grid.x(j);
      data.u0_[j] = sample(spec.family, spec.u, x);
      data.v0_[j] = sample(spec.family, spec.v, x);
    }
  }
  SpinorField f;
  f.h = grid.h();
  f.u = data.u0_;
  f.v = data.v0_;
  data.c0_ = charge(f);
  return data;
}

}  // namespace nld
