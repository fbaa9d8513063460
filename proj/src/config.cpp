#include "nld/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace nld {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_plain(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(x)) return std::nullopt;
  return x;
}

// A decimal number or a fraction p/q.
std::optional<double> parse_real(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_plain(s);
  const auto p = parse_plain(s.substr(0, slash));
  const auto q = parse_plain(s.substr(slash + 1));
  if (!p || !q || *q == 0.0) return std::nullopt;
  return *p / *q;
}

std::optional<long long> parse_integer(std::string_view s) {
  s = trim(s);
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

std::string join_reals(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

// Numbers in messages: readable rather than round-trip exact.
std::string shown(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

bool on_lattice(double value, double origin, double h) { return lattice_multiple(value - origin, h).has_value(); }

using Setter = std::function<std::optional<std::string>(std::string_view)>;

Setter real_into(double& target) {
  return [&target](std::string_view v) -> std::optional<std::string> {
    const auto x = parse_real(v);
    if (!x) return "expected a finite real number, got '" + std::string(v) + "'";
    target = *x;
    return std::nullopt;
  };
}

Setter reals_into(std::vector<double>& target) {
  return [&target](std::string_view v) -> std::optional<std::string> {
    target.clear();
    if (trim(v).empty()) return std::nullopt;
    const auto items = split(v, ',');
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto x = parse_real(items[i]);
      if (!x) return "entry " + std::to_string(i) + " ('" + std::string(items[i]) + "') is not a real number";
      target.push_back(*x);
    }
    return std::nullopt;
  };
}

}  // namespace

std::string_view to_string(Check c) noexcept {
  switch (c) {
    case Check::identity: return "identity";
    case Check::charge: return "charge";
    case Check::triangle: return "triangle";
    case Check::pointwise: return "pointwise";
    case Check::profile: return "profile";
    case Check::residual: return "residual";
    case Check::tails: return "tails";
  }
  return "identity";
}

const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks{Check::identity, Check::charge,   Check::triangle, Check::pointwise,
                                         Check::profile,  Check::residual, Check::tails};
  return checks;
}

bool ExperimentConfig::wants(Check c) const noexcept {
  return std::find(checks.begin(), checks.end(), c) != checks.end();
}

ExperimentConfig ExperimentConfig::halved(unsigned k) const {
  ExperimentConfig out = *this;
  out.h = std::ldexp(h, -static_cast<int>(k));
  return out;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorCode::config_invalid,
            [&violations] {
              std::string msg = "invalid configuration:";
              for (const auto& v : violations) msg += "\n  " + v;
              return msg;
            }()),
      violations_(std::move(violations)) {}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  cfg.params = {};  // custom couplings default to zero
  std::vector<std::string> errors;
  bool alpha_set = false, beta_set = false;
  std::optional<ModelKind> model;

  const auto shape_keys = [&](const char* side, PulseShape& p, std::map<std::string, Setter>& keys) {
    const std::string base = std::string("data.") + side + ".";
    keys[base + "amplitude"] = real_into(p.amplitude);
    keys[base + "center"] = real_into(p.center);
    keys[base + "width"] = real_into(p.width);
    keys[base + "phase"] = real_into(p.phase);
  };

  std::map<std::string, Setter> keys;
  keys["model"] = [&](std::string_view v) -> std::optional<std::string> {
    if (v == "thirring") model = ModelKind::thirring;
    else if (v == "gross_neveu") model = ModelKind::gross_neveu;
    else if (v == "custom") model = ModelKind::custom;
    else return "expected thirring, gross_neveu or custom, got '" + std::string(v) + "'";
    return std::nullopt;
  };
  keys["model.alpha"] = [&](std::string_view v) {
    alpha_set = true;
    return real_into(cfg.params.alpha)(v);
  };
  keys["model.beta"] = [&](std::string_view v) {
    beta_set = true;
    return real_into(cfg.params.beta)(v);
  };
  keys["data.family"] = [&](std::string_view v) -> std::optional<std::string> {
    const auto f = parse_family(v);
    if (!f) return "expected gaussian, bump, separated or zero, got '" + std::string(v) + "'";
    cfg.data.family = *f;
    return std::nullopt;
  };
  shape_keys("u", cfg.data.u, keys);
  shape_keys("v", cfg.data.v, keys);
  keys["grid.x_min"] = real_into(cfg.x_min);
  keys["grid.x_max"] = real_into(cfg.x_max);
  keys["grid.h"] = real_into(cfg.h);
  keys["T"] = real_into(cfg.T);
  keys["scheme"] = [&](std::string_view v) -> std::optional<std::string> {
    const auto k = parse_scheme(v);
    if (!k) return "expected trapezoidal, phase_split or oracle4, got '" + std::string(v) + "'";
    cfg.scheme.kind = *k;
    return std::nullopt;
  };
  keys["scheme.fixed_point_tol"] = real_into(cfg.scheme.fixed_point_tol);
  keys["scheme.fixed_point_max_iter"] = [&](std::string_view v) -> std::optional<std::string> {
    const auto n = parse_integer(v);
    if (!n || *n < 1 || *n > 1000000) return "expected an integer in [1, 1000000]";
    cfg.scheme.fixed_point_max_iter = static_cast<int>(*n);
    return std::nullopt;
  };
  keys["record_times"] = reals_into(cfg.record_times);
  keys["checks"] = [&](std::string_view v) -> std::optional<std::string> {
    cfg.checks.clear();
    if (trim(v) == "all") {
      cfg.checks = all_checks();
      return std::nullopt;
    }
    std::string bad;
    for (auto item : split(v, ',')) {
      const auto& all = all_checks();
      const auto it = std::find_if(all.begin(), all.end(), [&](Check c) { return to_string(c) == item; });
      if (it == all.end()) {
        bad += (bad.empty() ? "" : ", ") + std::string(item);
      } else if (!cfg.wants(*it)) {
        cfg.checks.push_back(*it);
      }
    }
    if (!bad.empty()) return "unknown check(s): " + bad;
    return std::nullopt;
  };
  keys["output_dir"] = [&](std::string_view v) -> std::optional<std::string> {
    if (v.empty()) return "must not be empty";
    cfg.output_dir = std::string(v);
    return std::nullopt;
  };
  keys["seed"] = [&](std::string_view v) -> std::optional<std::string> {
    const auto n = parse_integer(v);
    if (!n || *n < 0) return "expected a non-negative integer";
    cfg.seed = static_cast<std::uint64_t>(*n);
    return std::nullopt;
  };
  keys["identity.samples"] = [&](std::string_view v) -> std::optional<std::string> {
    const auto n = parse_integer(v);
    if (!n || *n < 1) return "expected a positive integer";
    cfg.identity_samples = static_cast<std::size_t>(*n);
    return std::nullopt;
  };
  keys["triangle.regions"] = [&](std::string_view v) -> std::optional<std::string> {
    cfg.triangles.clear();
    if (trim(v).empty()) return std::nullopt;
    const auto items = split(v, ';');
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto parts = split(items[i], ':');
      std::vector<double> xs;
      for (auto p : parts)
        if (const auto x = parse_real(p)) xs.push_back(*x);
      if (parts.size() != 4 || xs.size() != 4)
        return "entry " + std::to_string(i) + " ('" + std::string(items[i]) + "') is not a:b:t0:tau";
      cfg.triangles.push_back({{xs[0], xs[1], xs[2]}, xs[3]});
    }
    return std::nullopt;
  };
  keys["tails.times"] = reals_into(cfg.tail_times);
  keys["residual.split_point"] = real_into(cfg.split_point);
  keys["tolerance.identity"] = real_into(cfg.tol.identity);
  keys["tolerance.charge"] = real_into(cfg.tol.charge);
  keys["tolerance.triangle_c"] = real_into(cfg.tol.triangle_c);
  keys["tolerance.pointwise"] = real_into(cfg.tol.pointwise);
  keys["tolerance.profile"] = real_into(cfg.tol.profile);
  keys["tolerance.residual_k"] = real_into(cfg.tol.residual_k);
  keys["tolerance.residual_k_sup"] = real_into(cfg.tol.residual_k_sup);
  keys["tolerance.residual_floor"] = real_into(cfg.tol.residual_floor);
  keys["tolerance.tail_ratio"] = real_into(cfg.tol.tail_ratio);

  std::map<std::string, std::size_t> seen;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value', got '" + std::string(line) + "'");
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto it = keys.find(key);
    if (it == keys.end()) {
      errors.push_back(key + ": unknown key (line " + std::to_string(line_no) + ")");
      continue;
    }
    if (const auto prev = seen.find(key); prev != seen.end()) {
      errors.push_back(key + ": set more than once (lines " + std::to_string(prev->second) + " and " +
                       std::to_string(line_no) + ")");
      continue;
    }
    seen[key] = line_no;
    if (const auto err = it->second(value)) errors.push_back(key + ": " + *err);
  }

  // Model.
  cfg.model = model.value_or(ModelKind::thirring);
  if (cfg.model != ModelKind::custom) {
    if (alpha_set) errors.push_back("model.alpha: only allowed with model = custom");
    if (beta_set) errors.push_back("model.beta: only allowed with model = custom");
    cfg.params = cfg.model == ModelKind::thirring ? ModelParams::thirring() : ModelParams::gross_neveu();
  }
  if (cfg.scheme.kind == SchemeKind::phase_split && cfg.params.beta != 0.0)
    errors.push_back("scheme: phase_split requires beta == 0 (beta = " + shown(cfg.params.beta) + ")");
  if (!(cfg.scheme.fixed_point_tol > 0.0)) errors.push_back("scheme.fixed_point_tol: must be positive");

  // Lattice.
  bool grid_ok = true;
  if (!(cfg.h > 0.0)) {
    errors.push_back("grid.h: must be positive");
    grid_ok = false;
  }
  if (!(cfg.x_max > cfg.x_min)) {
    errors.push_back("grid.x_max: must exceed grid.x_min");
    grid_ok = false;
  } else if (grid_ok && !lattice_multiple(cfg.x_max - cfg.x_min, cfg.h)) {
    errors.push_back("grid.x_max: x_max - x_min not a multiple of h");
    grid_ok = false;
  }
  bool time_ok = grid_ok;
  if (!(cfg.T > 0.0)) {
    errors.push_back("T: must be positive");
    time_ok = false;
  } else if (grid_ok && !lattice_multiple(cfg.T, cfg.h)) {
    errors.push_back("T: T not a multiple of h (T = " + shown(cfg.T) + ", h = " + shown(cfg.h) + ")");
    time_ok = false;
  }

  if (grid_ok) {
    for (std::size_t i = 0; i < cfg.record_times.size(); ++i) {
      const double t = cfg.record_times[i];
      const std::string key = "record_times[" + std::to_string(i) + "]";
      const auto k = lattice_multiple(t, cfg.h);
      if (!k) {
        errors.push_back(key + ": " + shown(t) + " is not a multiple of h = " + shown(cfg.h));
      } else if (t < 0.0 || (time_ok && t > cfg.T)) {
        errors.push_back(key + ": " + shown(t) + " lies outside [0, T]");
      } else if (cfg.scheme.kind == SchemeKind::oracle4 && *k % 2 != 0) {
        errors.push_back(key + ": oracle4 needs an even number of steps");
      }
    }
    if (cfg.scheme.kind == SchemeKind::oracle4 && time_ok && *lattice_multiple(cfg.T, cfg.h) % 2 != 0)
      errors.push_back("T: oracle4 needs an even number of steps");

    for (const auto& e : validate(cfg.data, cfg.x_min, cfg.x_max)) errors.push_back(e);

    for (std::size_t i = 0; i < cfg.triangles.size(); ++i) {
      const auto& tri = cfg.triangles[i];
      const auto& r = tri.region;
      const std::string key = "triangle.regions[" + std::to_string(i) + "]";
      if (!(r.b > r.a)) errors.push_back(key + ": needs a < b");
      if (!on_lattice(r.a, cfg.x_min, cfg.h) || !on_lattice(r.b, cfg.x_min, cfg.h))
        errors.push_back(key + ": a and b must be lattice nodes");
      if (!lattice_multiple(r.t0, cfg.h) || !lattice_multiple(tri.tau, cfg.h))
        errors.push_back(key + ": t0 and tau must be multiples of h");
      if (r.a < cfg.x_min || r.b > cfg.x_max) errors.push_back(key + ": base leaves [x_min, x_max]");
      if (r.t0 < 0.0 || tri.tau < r.t0 || tri.tau > r.apex_time() + 1e-9 * cfg.h)
        errors.push_back(key + ": needs 0 <= t0 <= tau <= t0 + (b - a)/2");
      if (time_ok && tri.tau > cfg.T) errors.push_back(key + ": tau exceeds T");
    }
  }

  for (std::size_t i = 0; i < cfg.tail_times.size(); ++i)
    if (cfg.tail_times[i] < 0.0)
      errors.push_back("tails.times[" + std::to_string(i) + "]: must be non-negative");
  if (cfg.wants(Check::tails) && cfg.tail_times.size() < 2)
    errors.push_back("tails.times: the tails check needs at least two times");
  if (cfg.wants(Check::triangle) && cfg.triangles.empty())
    errors.push_back("triangle.regions: the triangle check needs at least one region");
  if (cfg.wants(Check::residual) &&
      std::none_of(cfg.record_times.begin(), cfg.record_times.end(), [](double t) { return t > 0.0; }))
    errors.push_back("record_times: the residual check needs a positive record time");

  const std::pair<const char*, double> tolerances[] = {
      {"tolerance.identity", cfg.tol.identity},       {"tolerance.charge", cfg.tol.charge},
      {"tolerance.triangle_c", cfg.tol.triangle_c},   {"tolerance.pointwise", cfg.tol.pointwise},
      {"tolerance.profile", cfg.tol.profile},         {"tolerance.residual_k", cfg.tol.residual_k},
      {"tolerance.residual_k_sup", cfg.tol.residual_k_sup}, {"tolerance.residual_floor", cfg.tol.residual_floor},
      {"tolerance.tail_ratio", cfg.tol.tail_ratio}};
  for (const auto& [key, value] : tolerances)
    if (value < 0.0) errors.push_back(std::string(key) + ": must be non-negative");

  if (!errors.empty()) throw ConfigError(std::move(errors));

  std::sort(cfg.record_times.begin(), cfg.record_times.end());
  cfg.record_times.erase(std::unique(cfg.record_times.begin(), cfg.record_times.end()), cfg.record_times.end());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["model"] = cfg.model == ModelKind::thirring ? "thirring" : cfg.model == ModelKind::gross_neveu ? "gross_neveu" : "custom";
  // Named models fix their couplings; spelling them out would not parse back.
  if (cfg.model == ModelKind::custom) {
    kv["model.alpha"] = format_double(cfg.params.alpha);
    kv["model.beta"] = format_double(cfg.params.beta);
  }
  kv["data.family"] = std::string(to_string(cfg.data.family));
  for (const auto& [side, p] : {std::pair{"u", cfg.data.u}, std::pair{"v", cfg.data.v}}) {
    const std::string base = std::string("data.") + side + ".";
    kv[base + "amplitude"] = format_double(p.amplitude);
    kv[base + "center"] = format_double(p.center);
    kv[base + "width"] = format_double(p.width);
    kv[base + "phase"] = format_double(p.phase);
  }
  kv["grid.x_min"] = format_double(cfg.x_min);
  kv["grid.x_max"] = format_double(cfg.x_max);
  kv["grid.h"] = format_double(cfg.h);
  kv["T"] = format_double(cfg.T);
  kv["scheme"] = std::string(to_string(cfg.scheme.kind));
  kv["scheme.fixed_point_tol"] = format_double(cfg.scheme.fixed_point_tol);
  kv["scheme.fixed_point_max_iter"] = std::to_string(cfg.scheme.fixed_point_max_iter);
  kv["record_times"] = join_reals(cfg.record_times);
  std::string checks;
  for (Check c : all_checks())
    if (cfg.wants(c)) checks += (checks.empty() ? "" : ",") + std::string(to_string(c));
  kv["checks"] = checks;
  kv["seed"] = std::to_string(cfg.seed);
  kv["identity.samples"] = std::to_string(cfg.identity_samples);
  std::string regions;
  for (const auto& t : cfg.triangles)
    regions += (regions.empty() ? "" : ";") + format_double(t.region.a) + ":" + format_double(t.region.b) + ":" +
               format_double(t.region.t0) + ":" + format_double(t.tau);
  kv["triangle.regions"] = regions;
  kv["tails.times"] = join_reals(cfg.tail_times);
  kv["residual.split_point"] = format_double(cfg.split_point);
  kv["tolerance.identity"] = format_double(cfg.tol.identity);
  kv["tolerance.charge"] = format_double(cfg.tol.charge);
  kv["tolerance.triangle_c"] = format_double(cfg.tol.triangle_c);
  kv["tolerance.pointwise"] = format_double(cfg.tol.pointwise);
  kv["tolerance.profile"] = format_double(cfg.tol.profile);
  kv["tolerance.residual_k"] = format_double(cfg.tol.residual_k);
  kv["tolerance.residual_k_sup"] = format_double(cfg.tol.residual_k_sup);
  kv["tolerance.residual_floor"] = format_double(cfg.tol.residual_floor);
  kv["tolerance.tail_ratio"] = format_double(cfg.tol.tail_ratio);

  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(cfg)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace nld
