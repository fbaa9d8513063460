#pragma once

// Experiment configuration: a flat `key = value` text format, parsed into a
// validated ExperimentConfig.  Lines starting with '#' are comments.  Lists
// are comma separated; triangle regions are `a:b:t0:tau` separated by ';'.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nld/fields.hpp"
#include "nld/solver.hpp"

namespace nld {

enum class ModelKind { thirring, gross_neveu, custom };

enum class Check { identity, charge, triangle, pointwise, profile, residual, tails };

std::string_view to_string(Check c) noexcept;
const std::vector<Check>& all_checks();

struct TriangleSpec {
  TriangleRegion region;
  double tau = 0.0;
};

struct Tolerances {
  double identity = 1e-12;        ///< flux defect relative to 1 + |u|^2 |v|^2
  double charge = 1e-5;           ///< total charge drift
  double triangle_c = 2.0;        ///< |defect| <= triangle_c h^2
  double pointwise = 1e-8;        ///< envelope violation
  double profile = 1e-6;          ///< tail certificate of the truncated profiles
  double residual_k = 0.0;        ///< l2^2 <= tail_bound + residual_k h^2
  double residual_k_sup = 0.0;    ///< sup <= sup_tail_bound + residual_k_sup h^2
  double residual_floor = 0.0;    ///< residuals at or below this count as zero in the decrease test
  double tail_ratio = 1e-6;       ///< tail_bound(last) / tail_bound(first)
};

struct ExperimentConfig {
  ModelKind model = ModelKind::thirring;
  ModelParams params = ModelParams::thirring();
  DataSpec data{DataFamily::gaussian, {1.0, 0.0, 1.0, 0.0}, {1.0, 1.0, 1.0, 0.0}};
  double x_min = -40.0;
  double x_max = 40.0;
  double h = 1.0 / 128.0;
  double T = 20.0;
  Scheme scheme;
  std::vector<double> record_times{5.0, 10.0, 20.0};
  std::vector<Check> checks = all_checks();
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::size_t identity_samples = 100000;
  std::vector<TriangleSpec> triangles{
      {{-4.0, 4.0, 0.0}, 2.0}, {{-3.0, 3.0, 1.0}, 2.5}, {{-2.0, 2.0, 2.0}, 3.0}, {{-2.5, 3.5, 0.0}, 3.0}};
  std::vector<double> tail_times{0.0, 2.5, 5.0, 10.0, 20.0};
  double split_point = -5.0;
  Tolerances tol;

  bool wants(Check c) const noexcept;
  Grid grid() const { return Grid::for_run(x_min, x_max, h, T); }
  /// Same experiment with the lattice spacing divided by 2^k.
  ExperimentConfig halved(unsigned k) const;
};

/// Every violation found, each prefixed with the offending key.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Throws ConfigError listing all problems.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical `key = value` listing of every effective setting, sorted by key.
std::string canonical_text(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical text.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// %.17g formatting without locale dependence; round-trips every double.
std::string format_double(double x);

}  // namespace nld
