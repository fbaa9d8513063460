// Command-line front end: run, check and sweep experiment configurations.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nld/nld.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 5;

// Fetches a text result through the two-call buffer protocol.
template <class Handle>
std::string fetch(nld_status (*fn)(const Handle*, char*, size_t, size_t*), const Handle* h) {
  size_t needed = 0;
  if (fn(h, nullptr, 0, &needed) != NLD_OK) return {};
  std::vector<char> buf(needed);
  if (fn(h, buf.data(), buf.size(), &needed) != NLD_OK) return {};
  return std::string(buf.data());
}

int report_error(nld_status s) {
  std::fprintf(stderr, "error (%s): %s\n", nld_status_name(s), nld_last_error());
  switch (s) {
    case NLD_ERR_CONFIG_INVALID:
    case NLD_ERR_SUPPORT_OVERFLOW:
    case NLD_ERR_OFF_LATTICE: return kExitConfig;
    case NLD_ERR_IO: return kExitIo;
    default: return kExitInternal;
  }
}

struct Config {
  nld_config* handle = nullptr;
  ~Config() { nld_config_free(handle); }
};

int cmd_check(const std::string& path) {
  Config cfg;
  if (nld_status s = nld_config_load(path.c_str(), &cfg.handle); s != NLD_OK) return report_error(s);
  uint64_t hash = 0;
  nld_config_hash(cfg.handle, &hash);
  std::printf("%s: valid (config hash %016" PRIx64 ")\n", path.c_str(), hash);
  std::fputs(fetch(nld_config_canonical, cfg.handle).c_str(), stdout);
  return 0;
}

int cmd_run(const std::string& path, const std::string& out_dir) {
  Config cfg;
  if (nld_status s = nld_config_load(path.c_str(), &cfg.handle); s != NLD_OK) return report_error(s);
  nld_result* res = nullptr;
  if (nld_status s = nld_run(cfg.handle, out_dir.empty() ? nullptr : out_dir.c_str(), &res); s != NLD_OK)
    return report_error(s);

  int status = 0;
  nld_result_exit_status(res, &status);
  size_t n = 0;
  nld_result_check_count(res, &n);
  for (size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    double value = 0.0, tol = 0.0;
    int passed = 0;
    nld_result_check(res, i, &name, &value, &tol, &passed);
    std::printf("%-4s %-24s value=%-24.17g tolerance=%.17g\n", passed ? "PASS" : "FAIL", name, value, tol);
  }
  if (status == 3) std::fprintf(stderr, "solver aborted; see summary.json\n");
  const std::string dir = out_dir.empty() ? fetch(nld_config_output_dir, cfg.handle) : out_dir;
  std::printf("artifacts written to %s (exit status %d)\n", dir.c_str(), status);
  nld_result_free(res);
  return status;
}

int cmd_sweep(const std::string& path, unsigned halvings, const std::string& out_dir) {
  Config cfg;
  if (nld_status s = nld_config_load(path.c_str(), &cfg.handle); s != NLD_OK) return report_error(s);
  nld_sweep* sweep = nullptr;
  if (nld_status s = nld_run_sweep(cfg.handle, halvings, out_dir.empty() ? nullptr : out_dir.c_str(), &sweep);
      s != NLD_OK)
    return report_error(s);
  std::fputs(fetch(nld_sweep_table, sweep).c_str(), stdout);
  nld_sweep_free(sweep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristics solver for the massless nonlinear Dirac system in 1+1 dimensions"};
  app.set_version_flag("--version", std::string(nld_version()));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned halvings = 1;

  auto* run = app.add_subcommand("run", "run an experiment, write its artifacts and evaluate all checks");
  run->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", out_dir, "override output_dir from the configuration");

  auto* check = app.add_subcommand("check", "parse and validate a configuration without running it");
  check->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "refinement study with an order-of-convergence table");
  sweep->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--halve-h", halvings, "number of successive halvings of h")
      ->check(CLI::Range(1u, 8u))
      ->default_val(1);
  sweep->add_option("-o,--output-dir", out_dir, "override output_dir from the configuration");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(config_path, out_dir);
  if (*check) return cmd_check(config_path);
  return cmd_sweep(config_path, halvings, out_dir);
}
