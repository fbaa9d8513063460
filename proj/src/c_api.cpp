#include "nld/nld.h"

#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "nld/conservation.hpp"
#include "nld/config.hpp"
#include "nld/experiment.hpp"
#include "nld/nonlinearity.hpp"

struct nld_config {
  nld::ExperimentConfig cfg;
};

struct nld_result {
  nld::ExperimentResult res;
};

struct nld_sweep {
  nld::SweepResult res;
};

struct nld_trajectory {
  nld::Trajectory traj;
};

namespace {

thread_local std::string last_error;

nld_status status_of(nld::ErrorCode code) {
  switch (code) {
    case nld::ErrorCode::invalid_argument: return NLD_ERR_INVALID_ARGUMENT;
    case nld::ErrorCode::support_overflow: return NLD_ERR_SUPPORT_OVERFLOW;
    case nld::ErrorCode::grid_mismatch: return NLD_ERR_GRID_MISMATCH;
    case nld::ErrorCode::off_lattice: return NLD_ERR_OFF_LATTICE;
    case nld::ErrorCode::blow_up: return NLD_ERR_BLOW_UP;
    case nld::ErrorCode::fixed_point_divergence: return NLD_ERR_FIXED_POINT_DIVERGENCE;
    case nld::ErrorCode::missing_data: return NLD_ERR_MISSING_DATA;
    case nld::ErrorCode::config_invalid: return NLD_ERR_CONFIG_INVALID;
    case nld::ErrorCode::io: return NLD_ERR_IO;
  }
  return NLD_ERR_INTERNAL;
}

nld_status fail(nld_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
nld_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const nld::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NLD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NLD_ERR_INTERNAL, e.what());
  }
}

nld_status copy_text(const std::string& text, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf) return NLD_OK;
  if (cap < text.size() + 1) return fail(NLD_ERR_BUFFER_TOO_SMALL, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return NLD_OK;
}

#define NLD_REQUIRE(cond, what) \
  if (!(cond)) return fail(NLD_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* nld_last_error(void) { return last_error.c_str(); }

const char* nld_status_name(nld_status status) {
  switch (status) {
    case NLD_OK: return "ok";
    case NLD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case NLD_ERR_SUPPORT_OVERFLOW: return "support_overflow";
    case NLD_ERR_GRID_MISMATCH: return "grid_mismatch";
    case NLD_ERR_OFF_LATTICE: return "off_lattice";
    case NLD_ERR_BLOW_UP: return "blow_up";
    case NLD_ERR_FIXED_POINT_DIVERGENCE: return "fixed_point_divergence";
    case NLD_ERR_MISSING_DATA: return "missing_data";
    case NLD_ERR_CONFIG_INVALID: return "config_invalid";
    case NLD_ERR_IO: return "io";
    case NLD_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case NLD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* nld_version(void) { return "1.0.0"; }

nld_status nld_config_parse(const char* text, nld_config** out) {
  NLD_REQUIRE(text && out, "nld_config_parse: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new nld_config{nld::parse_config(text)};
    return NLD_OK;
  });
}

nld_status nld_config_load(const char* path, nld_config** out) {
  NLD_REQUIRE(path && out, "nld_config_load: null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new nld_config{nld::load_config(path)};
    return NLD_OK;
  });
}

void nld_config_free(nld_config* cfg) { delete cfg; }

nld_status nld_parse_violations(const char* text, size_t* count) {
  NLD_REQUIRE(text && count, "nld_parse_violations: null argument");
  return guarded([&] {
    try {
      nld::parse_config(text);
      *count = 0;
    } catch (const nld::ConfigError& e) {
      *count = e.violations().size();
    }
    return NLD_OK;
  });
}

nld_status nld_parse_violation(const char* text, size_t index, char* buf, size_t cap, size_t* needed) {
  NLD_REQUIRE(text, "nld_parse_violation: null text");
  return guarded([&] {
    try {
      nld::parse_config(text);
    } catch (const nld::ConfigError& e) {
      if (index < e.violations().size()) return copy_text(e.violations()[index], buf, cap, needed);
    }
    return fail(NLD_ERR_INVALID_ARGUMENT, "nld_parse_violation: index out of range");
  });
}

nld_status nld_config_canonical(const nld_config* cfg, char* buf, size_t cap, size_t* needed) {
  NLD_REQUIRE(cfg, "nld_config_canonical: null config");
  return guarded([&] { return copy_text(nld::canonical_text(cfg->cfg), buf, cap, needed); });
}

nld_status nld_config_hash(const nld_config* cfg, uint64_t* hash) {
  NLD_REQUIRE(cfg && hash, "nld_config_hash: null argument");
  return guarded([&] {
    *hash = nld::config_hash(cfg->cfg);
    return NLD_OK;
  });
}

nld_status nld_config_output_dir(const nld_config* cfg, char* buf, size_t cap, size_t* needed) {
  NLD_REQUIRE(cfg, "nld_config_output_dir: null config");
  return copy_text(cfg->cfg.output_dir, buf, cap, needed);
}

nld_status nld_run(const nld_config* cfg, const char* output_dir, nld_result** out) {
  NLD_REQUIRE(cfg && out, "nld_run: null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string dir = output_dir ? output_dir : cfg->cfg.output_dir;
    *out = new nld_result{nld::run_experiment(cfg->cfg, dir)};
    return NLD_OK;
  });
}

void nld_result_free(nld_result* res) { delete res; }

nld_status nld_result_exit_status(const nld_result* res, int* status) {
  NLD_REQUIRE(res && status, "nld_result_exit_status: null argument");
  *status = res->res.exit_status;
  return NLD_OK;
}

nld_status nld_result_check_count(const nld_result* res, size_t* count) {
  NLD_REQUIRE(res && count, "nld_result_check_count: null argument");
  *count = res->res.checks.size();
  return NLD_OK;
}

nld_status nld_result_check(const nld_result* res, size_t index, const char** name, double* value, double* tolerance,
                            int* passed) {
  NLD_REQUIRE(res, "nld_result_check: null result");
  NLD_REQUIRE(index < res->res.checks.size(), "nld_result_check: index out of range");
  const auto& c = res->res.checks[index];
  if (name) *name = c.name.c_str();
  if (value) *value = c.value;
  if (tolerance) *tolerance = c.tolerance;
  if (passed) *passed = c.passed ? 1 : 0;
  return NLD_OK;
}

nld_status nld_result_summary_json(const nld_result* res, char* buf, size_t cap, size_t* needed) {
  NLD_REQUIRE(res, "nld_result_summary_json: null result");
  return copy_text(res->res.summary_json, buf, cap, needed);
}

nld_status nld_run_sweep(const nld_config* cfg, unsigned halvings, const char* output_dir, nld_sweep** out) {
  NLD_REQUIRE(cfg && out, "nld_run_sweep: null argument");
  NLD_REQUIRE(halvings >= 1 && halvings <= 8, "nld_run_sweep: halvings must be in [1, 8]");
  *out = nullptr;
  return guarded([&] {
    const std::string dir = output_dir ? output_dir : cfg->cfg.output_dir;
    *out = new nld_sweep{nld::run_sweep(cfg->cfg, halvings, dir)};
    return NLD_OK;
  });
}

void nld_sweep_free(nld_sweep* sweep) { delete sweep; }

nld_status nld_sweep_table(const nld_sweep* sweep, char* buf, size_t cap, size_t* needed) {
  NLD_REQUIRE(sweep, "nld_sweep_table: null sweep");
  return copy_text(sweep->res.table, buf, cap, needed);
}

nld_status nld_sweep_csv(const nld_sweep* sweep, char* buf, size_t cap, size_t* needed) {
  NLD_REQUIRE(sweep, "nld_sweep_csv: null sweep");
  return copy_text(sweep->res.csv, buf, cap, needed);
}

nld_status nld_simulate(const nld_config* cfg, nld_trajectory** out) {
  NLD_REQUIRE(cfg && out, "nld_simulate: null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& c = cfg->cfg;
    const nld::Grid grid = c.grid();
    const auto data = nld::make_initial_data(c.data, grid);
    nld::RunOptions opt;
    opt.record_times = c.record_times;
    *out = new nld_trajectory{nld::run(data, grid, c.params, c.scheme, opt)};
    return NLD_OK;
  });
}

void nld_trajectory_free(nld_trajectory* traj) { delete traj; }

nld_status nld_trajectory_nodes(const nld_trajectory* traj, size_t* count) {
  NLD_REQUIRE(traj && count, "nld_trajectory_nodes: null argument");
  *count = traj->traj.grid.n_cells();
  return NLD_OK;
}

nld_status nld_trajectory_times(const nld_trajectory* traj, double* times, size_t cap, size_t* count) {
  NLD_REQUIRE(traj && count, "nld_trajectory_times: null argument");
  const auto& snaps = traj->traj.snapshots;
  *count = snaps.size();
  if (!times) return NLD_OK;
  if (cap < snaps.size()) return fail(NLD_ERR_BUFFER_TOO_SMALL, "nld_trajectory_times: buffer too small");
  for (std::size_t i = 0; i < snaps.size(); ++i) times[i] = snaps[i].t;
  return NLD_OK;
}

nld_status nld_trajectory_field(const nld_trajectory* traj, double t, double* u, double* v) {
  NLD_REQUIRE(traj, "nld_trajectory_field: null trajectory");
  const auto* s = traj->traj.snapshot_at(t);
  if (!s) return fail(NLD_ERR_MISSING_DATA, "nld_trajectory_field: t = " + std::to_string(t) + " was not recorded");
  const auto& g = traj->traj.grid;
  for (std::size_t k = 0; k < g.n_cells(); ++k) {
    const std::size_t j = g.pad() + k;
    if (u) {
      u[2 * k] = s->u[j].real();
      u[2 * k + 1] = s->u[j].imag();
    }
    if (v) {
      v[2 * k] = s->v[j].real();
      v[2 * k + 1] = s->v[j].imag();
    }
  }
  return NLD_OK;
}

nld_status nld_trajectory_charge_drift(const nld_trajectory* traj, double* drift) {
  NLD_REQUIRE(traj && drift, "nld_trajectory_charge_drift: null argument");
  return guarded([&] {
    *drift = nld::total_charge_drift(traj->traj);
    return NLD_OK;
  });
}

nld_status nld_trajectory_envelope_violation(const nld_trajectory* traj, double* violation) {
  NLD_REQUIRE(traj && violation, "nld_trajectory_envelope_violation: null argument");
  *violation = traj->traj.monitor.envelope_violation;
  return NLD_OK;
}

nld_status nld_eval_nonlinearity(double alpha, double beta, double u_re, double u_im, double v_re, double v_im,
                                 double n1[2], double n2[2]) {
  NLD_REQUIRE(n1 && n2, "nld_eval_nonlinearity: null output");
  NLD_REQUIRE(std::isfinite(alpha) && std::isfinite(beta), "nld_eval_nonlinearity: couplings must be finite");
  const nld::SpinorPair p{{u_re, u_im}, {v_re, v_im}};
  const nld::ModelParams m{alpha, beta};
  const auto a = nld::eval_N1(p, m);
  const auto b = nld::eval_N2(p, m);
  n1[0] = a.real();
  n1[1] = a.imag();
  n2[0] = b.real();
  n2[1] = b.imag();
  return NLD_OK;
}

}  // extern "C"
