#include "nld/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nld/asymptotics.hpp"
#include "nld/conservation.hpp"
#include "nld/nonlinearity.hpp"

namespace nld {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kAnchorIdentity = "Re(i conj(N1) u) + Re(i conj(N2) v) = 0";
constexpr const char* kAnchorCharge = "(|u|^2+|v|^2)_t +(|u|^2-|v|^2)_x=0";
constexpr const char* kAnchorTriangle =
    "\\int_{a-t_0+\\tau}^{b+t_0-\\tau} + 2 \\int_{t_0}^{\\tau} |u(b+t_0-s,s)|^2 ds + 2\\int_{t_0}^{\\tau} "
    "|v(a-t_0+s,s)|^2 ds = \\int_a^b";
constexpr const char* kAnchorPointwise = "|u(x,t)|^2 \\le e^{8|\\beta|C_0}\\ |u_0(x-t)|^2";
constexpr const char* kAnchorProfile = "G_1(x-t)=- i \\int_{0}^{\\infty} N_1";
constexpr const char* kAnchorResidualL2 = "|u(x,t)-u_0(x-t)-G_1(x-t)|^2";
constexpr const char* kAnchorResidualSup = "\\lim\\limits_{t\\to\\infty} \\sup_{x\\in R^1}";
constexpr const char* kAnchorTails =
    "\\int^{\\infty}_{-\\infty} |u_0(y)|^2 \\Big(\\int^{\\infty}_{y+2t} |v_0(\\tau)|^2d\\tau\\Big)^2 dy";

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error(ErrorCode::io, "write to '" + path.string() + "' failed");
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

// Ratio of successive values; both at or below the floor count as settled.
double worst_ratio(const std::vector<double>& xs, double floor) {
  double worst = 0.0;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const double prev = xs[k - 1], next = xs[k];
    if (next <= floor && prev <= floor) continue;
    if (prev <= floor) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, next / prev);
  }
  return worst;
}

CheckResult make_check(std::string name, double value, double tol, std::string anchor, std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tol;
  c.passed = std::isfinite(value) && value <= tol;
  c.anchor = std::move(anchor);
  c.detail = std::move(detail);
  return c;
}

struct Evaluation {
  Trajectory traj;
  Profile p_u, p_v;
  std::vector<ResidualReport> residuals;
  std::vector<BalanceReport> balances;
};

RunOptions options_for(const ExperimentConfig& cfg) {
  RunOptions opt;
  opt.record_times = cfg.record_times;
  if (cfg.wants(Check::triangle) && !cfg.triangles.empty()) {
    DenseWindow w{cfg.triangles.front().region.a, cfg.triangles.front().region.b, 0.0};
    for (const auto& t : cfg.triangles) {
      w.x_lo = std::min(w.x_lo, t.region.a);
      w.x_hi = std::max(w.x_hi, t.region.b);
      w.t_hi = std::max(w.t_hi, t.tau);
    }
    opt.dense = w;
  }
  return opt;
}

Evaluation evaluate(const ExperimentConfig& cfg) {
  const Grid grid = cfg.grid();
  const InitialData data = make_initial_data(cfg.data, grid);
  Evaluation ev{run(data, grid, cfg.params, cfg.scheme, options_for(cfg)), {}, {}, {}, {}};
  ev.p_u = compute_profile(ev.traj, Side::right_mover);
  ev.p_v = compute_profile(ev.traj, Side::left_mover);
  for (const auto& s : ev.traj.snapshots)
    if (s.t > 0.0) ev.residuals.push_back(residual(ev.traj, s.t, ev.p_u, ev.p_v, cfg.split_point));
  if (ev.traj.dense)
    for (const auto& t : cfg.triangles) ev.balances.push_back(triangle_balance(ev.traj, t.region, t.tau));
  return ev;
}

double residual_excess(const std::vector<ResidualReport>& rs, const InitialData& data, const ModelParams& m,
                       bool sup) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : rs) {
    const double h2 = r.h * r.h;
    if (sup) {
      worst = std::max({worst, (r.sup_u - r.sup_bound_u) / h2, (r.sup_v - r.sup_bound_v) / h2});
    } else {
      const double bu = tail_bound(data, m, r.t, Side::right_mover);
      const double bv = tail_bound(data, m, r.t, Side::left_mover);
      worst = std::max({worst, (r.l2_u * r.l2_u - bu) / h2, (r.l2_v * r.l2_v - bv) / h2});
    }
  }
  return rs.empty() ? 0.0 : worst;
}

std::vector<CheckResult> judge(const ExperimentConfig& cfg, const Evaluation& ev) {
  std::vector<CheckResult> out;
  const double h = cfg.h;
  const auto& data = ev.traj.data;

  if (cfg.wants(Check::identity)) {
    out.push_back(make_check("identity", identity_sweep(cfg.seed, cfg.identity_samples), cfg.tol.identity,
                             kAnchorIdentity,
                             std::to_string(cfg.identity_samples) + " seeded samples, relative to 1 + |u|^2 |v|^2"));
  }
  if (cfg.wants(Check::charge))
    out.push_back(make_check("charge", total_charge_drift(ev.traj), cfg.tol.charge, kAnchorCharge,
                             "max relative drift over recorded snapshots"));
  if (cfg.wants(Check::triangle)) {
    for (std::size_t i = 0; i < ev.balances.size(); ++i) {
      const auto& b = ev.balances[i];
      std::ostringstream os;
      os << "a=" << format_double(b.region.a) << " b=" << format_double(b.region.b)
         << " t0=" << format_double(b.region.t0) << " tau=" << format_double(b.tau);
      if (b.tau >= b.region.apex_time() - 1e-9 * h) os << " (light cone)";
      out.push_back(make_check("triangle[" + std::to_string(i) + "]", std::abs(b.defect), cfg.tol.triangle_c * h * h,
                               kAnchorTriangle, os.str()));
    }
  }
  if (cfg.wants(Check::pointwise)) {
    const double v = std::max(check_pointwise_bound(ev.traj, data.c0()), ev.traj.monitor.envelope_violation);
    out.push_back(make_check("pointwise", v, cfg.tol.pointwise, kAnchorPointwise,
                             "max over every node and step of |u|^2 - e^{8|beta|c0}|u0(x-t)|^2 and the v analogue"));
  }
  if (cfg.wants(Check::profile)) {
    bool finite = true;
    for (const auto* p : {&ev.p_u, &ev.p_v})
      for (Complex z : p->values) finite = finite && std::isfinite(z.real()) && std::isfinite(z.imag());
    auto c = make_check("profile", std::max(ev.p_u.tail_certificate, ev.p_v.tail_certificate), cfg.tol.profile,
                        kAnchorProfile, "L2 certificate of the tail beyond t_max = " + format_double(ev.p_u.t_max));
    c.passed = c.passed && finite;
    out.push_back(std::move(c));
  }
  if (cfg.wants(Check::residual)) {
    std::vector<double> l2u, l2v, supu, supv;
    for (const auto& r : ev.residuals) {
      l2u.push_back(r.l2_u);
      l2v.push_back(r.l2_v);
      supu.push_back(r.sup_u);
      supv.push_back(r.sup_v);
    }
    const double floor = cfg.tol.residual_floor;
    out.push_back(make_check("residual.l2.decrease", std::max(worst_ratio(l2u, floor), worst_ratio(l2v, floor)),
                             1.0, kAnchorResidualL2, "largest ratio of successive L2 residuals; must stay below 1"));
    out.back().passed = out.back().value < 1.0;
    out.push_back(make_check("residual.sup.decrease", std::max(worst_ratio(supu, floor), worst_ratio(supv, floor)),
                             1.0, kAnchorResidualSup, "largest ratio of successive sup residuals; must stay below 1"));
    out.back().passed = out.back().value < 1.0;
    out.push_back(make_check("residual.l2.bound", residual_excess(ev.residuals, data, cfg.params, false),
                             cfg.tol.residual_k, kAnchorResidualL2, "max (l2^2 - tail_bound) / h^2 against K"));
    out.push_back(make_check("residual.sup.bound", residual_excess(ev.residuals, data, cfg.params, true),
                             cfg.tol.residual_k_sup, kAnchorResidualSup,
                             "max (sup - sup_tail_bound) / h^2 against K'; split at M = " +
                                 format_double(cfg.split_point)));
  }
  if (cfg.wants(Check::tails)) {
    std::vector<double> times = cfg.tail_times;
    std::sort(times.begin(), times.end());
    double increase = 0.0, ratio = 0.0;
    for (Side side : {Side::right_mover, Side::left_mover}) {
      std::vector<double> b;
      for (double t : times) b.push_back(tail_bound(data, cfg.params, t, side));
      for (std::size_t k = 1; k < b.size(); ++k)
        if (b[k] > b[k - 1]) increase = std::max(increase, b[k] / std::max(b[k - 1], 1e-300));
      if (b.front() > 0.0) ratio = std::max(ratio, b.back() / b.front());
    }
    out.push_back(make_check("tails.monotone", increase, 1.0, kAnchorTails,
                             "largest growth factor between successive tail bounds; 0 when nonincreasing"));
    out.back().passed = increase <= 1.0;
    out.push_back(make_check("tails.ratio", ratio, cfg.tol.tail_ratio, kAnchorTails,
                             "tail_bound(" + format_double(times.back()) + ") / tail_bound(" +
                                 format_double(times.front()) + ")"));
  }
  return out;
}

Json config_summary(const ExperimentConfig& cfg) {
  Json j;
  j["config_hash"] = hex64(config_hash(cfg));
  j["model"] = {{"alpha", cfg.params.alpha}, {"beta", cfg.params.beta}};
  j["data"] = std::string(to_string(cfg.data.family));
  j["grid"] = {{"x_min", cfg.x_min}, {"x_max", cfg.x_max}, {"h", cfg.h}};
  j["T"] = cfg.T;
  j["scheme"] = std::string(to_string(cfg.scheme.kind));
  return j;
}

std::string csv_row(std::initializer_list<double> xs) {
  std::string line;
  bool first = true;
  for (double x : xs) {
    if (!first) line += ',';
    if (!std::isnan(x)) line += format_double(x);  // NaN: not available, empty cell
    first = false;
  }
  return line + '\n';
}

void write_artifacts(const std::filesystem::path& dir, const Evaluation& ev) {
  const Grid& g = ev.traj.grid;
  const std::size_t lo = g.pad(), hi = g.pad() + g.n_cells();

  std::string snaps = "t,x,re_u,im_u,re_v,im_v\n";
  for (const auto& s : ev.traj.snapshots)
    for (std::size_t j = lo; j < hi; ++j)
      snaps += csv_row({s.t, g.x(j), s.u[j].real(), s.u[j].imag(), s.v[j].real(), s.v[j].imag()});
  write_file(dir / "snapshots.csv", snaps);

  std::string profiles = "side,y,re,im\n";
  for (const auto* p : {&ev.p_u, &ev.p_v}) {
    const char* side = p->side == Side::right_mover ? "G1" : "G2";
    for (std::size_t j = lo; j < hi; ++j)
      profiles += std::string(side) + "," + csv_row({p->y[j], p->values[j].real(), p->values[j].imag()});
  }
  write_file(dir / "profiles.csv", profiles);

  std::string res = "t,l2_u,sup_u,l2_v,sup_v,bound_u,bound_v\n";
  for (const auto& r : ev.residuals)
    res += csv_row({r.t, r.l2_u, r.sup_u, r.l2_v, r.sup_v, r.analytic_bound_u, r.analytic_bound_v});
  write_file(dir / "residuals.csv", res);

  Json balances = Json::array();
  for (const auto& b : ev.balances)
    balances.push_back({{"a", b.region.a},
                        {"b", b.region.b},
                        {"t0", b.region.t0},
                        {"tau", b.tau},
                        {"interior_charge", b.interior_charge},
                        {"right_flux", b.right_flux},
                        {"left_flux", b.left_flux},
                        {"initial_charge", b.initial_charge},
                        {"defect", b.defect}});
  write_file(dir / "balance.json", balances.dump(2) + "\n");
}

}  // namespace

double identity_sweep(std::uint64_t seed, std::size_t samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> comp(-3.0, 3.0);
  std::uniform_real_distribution<double> coupling(-2.0, 2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const SpinorPair p{{comp(rng), comp(rng)}, {comp(rng), comp(rng)}};
    const ModelParams m{coupling(rng), coupling(rng)};
    const double scale = 1.0 + std::norm(p.u) * std::norm(p.v);
    worst = std::max(worst, std::abs(charge_flux_defect(p, m)) / scale);
  }
  return worst;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& output_dir) {
  const auto dir = prepare_dir(output_dir);
  ExperimentResult result;
  Json summary = config_summary(cfg);

  try {
    const Evaluation ev = evaluate(cfg);
    result.checks = judge(cfg, ev);
    result.passed = std::all_of(result.checks.begin(), result.checks.end(), [](const auto& c) { return c.passed; });
    result.exit_status = result.passed ? exit_ok : exit_check_failed;
    write_artifacts(dir, ev);
    summary["status"] = result.passed ? "passed" : "failed";
    summary["max_fixed_point_iterations"] = ev.traj.max_fixed_point_iterations;
    summary["c0"] = ev.traj.data.c0();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw;
    result.passed = false;
    result.exit_status = exit_solver_abort;
    result.error = e.what();
    summary["status"] = "aborted";
    summary["error"] = {{"code", static_cast<int>(e.code())}, {"message", e.what()}};
  }

  Json checks = Json::array();
  for (const auto& c : result.checks)
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed},
                      {"anchor", c.anchor},
                      {"detail", c.detail}});
  summary["checks"] = std::move(checks);
  result.summary_json = summary.dump(2) + "\n";
  write_file(dir / "summary.json", result.summary_json);
  return result;
}

SweepResult run_sweep(const ExperimentConfig& cfg, unsigned halvings, const std::string& output_dir) {
  const auto dir = prepare_dir(output_dir);
  SweepResult out;
  std::vector<SpinorField> finals;
  std::vector<Grid> grids;
  for (unsigned k = 0; k <= halvings; ++k) {
    const ExperimentConfig level = cfg.halved(k);
    const Evaluation ev = evaluate(level);
    SweepRow row;
    row.h = level.h;
    row.charge_drift = total_charge_drift(ev.traj);
    for (const auto& b : ev.balances) row.triangle_defect = std::max(row.triangle_defect, std::abs(b.defect));
    row.residual_k = residual_excess(ev.residuals, ev.traj.data, level.params, false);
    row.residual_k_sup = residual_excess(ev.residuals, ev.traj.data, level.params, true);
    out.rows.push_back(row);
    finals.push_back(ev.traj.snapshots.back());
    grids.push_back(ev.traj.grid);
  }
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    const SpinorField fine = restrict_to(finals[k + 1], grids[k + 1], grids[k], 2);
    double sum = 0.0;
    for (std::size_t j = 0; j < fine.u.size(); ++j)
      sum += std::norm(fine.u[j] - finals[k].u[j]) + std::norm(fine.v[j] - finals[k].v[j]);
    out.rows[k].solution_change = std::sqrt(grids[k].h() * sum);
  }

  // Observed order log2(previous / current); NaN where either value is zero
  // or there is no previous level.
  constexpr double na = std::numeric_limits<double>::quiet_NaN();
  const auto order = [&](std::size_t k, double SweepRow::*field) {
    if (k == 0) return na;
    const double prev = out.rows[k - 1].*field, cur = out.rows[k].*field;
    return cur > 0.0 && prev > 0.0 ? std::log2(prev / cur) : na;
  };
  const auto cell = [](double x, const char* fmt) {
    char buf[32];
    if (std::isnan(x)) return std::string("-");
    std::snprintf(buf, sizeof buf, fmt, x);
    return std::string(buf);
  };
  out.csv =
      "h,charge_drift,drift_order,triangle_defect,triangle_order,solution_change,change_order,residual_k,"
      "residual_k_sup\n";
  std::ostringstream table;
  char line[256];
  std::snprintf(line, sizeof line, "%-11s %-11s %-6s %-11s %-6s %-11s %-6s %-11s %-11s\n", "h", "drift", "order",
                "triangle", "order", "change", "order", "K_l2", "K_sup");
  table << line;
  const std::size_t last = out.rows.size() - 1;
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    const auto& r = out.rows[k];
    const double od = order(k, &SweepRow::charge_drift);
    const double ot = order(k, &SweepRow::triangle_defect);
    // the finest level has nothing to compare against
    const double change = k < last ? r.solution_change : na;
    const double oc = k < last ? order(k, &SweepRow::solution_change) : na;
    out.csv += csv_row({r.h, r.charge_drift, od, r.triangle_defect, ot, change, oc, r.residual_k, r.residual_k_sup});
    std::snprintf(line, sizeof line, "%-11.5g %-11.4e %-6s %-11.4e %-6s %-11s %-6s %-11.4e %-11.4e\n", r.h,
                  r.charge_drift, cell(od, "%.2f").c_str(), r.triangle_defect, cell(ot, "%.2f").c_str(),
                  cell(change, "%.4e").c_str(), cell(oc, "%.2f").c_str(), r.residual_k, r.residual_k_sup);
    table << line;
  }
  table << "order = log2 of the ratio to the previous level; change = L2 distance of the final state to the next "
           "level\n";
  out.table = table.str();
  write_file(dir / "sweep.csv", out.csv);
  return out;
}

}  // namespace nld
