// Command-line front end: run, sweep-dt, convergence, volume-check.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsstokes/config.hpp"
#include "fsstokes/convergence.hpp"
#include "fsstokes/output.hpp"
#include "fsstokes/schemes.hpp"

namespace fs = std::filesystem;
using namespace fsstokes;

namespace {

struct CommonOptions {
  std::string config;
  std::string scheme;
  double dt = 0.0;
  std::string out;
  long long seed = -1;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "configuration file (key = value)");
  app->add_option("--scheme", o.scheme, "IE, EE_UNSTAB, EE_UNSTAB_W, EE_STAB, EE_FSSA, SIE_FSSA");
  app->add_option("--dt", o.dt, "time step (years for greenland-synthetic)");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "seed of the synthetic ice-sheet geometry");
}

bool si_years(const SimConfig& cfg) { return cfg.problem.units == UnitSystem::si_years; }

double display_time(const SimConfig& cfg, double t) {
  return si_years(cfg) ? t / seconds_per_year : t;
}

SimConfig base_config(const CommonOptions& o) {
  SimConfig cfg = o.config.empty() ? parse_config("case = tank\nscheme = EE_STAB\ndt = 0.5\n")
                                   : load_config(o.config);
  if (!o.scheme.empty()) {
    cfg.scheme = parse_scheme(o.scheme);
  }
  if (o.dt > 0.0) {
    cfg.dt = si_years(cfg) ? o.dt * seconds_per_year : o.dt;
  }
  if (o.seed >= 0) {
    cfg.problem.seed = static_cast<std::uint64_t>(o.seed);
    rebuild_case(cfg.problem);
  }
  if (!o.out.empty()) {
    fs::create_directories(o.out);
  }
  return cfg;
}

std::string out_path(const CommonOptions& o, const std::string& name) {
  return o.out.empty() ? std::string() : (fs::path(o.out) / name).string();
}

void print_header(const SimConfig& cfg) {
  if (cfg.problem.kind == CaseKind::greenland_synthetic) {
    std::cout << "# case: greenland-synthetic (seeded synthetic bedrock and surface standing in for "
                 "a measured ice-sheet slice; times in years)\n";
  } else if (cfg.problem.kind == CaseKind::tank) {
    std::cout << "# case: tank (bed at " << cfg.problem.bed_level << ", source "
              << (cfg.problem.source_enabled ? "on" : "off") << ")\n";
  }
  std::cout << "# grid " << cfg.problem.nx << " x " << cfg.problem.ny << ", t_final "
            << display_time(cfg, cfg.problem.t_final) << "\n";
}

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

int report(const std::vector<Check>& checks) {
  bool all = true;
  for (const Check& c : checks) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name;
    if (!c.detail.empty()) {
      std::cout << "  (" << c.detail << ")";
    }
    std::cout << "\n";
    all = all && c.passed;
  }
  return all ? 0 : 1;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

constexpr double energy_slack = 1e-12;
constexpr double volume_tol = 1e-10;
constexpr double ie_slack = 1e-10;

double max_ie_excess(const RunResult& r) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& rec : r.records) {
    worst = std::max(worst, (rec.ie_lhs - rec.ie_rhs) / std::max(std::abs(rec.ie_rhs), 1e-300));
  }
  return worst;
}

// Properties the scheme is claimed to have on any run.
std::vector<Check> run_checks(SchemeKind kind, const RunResult& r, const std::string& tag) {
  std::vector<Check> out;
  const bool may_fail = kind == SchemeKind::EE_UNSTAB;
  if (!may_fail) {
    out.push_back({tag + " completed", !r.failed, r.failure});
  }
  if (kind == SchemeKind::EE_STAB || kind == SchemeKind::IE) {
    out.push_back({tag + " stable (max E_bar <= 1e-12)", r.max_energy() <= energy_slack,
                   "max E_bar " + fmt(r.max_energy())});
  }
  if (kind == SchemeKind::IE) {
    out.push_back({tag + " implicit estimate holds", max_ie_excess(r) <= ie_slack,
                   "max relative excess " + fmt(max_ie_excess(r))});
  }
  if (kind == SchemeKind::EE_UNSTAB) {
    out.push_back({tag + " unstable (max E_bar > 0)", r.max_energy() > 0.0,
                   "max E_bar " + fmt(r.max_energy())});
  }
  if (kind != SchemeKind::SIE_FSSA && !r.records.empty()) {
    out.push_back({tag + " volume conserved per step", r.max_step_defect() <= volume_tol,
                   "max defect " + fmt(r.max_step_defect())});
  }
  return out;
}

void summarize(const SimConfig& cfg, const RunResult& r) {
  int picard = 0, outer = 0;
  for (const auto& rec : r.records) {
    picard = std::max(picard, rec.picard_iters);
    outer = std::max(outer, rec.outer_iters);
  }
  std::cout << scheme_name(cfg.scheme) << "  dt " << display_time(cfg, cfg.dt) << "  steps "
            << r.records.size() << "  max E_bar " << fmt(r.max_energy()) << "  max step defect "
            << fmt(r.max_step_defect()) << "  final drift " << fmt(r.final_drift())
            << "  max picard " << picard << "  max outer " << outer;
  if (r.failed) {
    std::cout << "  stopped: " << r.failure;
  }
  std::cout << "\n";
}

RunResult run_with_output(const SimConfig& cfg, const std::string& csv) {
  const std::string vtk_dir = cfg.output.vtk_dir;
  const int every = std::max(1, cfg.output.vtk_every);
  if (!vtk_dir.empty()) {
    fs::create_directories(vtk_dir);
  }
  RunResult r = run(cfg, [&](const SimState& s, const DiagnosticsRecord& rec) {
    if (!vtk_dir.empty() && rec.step % every == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "step_%05d.vtk", rec.step);
      write_vtk(s.mesh, s.last, (fs::path(vtk_dir) / name).string());
    }
  });
  if (!csv.empty()) {
    write_ledger_csv(r.records, csv);
  }
  return r;
}

int cmd_run(const CommonOptions& o) {
  const SimConfig cfg = base_config(o);
  print_header(cfg);
  std::string csv = out_path(o, "ledger.csv");
  if (csv.empty()) {
    csv = cfg.output.csv_path;
  }
  const RunResult r = run_with_output(cfg, csv);
  summarize(cfg, r);
  return report(run_checks(cfg.scheme, r, scheme_name(cfg.scheme)));
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    v.push_back(std::stod(item));
  }
  return v;
}

int cmd_sweep(const CommonOptions& o, const std::string& dts_text, const std::string& schemes_text,
              std::size_t grid, int jobs) {
  SimConfig base = base_config(o);
  if (grid > 0) {
    base.problem.nx = base.problem.ny = grid;
  }
  print_header(base);
  std::vector<double> dts = dts_text.empty() ? std::vector<double>{} : parse_list(dts_text);
  if (dts.empty()) {
    dts = si_years(base) ? std::vector<double>{0.5, 10.0, 50.0}
                         : std::vector<double>{0.05, 0.5, 1.0, 2.0};
  }
  std::vector<SchemeKind> schemes;
  if (!o.scheme.empty()) {
    schemes.push_back(base.scheme);
  } else {
    std::stringstream ss(schemes_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      schemes.push_back(parse_scheme(item));
    }
  }

  std::vector<SimConfig> cfgs;
  for (SchemeKind k : schemes) {
    for (double dt : dts) {
      SimConfig c = base;
      c.scheme = k;
      c.dt = si_years(base) ? dt * seconds_per_year : dt;
      cfgs.push_back(c);
    }
  }
  std::vector<RunResult> results(cfgs.size());
  const auto work = [&](std::size_t i) {
    char name[96];
    std::snprintf(name, sizeof name, "sweep_%s_dt%g.csv", scheme_name(cfgs[i].scheme).c_str(),
                  display_time(cfgs[i], cfgs[i].dt));
    SimConfig c = cfgs[i];
    c.output.vtk_dir.clear();
    results[i] = run_with_output(c, out_path(o, name));
  };
  // Results land by index, so the report order does not depend on timing.
  for (std::size_t start = 0; start < cfgs.size(); start += static_cast<std::size_t>(jobs)) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < std::min(cfgs.size(), start + jobs); ++i) {
      batch.push_back(std::async(std::launch::async, work, i));
    }
    for (auto& f : batch) {
      f.get();
    }
  }

  std::vector<Check> checks;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    summarize(cfgs[i], results[i]);
    char tag[96];
    std::snprintf(tag, sizeof tag, "%s dt=%g", scheme_name(cfgs[i].scheme).c_str(),
                  display_time(cfgs[i], cfgs[i].dt));
    for (Check& c : run_checks(cfgs[i].scheme, results[i], tag)) {
      checks.push_back(std::move(c));
    }
  }
  return report(checks);
}

int cmd_convergence(const CommonOptions& o, std::string cache, int levels) {
  SimConfig base = base_config(o);
  if (base.problem.kind != CaseKind::tank) {
    std::cerr << "convergence: the refinement schedule is defined for the tank case\n";
    return 2;
  }
  print_header(base);
  ConvergenceSchedule schedule = tank_schedule();
  if (levels > 0 && static_cast<std::size_t>(levels) < schedule.levels.size()) {
    schedule.levels.resize(static_cast<std::size_t>(levels));
  }
  std::cout << "# study viscosity " << schedule.viscosity << "\n";
  if (cache.empty()) {
    cache = out_path(o, "tank_reference_160.snap");
  }
  const Snapshot reference = reference_snapshot(base, schedule, cache);
  const std::vector<SchemeKind> schemes = {SchemeKind::EE_UNSTAB_W, SchemeKind::EE_STAB,
                                           SchemeKind::EE_FSSA, SchemeKind::SIE_FSSA};
  const ConvergenceReport rep = convergence_study(base, schemes, schedule, reference);

  std::ofstream csv;
  if (!o.out.empty()) {
    csv.open(out_path(o, "convergence.csv"));
    csv.precision(17);
    csv << "scheme,dt,dx_perp,nx,ny,err_h,err_u_perp,err_u,failed\n";
  }
  std::vector<Check> checks;
  const auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  const SchemeConvergence* unstab_w = nullptr;
  const SchemeConvergence* stab = nullptr;
  for (const SchemeConvergence& sc : rep.schemes) {
    const std::string name = scheme_name(sc.scheme);
    std::cout << name << "\n";
    for (const LevelResult& l : sc.levels) {
      std::cout << "  dt " << l.level.dt << "  nx " << l.level.nx << "  err h " << fmt(l.errors.h)
                << "  err u_perp " << fmt(l.errors.u_perp) << "  err u " << fmt(l.errors.u)
                << (l.failed ? "  FAILED: " + l.failure : "") << "\n";
      if (csv.is_open()) {
        csv << name << ',' << l.level.dt << ',' << l.level.dx_perp << ',' << l.level.nx << ','
            << l.level.ny << ',' << l.errors.h << ',' << l.errors.u_perp << ',' << l.errors.u << ','
            << (l.failed ? 1 : 0) << '\n';
      }
    }
    std::cout << "  orders: h " << sc.order_h << "  u_perp " << sc.order_u_perp << "  u "
              << sc.order_u << "\n";
    checks.push_back({name + " h order in [0.7, 1.3]", in(sc.order_h, 0.7, 1.3), fmt(sc.order_h)});
    checks.push_back({name + " u_perp order in [0.7, 1.3]", in(sc.order_u_perp, 0.7, 1.3),
                      fmt(sc.order_u_perp)});
    if (sc.scheme == SchemeKind::EE_UNSTAB_W) {
      checks.push_back({name + " u order in [1.6, 2.4]", in(sc.order_u, 1.6, 2.4), fmt(sc.order_u)});
      unstab_w = &sc;
    } else {
      checks.push_back({name + " u order in [0.7, 1.3]", in(sc.order_u, 0.7, 1.3), fmt(sc.order_u)});
    }
    if (sc.scheme == SchemeKind::EE_STAB) {
      stab = &sc;
    }
  }
  if (unstab_w && stab) {
    bool ok = true;
    for (std::size_t i = 0; i < stab->levels.size(); ++i) {
      const auto& a = stab->levels[i];
      const auto& b = unstab_w->levels[i];
      ok = ok && !a.failed && !b.failed && a.errors.h <= b.errors.h;
    }
    checks.push_back({"EE_STAB h error <= EE_UNSTAB_W h error at every level", ok, ""});
  }
  return report(checks);
}

int cmd_volume(const CommonOptions& o) {
  const SimConfig base = base_config(o);
  print_header(base);
  std::vector<SchemeKind> schemes = {SchemeKind::EE_STAB, SchemeKind::EE_FSSA,
                                     SchemeKind::EE_UNSTAB, SchemeKind::IE, SchemeKind::SIE_FSSA};
  if (!o.scheme.empty()) {
    schemes = {base.scheme};
  }
  std::vector<Check> checks;
  for (SchemeKind k : schemes) {
    SimConfig c = base;
    c.scheme = k;
    const RunResult r = run_with_output(c, out_path(o, "volume_" + scheme_name(k) + ".csv"));
    summarize(c, r);
    const std::string name = scheme_name(k);
    if (k == SchemeKind::SIE_FSSA) {
      checks.push_back({name + " drifts (final drift > 1e-6)", r.final_drift() > 1e-6,
                        "final drift " + fmt(r.final_drift())});
    } else {
      checks.push_back({name + " conserves volume per step (<= 1e-10)",
                        !r.records.empty() && r.max_step_defect() <= volume_tol,
                        "max defect " + fmt(r.max_step_defect())});
    }
  }
  return report(checks);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-surface Stokes flow: time stepping, energy and volume diagnostics"};
  app.require_subcommand(1);

  CommonOptions run_o, sweep_o, conv_o, vol_o;
  CLI::App* run_cmd = app.add_subcommand("run", "run one simulation and check its properties");
  add_common(run_cmd, run_o);

  CLI::App* sweep_cmd = app.add_subcommand("sweep-dt", "run a scheme over a list of time steps");
  add_common(sweep_cmd, sweep_o);
  std::string dts, schemes = "EE_STAB,EE_UNSTAB";
  std::size_t grid = 0;
  int jobs = 1;
  sweep_cmd->add_option("--dts", dts, "comma-separated time steps (years for greenland-synthetic)");
  sweep_cmd->add_option("--schemes", schemes, "comma-separated schemes when --scheme is absent");
  sweep_cmd->add_option("--grid", grid, "Nx = Ny override (e.g. 40 or 120 for the tank)");
  sweep_cmd->add_option("--jobs", jobs, "runs in flight at once")->check(CLI::PositiveNumber);

  CLI::App* conv_cmd = app.add_subcommand("convergence", "refinement study on the tank");
  add_common(conv_cmd, conv_o);
  std::string cache;
  int levels = 0;
  conv_cmd->add_option("--reference-cache", cache, "file holding the reference solution");
  conv_cmd->add_option("--levels", levels, "use only the first N levels (N >= 3)");

  CLI::App* vol_cmd = app.add_subcommand("volume-check", "volume conservation audit");
  add_common(vol_cmd, vol_o);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(run_o);
    if (*sweep_cmd) return cmd_sweep(sweep_o, dts, schemes, grid, jobs);
    if (*conv_cmd) return cmd_convergence(conv_o, cache, levels);
    if (*vol_cmd) return cmd_volume(vol_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
