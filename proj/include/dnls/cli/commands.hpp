#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dnls/cli/config.hpp"
#include "dnls/cli/output.hpp"
#include "dnls/diagnostics.hpp"
#include "dnls/dynamics.hpp"
#include "dnls/functionals.hpp"
#include "dnls/gauge.hpp"
#include "dnls/gn_inequality.hpp"
#include "dnls/initial_data.hpp"

namespace dnls::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int blowup = 2;
inline constexpr int non_finite = 3;
inline constexpr int gn_violation = 4;
inline constexpr int bound_chain = 5;
inline constexpr int gauge_tolerance = 6;
}  // namespace exit_code

inline const char* exit_reason(int code) {
  switch (code) {
    case exit_code::ok: return "ok";
    case exit_code::config: return "config_error";
    case exit_code::blowup: return "blowup_guard";
    case exit_code::non_finite: return "non_finite";
    case exit_code::gn_violation: return "gn_violation";
    case exit_code::bound_chain: return "bound_chain_violation";
    case exit_code::gauge_tolerance: return "gauge_tolerance_exceeded";
  }
  return "unknown";
}

struct RunOptions {
  std::optional<std::string> out_dir;
  bool quiet = false;
  int jobs = 1;
};

namespace detail {

inline int status_code(Termination t) {
  switch (t) {
    case Termination::completed: return exit_code::ok;
    case Termination::blowup_guard: return exit_code::blowup;
    case Termination::non_finite: return exit_code::non_finite;
  }
  return exit_code::non_finite;
}

inline double rel_drift(double q, double q0) {
  const double d = std::abs(q - q0);
  return q0 != 0.0 ? d / std::abs(q0) : d;
}

inline std::filesystem::path out_dir(const RunConfig& c, const RunOptions& o) {
  return o.out_dir ? std::filesystem::path(*o.out_dir) : std::filesystem::path(c.outputs.dir);
}

inline void note(const RunOptions& o, const std::string& line) {
  if (!o.quiet) std::cout << line << '\n';
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline json summary_head(const char* command, const RunConfig& c) {
  json s;
  s["command"] = command;
  const json cfg = to_json(c);
  s["config"] = cfg;
  s["input_hash"] = git_blob_hash(cfg.dump());
  return s;
}

inline void finish(json& summary, int code, const RunConfig& c, const RunOptions& o) {
  summary["exit_code"] = code;
  summary["exit_reason"] = exit_reason(code);
  if (c.outputs.wants("json")) write_file(out_dir(c, o) / "summary.json", summary.dump(2) + "\n");
}

inline json sim_json(const SimResult& r) {
  json j;
  j["status"] = to_string(r.status);
  j["stop_time"] = r.stop_time;
  j["steps"] = r.steps;
  j["dt_effective"] = r.dt_effective;
  j["h1dot_initial"] = r.h1dot_initial;
  j["h1dot_max"] = r.h1dot_max;
  j["guard_threshold"] = r.guard_threshold;
  json events = json::array();
  if (r.status == Termination::blowup_guard) {
    events.push_back({{"t", r.stop_time}, {"h1dot", r.h1dot_max}, {"threshold", r.guard_threshold}});
  }
  j["guard_events"] = events;
  j["warnings"] = r.warnings;
  j["message"] = r.message;
  return j;
}

inline CsvTable conserved_table(const Trajectory& traj) {
  CsvTable t({"t", "M", "H", "E", "P", "mu", "Ecal"});
  for (const auto& fr : traj.frames) {
    const auto r = conserved_report(fr.field, fr.t);
    t.add({r.t, r.M, r.H, r.E, r.P, r.mu, r.Ecal});
  }
  return t;
}

inline CsvTable frames_table(const Trajectory& traj) {
  CsvTable t({"t", "j", "x", "re", "im"});
  for (const auto& fr : traj.frames) {
    const auto& g = fr.field.grid();
    for (std::size_t j = 0; j < fr.field.size(); ++j) {
      t.add({fr.t, static_cast<long long>(j), g.node(j), fr.field[j].real(), fr.field[j].imag()});
    }
  }
  return t;
}

inline CsvTable diagnostics_table(const std::vector<CaseFrame>& frames) {
  CsvTable t({"t", "l4", "l6", "h1dot", "f", "gamma", "eta", "lower_bound_f", "holder_upper", "alpha", "case_tag"});
  for (const auto& cf : frames) {
    const auto& s = cf.sample;
    t.add({s.t, s.l4, s.l6, s.h1dot, s.f, s.gamma, s.eta, opt_cell(s.lower_bound_f), s.holder_upper,
           opt_cell(s.alpha), std::string(to_string(s.case_tag))});
  }
  return t;
}

struct DriftMax {
  double M = 0, H = 0, E = 0, P = 0, Ecal = 0;
};

inline DriftMax drift_max(const Trajectory& traj) {
  DriftMax d;
  if (traj.frames.empty()) return d;
  const auto r0 = conserved_report(traj.frames.front().field, 0.0);
  for (const auto& fr : traj.frames) {
    const auto r = conserved_report(fr.field, fr.t);
    d.M = std::max(d.M, rel_drift(r.M, r0.M));
    d.H = std::max(d.H, rel_drift(r.H, r0.H));
    d.E = std::max(d.E, rel_drift(r.E, r0.E));
    d.P = std::max(d.P, rel_drift(r.P, r0.P));
    d.Ecal = std::max(d.Ecal, rel_drift(r.Ecal, r0.Ecal));
  }
  return d;
}

inline json drift_json(const DriftMax& d) {
  return {{"M", d.M}, {"H", d.H}, {"E", d.E}, {"P", d.P}, {"Ecal", d.Ecal}};
}

inline void write_plot(const RunConfig& c, const RunOptions& o, const std::string& script) {
  if (c.outputs.wants("plot")) write_file(out_dir(c, o) / "plot.gp", script);
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& c, const RunOptions& o = {}) {
  const auto grid = make_grid(c.grid.L, c.grid.N);
  const Field u0 = build(c.effective_data(), grid);
  const SimResult r = simulate(u0, c.sim);
  const auto dir = detail::out_dir(c, o);
  if (c.outputs.wants("csv")) write_file(dir / "conserved.csv", detail::conserved_table(r.trajectory).str());
  if (c.outputs.wants("frames")) write_file(dir / "frames.csv", detail::frames_table(r.trajectory).str());
  detail::write_plot(c, o,
                     "set datafile separator ','\n"
                     "set key autotitle columnhead\n"
                     "set xlabel 't'\n"
                     "set ylabel 'relative drift'\n"
                     "set logscale y\n"
                     "stats 'conserved.csv' using 2 every ::0::0 nooutput name 'M0'\n"
                     "stats 'conserved.csv' using 3 every ::0::0 nooutput name 'H0'\n"
                     "stats 'conserved.csv' using 4 every ::0::0 nooutput name 'E0'\n"
                     "plot 'conserved.csv' using 1:(abs($2-M0_max)/abs(M0_max)) with lines title 'M', \\\n"
                     "     '' using 1:(abs($3-H0_max)/abs(H0_max)) with lines title 'H', \\\n"
                     "     '' using 1:(abs($4-E0_max)/abs(E0_max)) with lines title 'E'\n");
  const int code = detail::status_code(r.status);
  json s = detail::summary_head("simulate", c);
  s["simulation"] = detail::sim_json(r);
  s["frames"] = r.trajectory.frames.size();
  s["max_drift"] = detail::drift_json(detail::drift_max(r.trajectory));
  detail::finish(s, code, c, o);
  for (const auto& w : r.warnings) detail::note(o, "warning: " + w);
  detail::note(o, std::string("simulate: ") + to_string(r.status) + ", " + std::to_string(r.steps) + " steps");
  return code;
}

inline int cmd_gauge_check(const RunConfig& c, const RunOptions& o = {}) {
  const double beta = c.gauge_check.beta;
  const auto grid = make_grid(c.grid.L, c.grid.N);
  const Field u0 = build(c.effective_data(), grid);
  SimConfig c1 = c.sim;
  c1.equation = Equation::dnls1;
  const SimResult r1 = simulate(u0, c1);
  SimConfig c2 = c.sim;
  c2.equation = Equation::dnls2;
  c2.beta = beta;
  const SimResult r2 = simulate(gauge_profile(u0, beta), c2);

  json s = detail::summary_head("gauge-check", c);
  s["dnls1"] = detail::sim_json(r1);
  s["dnls2"] = detail::sim_json(r2);
  int code = std::max(detail::status_code(r1.status), detail::status_code(r2.status));
  if (code != exit_code::ok) {
    detail::finish(s, code, c, o);
    detail::note(o, "gauge-check: simulation failed");
    return code;
  }

  const Trajectory gauged = gauge_trajectory(r1.trajectory, beta);
  std::vector<double> resid;
  if (gauged.frames.size() >= 3) resid = pde_residual(gauged, Equation::dnls2, beta, mu(u0));
  CsvTable t({"t", "discrepancy", "residual"});
  double max_disc = 0.0;
  double max_res = 0.0;
  for (std::size_t i = 0; i < gauged.frames.size(); ++i) {
    const double d = l2_distance(gauged.frames[i].field, r2.trajectory.frames[i].field);
    max_disc = std::max(max_disc, d);
    Cell res = std::monostate{};
    if (i >= 1 && i + 1 < gauged.frames.size() && !resid.empty()) {
      res = resid[i - 1];
      max_res = std::max(max_res, resid[i - 1]);
    }
    t.add({gauged.frames[i].t, d, res});
  }
  const auto dir = detail::out_dir(c, o);
  if (c.outputs.wants("csv")) write_file(dir / "gauge_check.csv", t.str());
  detail::write_plot(c, o,
                     "set datafile separator ','\n"
                     "set key autotitle columnhead\n"
                     "set xlabel 't'\n"
                     "set logscale y\n"
                     "plot 'gauge_check.csv' using 1:2 with lines, '' using 1:3 with lines\n");
  code = max_disc < c.gauge_check.tolerance ? exit_code::ok : exit_code::gauge_tolerance;
  s["beta"] = beta;
  s["tolerance"] = c.gauge_check.tolerance;
  s["max_discrepancy"] = max_disc;
  s["max_residual"] = max_res;
  s["frame_spacing"] = gauged.frames.size() > 1 ? gauged.frames[1].t - gauged.frames[0].t : 0.0;
  detail::finish(s, code, c, o);
  detail::note(o, "gauge-check: max discrepancy " + fmt17(max_disc));
  return code;
}

struct GnAuditRow {
  long long field_id = 0;
  GnAuditRecord gn1;
  ExtensionAudit gn0;
  bool chain_ok = true;
  bool base_ok = true;
};

/// Field `id` of the audit corpus on grid (L, N); id 0 is the zero field.
inline Field gn_audit_field(const GnAuditOptions& a, long long id, GridPtr grid) {
  if (id == 0) return Field::zeros(grid);
  std::seed_seq seq{static_cast<std::uint64_t>(a.seed), static_cast<std::uint64_t>(id)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DataSpec d;
  d.seed = rng();
  d.amplitude = std::pow(10.0, -1.0 + 2.0 * unit(rng));
  const double L = grid->period();
  if (id % 4 == 3) {
    d.kind = DataKind::bump;
    d.width = L * (0.05 + 0.25 * unit(rng));
    d.center = L * unit(rng);
    d.mode = static_cast<int>(std::floor(unit(rng) * (a.max_mode + 1)));
  } else {
    d.kind = DataKind::multimode;
    d.max_mode = 1 + static_cast<int>(std::floor(unit(rng) * a.max_mode));
    d.decay = unit(rng);
  }
  return build(d, std::move(grid));
}

inline std::vector<GnAuditRow> gn_audit_rows(const RunConfig& c, int jobs) {
  const auto& a = c.gn_audit;
  const double constant = cgn() * a.debug_constant_scale;
  std::vector<GridPtr> grids;
  for (double L : a.L) grids.push_back(make_grid(L, c.grid.N));
  const std::size_t per_field = a.L.size() * a.delta.size();
  const std::size_t nfields = static_cast<std::size_t>(a.fields) + 1;
  std::vector<GnAuditRow> rows(nfields * per_field);
  detail::parallel_for(nfields, jobs, [&](std::size_t id) {
    std::size_t k = id * per_field;
    for (const auto& g : grids) {
      const Field f = gn_audit_field(a, static_cast<long long>(id), g);
      const double l4 = lp_norm(f, 4);
      const auto shifted = base_shift(f);
      const bool base_ok =
          std::abs(shifted.shifted[0]) <= std::pow(g->period(), -0.25) * l4 * (1.0 + 1e-9);
      for (double delta : a.delta) {
        GnAuditRow& r = rows[k++];
        r.field_id = static_cast<long long>(id);
        r.gn1 = check_gn1(f, delta, constant);
        r.gn0 = check_gn0_on_extension(f, delta, constant);
        r.chain_ok = r.gn0.record.rhs <= r.gn1.rhs * (1.0 + kGnRelTolerance);
        r.base_ok = base_ok;
      }
    }
  });
  return rows;
}

inline int cmd_gn_audit(const RunConfig& c, const RunOptions& o = {}) {
  const auto rows = gn_audit_rows(c, o.jobs);
  CsvTable t({"field_id", "L", "delta", "lhs", "rhs", "slack", "satisfied", "flap_l2grad", "flap_l4", "flap_l6"});
  long long gn1_bad = 0, gn0_bad = 0, chain_bad = 0, base_bad = 0;
  double min_rel_slack = INFINITY;
  for (const auto& r : rows) {
    const auto& p = r.gn0.profile;
    t.add({r.field_id, r.gn1.L, r.gn1.delta, r.gn1.lhs, r.gn1.rhs, r.gn1.slack,
           static_cast<long long>(r.gn1.satisfied ? 1 : 0), p.flap_l2grad, p.flap_l4, p.flap_l6});
    gn1_bad += !r.gn1.satisfied;
    gn0_bad += !r.gn0.record.satisfied;
    chain_bad += !r.chain_ok;
    base_bad += !r.base_ok;
    if (r.gn1.rhs > 0.0) min_rel_slack = std::min(min_rel_slack, r.gn1.slack / r.gn1.rhs);
  }
  const auto dir = detail::out_dir(c, o);
  if (c.outputs.wants("csv")) write_file(dir / "gn_audit.csv", t.str());
  detail::write_plot(c, o,
                     "set datafile separator ','\n"
                     "set xlabel 'field_id'\n"
                     "set ylabel 'slack / rhs'\n"
                     "plot 'gn_audit.csv' every ::1 using 1:($6/($5 > 0 ? $5 : 1)) with points pt 7 ps 0.3 "
                     "title 'GN1 relative slack'\n");
  const bool bad = gn1_bad || gn0_bad || chain_bad || base_bad;
  const int code = bad ? exit_code::gn_violation : exit_code::ok;
  json s = detail::summary_head("gn-audit", c);
  s["rows"] = rows.size();
  s["gn1_violations"] = gn1_bad;
  s["gn0_extension_violations"] = gn0_bad;
  s["chain_violations"] = chain_bad;
  s["base_shift_violations"] = base_bad;
  s["min_relative_slack"] = std::isfinite(min_rel_slack) ? json(min_rel_slack) : json(nullptr);
  s["constant"] = cgn() * c.gn_audit.debug_constant_scale;
  detail::finish(s, code, c, o);
  detail::note(o, "gn-audit: " + std::to_string(rows.size()) + " rows, " + std::to_string(gn1_bad) +
                     " GN1 violations");
  return code;
}

struct ScanRun {
  double fraction = 0.0;
  double mass = 0.0;
  double threshold = 0.0;
  bool below_threshold = true;
  SimResult sim;
  std::vector<CaseFrame> frames;
  detail::DriftMax drift;
  long long case1 = 0, case2 = 0, degenerate = 0, violations = 0;
  double min_case_slack = INFINITY;
  double max_m3_defect = -INFINITY;
};

/// Gauged (beta = 3/4) run at mass fraction * mass_threshold(L, delta).
inline ScanRun scan_run(const RunConfig& c, double fraction) {
  ScanRun run;
  const auto grid = make_grid(c.grid.L, c.grid.N);
  run.fraction = fraction;
  run.threshold = mass_threshold(c.grid.L, c.delta);
  run.mass = fraction * run.threshold;
  run.below_threshold = run.mass < run.threshold;
  DataSpec d = c.effective_data();
  d.target_mass = run.mass;
  const Field v0 = gauge_profile(build(d, grid), 0.75);
  SimConfig sc = c.sim;
  sc.equation = Equation::dnls2;
  sc.beta = 0.75;
  run.sim = simulate(v0, sc);
  run.drift = detail::drift_max(run.sim.trajectory);
  run.frames = case_report(run.sim.trajectory, c.delta, conserved_report(v0, 0.0));
  for (const auto& cf : run.frames) {
    switch (cf.sample.case_tag) {
      case CaseTag::case1: ++run.case1; break;
      case CaseTag::case2: ++run.case2; break;
      case CaseTag::degenerate: ++run.degenerate; break;
    }
    run.violations += cf.violation;
    run.min_case_slack = std::min(run.min_case_slack, cf.case_slack);
    run.max_m3_defect = std::max(run.max_m3_defect, cf.m3_defect);
  }
  return run;
}

inline CsvTable scan_table(const std::vector<ScanRun>& runs) {
  CsvTable t({"index", "mass_fraction", "mass", "threshold", "below_threshold", "status", "stop_time",
              "h1dot_initial", "h1dot_max", "h1dot_ratio", "drift_M", "drift_P", "drift_Ecal", "frames",
              "case1_frames", "case2_frames", "degenerate_frames", "min_case_slack", "max_m3_defect",
              "bound_chain_violations"});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    t.add({static_cast<long long>(i), r.fraction, r.mass, r.threshold,
           static_cast<long long>(r.below_threshold ? 1 : 0), std::string(to_string(r.sim.status)),
           r.sim.stop_time, r.sim.h1dot_initial, r.sim.h1dot_max,
           r.sim.h1dot_initial > 0 ? r.sim.h1dot_max / r.sim.h1dot_initial : 0.0, r.drift.M, r.drift.P,
           r.drift.Ecal, static_cast<long long>(r.frames.size()), r.case1, r.case2, r.degenerate,
           r.min_case_slack, r.max_m3_defect, r.violations});
  }
  return t;
}

inline std::vector<ScanRun> scan_runs(const RunConfig& c, int jobs) {
  auto fractions = c.threshold_scan.mass_fractions;
  std::sort(fractions.begin(), fractions.end());
  std::vector<ScanRun> runs(fractions.size());
  detail::parallel_for(fractions.size(), jobs, [&](std::size_t i) { runs[i] = scan_run(c, fractions[i]); });
  return runs;
}

inline int cmd_threshold_scan(const RunConfig& c, const RunOptions& o = {}) {
  const auto runs = scan_runs(c, o.jobs);
  const auto dir = detail::out_dir(c, o);
  if (c.outputs.wants("csv")) {
    write_file(dir / "scan.csv", scan_table(runs).str());
    for (std::size_t i = 0; i < runs.size(); ++i) {
      write_file(dir / ("diagnostics_" + std::to_string(i) + ".csv"), detail::diagnostics_table(runs[i].frames).str());
    }
  }
  detail::write_plot(c, o,
                     "set datafile separator ','\n"
                     "set key autotitle columnhead\n"
                     "set xlabel 'mass / threshold'\n"
                     "set ylabel 'max ||v_x|| / initial'\n"
                     "plot 'scan.csv' using 2:10 with linespoints\n");
  long long violations = 0;
  bool non_finite = false, guard = false;
  json rows = json::array();
  for (const auto& r : runs) {
    if (r.below_threshold) {
      violations += r.violations;
      guard = guard || r.sim.status == Termination::blowup_guard;
    }
    non_finite = non_finite || r.sim.status == Termination::non_finite;
    rows.push_back({{"mass_fraction", r.fraction}, {"simulation", detail::sim_json(r.sim)}});
  }
  int code = exit_code::ok;
  if (violations) code = exit_code::bound_chain;
  else if (non_finite) code = exit_code::non_finite;
  else if (guard) code = exit_code::blowup;
  json s = detail::summary_head("threshold-scan", c);
  s["threshold"] = mass_threshold(c.grid.L, c.delta);
  s["runs"] = rows;
  s["bound_chain_violations"] = violations;
  detail::finish(s, code, c, o);
  detail::note(o, "threshold-scan: " + std::to_string(runs.size()) + " runs, " + std::to_string(violations) +
                     " bound-chain violations");
  return code;
}

inline int cmd_diagnose(const RunConfig& c, const RunOptions& o = {}) {
  const auto grid = make_grid(c.grid.L, c.grid.N);
  const Field u0 = build(c.effective_data(), grid);
  SimConfig sc = c.sim;
  sc.equation = Equation::dnls1;
  const SimResult r = simulate(u0, sc);
  const Trajectory v = gauge_trajectory(r.trajectory, 0.75);
  const auto frames = case_report(v, c.delta, conserved_report(v.frames.front().field, 0.0));
  long long violations = 0;
  for (const auto& cf : frames) violations += cf.violation;
  const auto dir = detail::out_dir(c, o);
  if (c.outputs.wants("csv")) {
    write_file(dir / "diagnostics.csv", detail::diagnostics_table(frames).str());
    write_file(dir / "conserved.csv", detail::conserved_table(v).str());
  }
  detail::write_plot(c, o,
                     "set datafile separator ','\n"
                     "set key autotitle columnhead\n"
                     "set xlabel 't'\n"
                     "plot 'diagnostics.csv' using 1:5 with lines, '' using 1:8 with lines, '' using 1:9 with lines\n");
  int code = detail::status_code(r.status);
  if (violations) code = exit_code::bound_chain;
  json s = detail::summary_head("diagnose", c);
  s["simulation"] = detail::sim_json(r);
  s["threshold"] = mass_threshold(c.grid.L, c.delta);
  s["mass"] = mass(u0);
  s["max_drift"] = detail::drift_json(detail::drift_max(v));
  s["bound_chain_violations"] = violations;
  detail::finish(s, code, c, o);
  detail::note(o, "diagnose: " + std::to_string(frames.size()) + " frames, " + std::to_string(violations) +
                     " bound-chain violations");
  return code;
}

}  // namespace dnls::cli
