// dnls_lab: experiment front end for the DNLS pseudospectral lab.
//
//   dnls_lab [--config cfg.json] [--out dir] [--quiet] [--jobs n] <subcommand>
//
// Subcommands: simulate, gauge-check, gn-audit, threshold-scan, diagnose.
// Exit codes: 0 ok, 1 config error, 2 blowup guard, 3 non-finite state,
// 4 GN violation, 5 bound-chain violation, 6 gauge discrepancy above tolerance.

#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "dnls/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace dnls::cli;
  CLI::App app{"DNLS pseudospectral lab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out;
  RunOptions opts;
  app.add_option("--config", config_path, "JSON run configuration (defaults apply when omitted)");
  app.add_option("--out", out, "output directory, overrides outputs.dir");
  app.add_flag("--quiet", opts.quiet, "suppress progress output");
  app.add_option("--jobs", opts.jobs, "worker threads for gn-audit and threshold-scan")->check(CLI::PositiveNumber);

  using Command = std::function<int(const RunConfig&, const RunOptions&)>;
  const std::map<std::string, std::pair<Command, const char*>> commands = {
      {"simulate", {cmd_simulate, "integrate the configured equation, write conserved quantities"}},
      {"gauge-check", {cmd_gauge_check, "compare the gauged dnls1 flow with a direct dnls2 run"}},
      {"gn-audit", {cmd_gn_audit, "audit the periodic Gagliardo-Nirenberg bound on random fields"}},
      {"threshold-scan", {cmd_threshold_scan, "gauged runs at masses relative to the threshold"}},
      {"diagnose", {cmd_diagnose, "per-frame bound-chain diagnostics of a gauged trajectory"}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.second);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::config;
  }
  if (!out.empty()) opts.out_dir = out;

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? parse_config(json::object()) : load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_code::config;
  }

  for (const auto& [name, entry] : commands) {
    if (!app.got_subcommand(name)) continue;
    try {
      return entry.first(cfg, opts);
    } catch (const std::logic_error& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return exit_code::config;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return exit_code::config;
    }
  }
  return exit_code::config;
}
