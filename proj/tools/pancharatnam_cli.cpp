// Command-line front end: scenario sweeps, bundled figure datasets, the
// formula-audit report, and a quick self test.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 requested
// quantity undefined at a single parameter point (sweeps tokenize instead).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pancharatnam/datasets.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitUndefined = 4;

struct SweepOptions {
  std::string config_path;
  std::string scenario;
  std::vector<std::string> set_pairs;
  std::string sweep_spec;
  std::string out_path;
  std::uint64_t seed = 0;
  double tail = 1e-12;
};

int run_sweep_command(const SweepOptions& opt, bool seed_given, bool tail_given) {
  std::map<std::string, std::string> kv;
  if (!opt.config_path.empty()) kv = pancharatnam::parse_flat_config(opt.config_path);
  if (!opt.scenario.empty()) kv["scenario"] = opt.scenario;
  for (const auto& pair : opt.set_pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0)
      throw pancharatnam::ConfigError("--set expects key=value, got '" + pair + "'");
    kv[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  if (!opt.sweep_spec.empty()) kv["sweep"] = opt.sweep_spec;
  if (seed_given) kv["seed"] = std::to_string(opt.seed);
  if (tail_given) kv["tail"] = pancharatnam::format_value(opt.tail);

  std::string out_path = opt.out_path;
  if (const auto it = kv.find("out"); it != kv.end()) {
    if (out_path.empty()) out_path = it->second;
    kv.erase(it);
  }
  if (out_path.empty()) throw pancharatnam::ConfigError("no output path (--out or out=...)");

  const pancharatnam::RunConfig config = pancharatnam::resolve_config(kv);
  const auto outcome = pancharatnam::run_sweep(config, out_path);
  std::cout << "wrote " << out_path << " (" << outcome.rows << " rows";
  if (outcome.undefined_cells > 0)
    std::cout << ", " << outcome.undefined_cells << " undefined cells";
  std::cout << ")\n";
  return 0;
}

int run_figures_command(const std::string& which, const std::string& outdir, double tail,
                        std::uint64_t seed) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw pancharatnam::IoError("cannot create output directory: " + outdir);

  if (which == "fig1" || which == "all") {
    const std::string path = outdir + "/fig1.csv";
    const auto outcome = pancharatnam::emit_fig1(path, tail, seed);
    std::cout << "wrote " << path << " (" << outcome.rows << " rows)\n";
  }
  if (which == "fig2" || which == "all") {
    const std::string path = outdir + "/fig2.csv";
    const auto outcome = pancharatnam::emit_fig2(path, tail, seed);
    std::cout << "wrote " << path << " (" << outcome.rows << " rows)\n";
  }
  const std::string report = outdir + "/audit_report.txt";
  pancharatnam::emit_audit_report(report, tail, seed);
  std::cout << "wrote " << report << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pancharatnam phase deficit toolkit"};
  app.require_subcommand(1);

  SweepOptions sweep_opt;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "evaluate a scenario at a point or along one swept parameter, write CSV");
  sweep_cmd->add_option("--config", sweep_opt.config_path, "flat key=value config file");
  sweep_cmd->add_option("--scenario", sweep_opt.scenario, "micromacro | cat | kondo");
  sweep_cmd->add_option("--set", sweep_opt.set_pairs, "scenario parameter override, key=value");
  sweep_cmd->add_option("--sweep", sweep_opt.sweep_spec, "swept parameter, key=start:stop:count");
  sweep_cmd->add_option("--out", sweep_opt.out_path, "output CSV path");
  sweep_cmd->add_option("--seed", sweep_opt.seed, "seed recorded in output headers");
  sweep_cmd->add_option("--tail", sweep_opt.tail, "Fock truncation tail bound");

  std::string fig_which = "all";
  std::string fig_outdir = ".";
  std::uint64_t fig_seed = 0;
  double fig_tail = 1e-12;
  auto* figures_cmd =
      app.add_subcommand("figures", "emit the bundled figure datasets and the audit report");
  figures_cmd->add_option("--which", fig_which, "fig1 | fig2 | all")
      ->check(CLI::IsMember({"fig1", "fig2", "all"}));
  figures_cmd->add_option("--out", fig_outdir, "output directory");
  figures_cmd->add_option("--seed", fig_seed, "seed recorded in output headers");
  figures_cmd->add_option("--tail", fig_tail, "Fock truncation tail bound");

  std::string audit_out = "audit_report.txt";
  std::uint64_t audit_seed = 0;
  double audit_tail = 1e-12;
  auto* audit_cmd =
      app.add_subcommand("audit", "grade every published closed form against the oracle");
  audit_cmd->add_option("--out", audit_out, "report path");
  audit_cmd->add_option("--seed", audit_seed, "seed recorded in output headers");
  audit_cmd->add_option("--tail", audit_tail, "Fock truncation tail bound");

  std::uint64_t selftest_seed = 20260816;
  auto* selftest_cmd = app.add_subcommand("selftest", "run the built-in quick checks");
  selftest_cmd->add_option("--seed", selftest_seed, "seed for the random batteries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sweep_cmd->parsed())
      return run_sweep_command(sweep_opt, sweep_cmd->count("--seed") > 0,
                               sweep_cmd->count("--tail") > 0);
    if (figures_cmd->parsed())
      return run_figures_command(fig_which, fig_outdir, fig_tail, fig_seed);
    if (audit_cmd->parsed()) {
      pancharatnam::emit_audit_report(audit_out, audit_tail, audit_seed);
      std::cout << "wrote " << audit_out << "\n";
      return 0;
    }
    if (selftest_cmd->parsed()) {
      std::string log;
      const bool ok = pancharatnam::run_selftest(selftest_seed, log);
      std::cout << log;
      std::cout << (ok ? "selftest passed\n" : "selftest FAILED\n");
      return ok ? 0 : 1;
    }
  } catch (const pancharatnam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pancharatnam::UndefinedValueError& e) {
    std::cerr << "undefined: " << e.what() << "\n";
    return kExitUndefined;
  } catch (const pancharatnam::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
