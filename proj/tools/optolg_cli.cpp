// optolg: command-line front end.
//
//   optolg <subcommand> [--config file] [--csv out.csv] [--svg out.svg]
//          [--observable cavity|mechanical] [--rwa] [--nbar x] [--grid a:b:n]
//
// Exit codes: 0 ok, 1 internal error, 2 configuration error, 3 solver
// failure, 4 truncation-convergence gate failed.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "optolg/io/config.hpp"
#include "optolg/io/run.hpp"

namespace {

struct Flags {
  std::string config, csv, svg, observable, nbar, grid;
  bool rwa = false;
};

int fail(const std::string &line, int code) {
  std::cerr << line << '\n';
  return code;
}

} // namespace

int main(int argc, char **argv) {
  using namespace optolg::io;

  CLI::App app{"Leggett-Garg tests of a driven optomechanical system"};
  app.require_subcommand(1);
  Flags flags;
  for (const char *name : {"lg-sweep", "lg-general", "unbound", "classical-demo", "steadystate",
                           "displacement", "feasibility", "convergence"}) {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", flags.config, "flat key = value configuration file");
    sub->add_option("--csv", flags.csv, "write the curve as CSV");
    sub->add_option("--svg", flags.svg, "write an SVG plot of L");
    sub->add_option("--observable", flags.observable, "cavity or mechanical");
    sub->add_flag("--rwa", flags.rwa, "drop counter-rotating terms");
    sub->add_option("--nbar", flags.nbar, "thermal phonon occupation");
    sub->add_option("--grid", flags.grid, "start:stop:count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return fail(error_line("config", kExitConfig, e.what()), kExitConfig);
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    ConfigEntries entries;
    if (!flags.config.empty()) {
      std::ifstream in(flags.config, std::ios::binary);
      if (!in)
        throw ConfigError("cannot read config file '" + flags.config + "'");
      std::ostringstream text;
      text << in.rdbuf();
      entries = parse_entries(text.str());
    }
    apply_override(entries, "experiment", experiment);
    if (!flags.observable.empty())
      apply_override(entries, "observable", flags.observable);
    if (flags.rwa)
      apply_override(entries, "rwa_only", "1");
    if (!flags.nbar.empty())
      apply_override(entries, "n_bar", flags.nbar);
    if (!flags.grid.empty())
      apply_grid_flag(entries, flags.grid);
    if (!flags.csv.empty())
      apply_override(entries, "csv", flags.csv);
    if (!flags.svg.empty())
      apply_override(entries, "svg", flags.svg);
    cfg = resolve(entries);
  } catch (const ConfigError &e) {
    return fail(error_line("config", kExitConfig, e.what(), e.line(), e.key()), kExitConfig);
  }

  const RunOutput out = run(cfg);
  if (out.exit_code != kExitOk && out.exit_code != kExitConvergence)
    return fail(out.error_line, out.exit_code);

  std::string io_error;
  if (!write_outputs(cfg, out, io_error))
    return fail(error_line("io", kExitInternal, io_error), kExitInternal);
  std::cout << out.report;
  if (out.exit_code != kExitOk)
    return fail(out.error_line, out.exit_code);
  return kExitOk;
}
