#pragma once

// Experiment dispatch for the command-line tool.
//
// run() does all computation and returns the file contents; write_outputs()
// is the only writer and is called after everything succeeded, so failed
// runs leave no files behind.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "optolg/dynamics.hpp"
#include "optolg/errors.hpp"
#include "optolg/io/config.hpp"
#include "optolg/io/csv.hpp"
#include "optolg/io/svg.hpp"
#include "optolg/leggett_garg.hpp"
#include "optolg/optomech.hpp"
#include "optolg/qnd_feasibility.hpp"

namespace optolg::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitConvergence = 4;

struct RunOutput {
  int exit_code = kExitOk;
  std::string report;
  std::optional<std::string> csv;
  std::optional<std::string> svg;
  std::string error_line; ///< empty on success
};

/// `error kind=<kind> code=<n> line=<n> key=<key> message="<text>"`
inline std::string error_line(const char *kind, int code, const std::string &message, int line = 0,
                              const std::string &key = {}) {
  std::string msg;
  for (char c : message) {
    if (c == '"' || c == '\\')
      msg += '\\';
    msg += c == '\n' ? ' ' : c;
  }
  std::string out = std::string("error kind=") + kind + " code=" + std::to_string(code) +
                    " line=" + std::to_string(line);
  if (!key.empty())
    out += " key=" + key;
  out += " message=\"" + msg + "\"";
  return out;
}

namespace detail {

class Report {
public:
  void note(const std::string &s) { o_ << "# " << s << '\n'; }
  void value(const std::string &k, double v) { note(k + " = " + format_double(v)); }
  void value(const std::string &k, const std::string &v) { note(k + " = " + v); }
  void complex(const std::string &k, cplx z) {
    note(k + " = " + format_double(z.real()) + (z.imag() < 0 ? " - " : " + ") +
         format_double(std::abs(z.imag())) + "i");
  }
  void raw(const std::string &s) { o_ << s; }
  std::string str() const { return o_.str(); }

private:
  std::ostringstream o_;
};

inline void summarize_curve(Report &r, const LGCurve &c) {
  const auto s = c.summary();
  const double bound = c.points.empty() ? 1.0 : c.points.front().bound;
  r.value("points", static_cast<double>(c.points.size()));
  r.value("max_L", s.max_l);
  r.value("argmax_tau", s.argmax_tau);
  r.value("argmax_tau_scaled", s.argmax_tau_scaled);
  r.value("bound", bound);
  char b[32];
  std::snprintf(b, sizeof b, "%g", bound);
  if (s.violated())
    r.note(std::string("max L > ") + b + ": violation");
  else
    r.note(std::string("max L <= ") + b + ": no violation");
  for (const auto &[lo, hi] : s.violating_intervals)
    r.note("violating tau_scaled interval [" + format_double(lo) + ", " + format_double(hi) + "]");
}

inline void describe_model(Report &r, const Model &m) {
  r.complex("alpha", m.displacement.alpha);
  r.complex("beta", m.displacement.beta);
  r.value("abs_G", m.coupling());
  r.value("displacement_iterations", static_cast<double>(m.displacement.iterations));
  r.value("displacement_residual", m.displacement.residual);
}

inline std::vector<double> time_grid(const GridSpec &g, double scale) {
  auto grid = linear_grid(g.start, g.stop, g.count);
  if (g.units == GridUnits::scaled) {
    if (!(scale > 0.0))
      throw ConfigError("grid_units = scaled needs a nonzero coupling", 0, "grid_units");
    for (auto &t : grid)
      t *= 2.0 * std::numbers::pi / scale;
  }
  return grid;
}

inline std::vector<double> model_curve(const ModelParams &p, Mode which,
                                       std::span<const double> grid, bool thermal) {
  return model_sweep(make_model(p), which, grid, thermal).l_values();
}

} // namespace detail

/// Compute one experiment. Exceptions from the engine are mapped to exit
/// codes here; nothing is written to disk.
inline RunOutput run(const RunConfig &cfg) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  RunOutput out;
  detail::Report rep;
  rep.raw(echo_config(cfg));
  rep.value("run", std::string(to_string(cfg.experiment)));

  std::optional<LGCurve> curve;
  std::string title;
  std::string x_label = "tau |G| / 2pi";
  bool gate_failed = false;

  auto run_convergence = [&](const std::vector<double> &grid) {
    auto fn = [&](const ModelParams &q) {
      return detail::model_curve(q, cfg.observable, grid, cfg.thermal_initial_state);
    };
    const auto c = truncation_convergence(cfg.model, fn, cfg.convergence_tolerance,
                                          cfg.convergence_ladder_max);
    rep.value("convergence_max_deviation", c.max_deviation);
    rep.value("convergence_tolerance", c.tolerance);
    for (const auto &[level, dev] : c.ladder)
      rep.note("convergence ladder N=" + std::to_string(level) + " deviation " +
               format_double(dev));
    if (c.first_pass_level)
      rep.value("convergence_first_pass_level", static_cast<double>(*c.first_pass_level));
    rep.value("convergence", std::string(c.pass ? "PASS" : "FAIL"));
    return c.pass;
  };

  try {
    switch (cfg.experiment) {
    case Experiment::lg_sweep:
    case Experiment::lg_general:
    case Experiment::unbound:
    case Experiment::convergence: {
      const Model m = make_model(cfg.model);
      detail::describe_model(rep, m);
      const auto grid = detail::time_grid(*cfg.grid, m.coupling());
      const auto rho0 = initial_state(m.params, cfg.thermal_initial_state);
      const char *obs = cfg.observable == Mode::cavity ? "cavity" : "mechanical";
      if (cfg.experiment == Experiment::lg_general) {
        const double t2 = cfg.grid->units == GridUnits::scaled
                              ? cfg.t2 * 2.0 * std::numbers::pi / m.coupling()
                              : cfg.t2;
        const auto q = dichotomic_observable(m.params.dims(), cfg.observable);
        curve = sweep_general(m.liouvillian, q, rho0, grid, t2, m.coupling());
        rep.value("t2", t2);
        title = std::string("L(t1, t2) ") + obs;
      } else if (cfg.experiment == Experiment::unbound) {
        const auto &dims = m.params.dims();
        const int n = dims[cfg.observable == Mode::cavity ? 0 : 1];
        const auto x = embed(destroy(n) + create(n), dims, cfg.observable);
        const auto u = unbound_lg_study(m.liouvillian, x, rho0, grid, m.coupling());
        curve = u.curve;
        rep.value("initial_second_moment", u.initial_second_moment);
        rep.value("max_sampled_second_moment", u.max_second_moment);
        rep.value("max_sampled_second_moment_time", u.max_second_moment_time);
        rep.value("points_exceeding_initial_bound",
                  static_cast<double>(u.exceeds_initial_bound_at.size()));
        rep.value("points_exceeding_max_moment_bound",
                  static_cast<double>(u.exceeds_max_moment_bound_at.size()));
        title = std::string("unbound position, ") + obs;
      } else {
        curve = model_sweep(m, cfg.observable, grid, cfg.thermal_initial_state);
        title = std::string("L(tau) ") + obs;
      }
      detail::summarize_curve(rep, *curve);
      if (cfg.experiment == Experiment::convergence ||
          (cfg.convergence_gate && cfg.experiment == Experiment::lg_sweep)) {
        const bool pass = run_convergence(grid);
        gate_failed = cfg.convergence_gate && !pass;
      } else {
        rep.value("convergence", std::string("not checked"));
      }
      break;
    }
    case Experiment::classical_demo: {
      auto grid = detail::time_grid(*cfg.grid, cfg.classical_omega);
      const auto d = classical_harmonic_demo(cfg.classical_omega, cfg.classical_gamma,
                                             cfg.classical_c0, grid);
      curve = d.curve;
      detail::summarize_curve(rep, *curve);
      rep.value("refined_max_L", d.refined_max_l);
      rep.value("refined_argmax_tau", d.refined_argmax_tau);
      rep.value("exceeds_bound", std::string(d.exceeds_bound ? "yes" : "no"));
      title = "classical oscillator 2C(tau) - C(2tau)";
      x_label = "omega tau / 2pi";
      break;
    }
    case Experiment::steadystate: {
      const Model m = make_model(cfg.model);
      detail::describe_model(rep, m);
      const auto ss = steady_state_with_residual(m.liouvillian);
      const auto ops = mode_operators(m.params.dims());
      rep.value("steady_cavity_occupation", expect(ops.c.adjoint() * ops.c, ss.rho).real());
      rep.value("steady_mechanical_occupation", expect(ops.d.adjoint() * ops.d, ss.rho).real());
      rep.value("bath_occupation", m.params.n_bar);
      rep.value("steady_state_residual", ss.residual);
      rep.value("cooling_regime", std::string(m.params.in_cooling_regime() ? "yes" : "no"));
      break;
    }
    case Experiment::displacement: {
      const Model m = make_model(cfg.model);
      detail::describe_model(rep, m);
      const auto r = displacement_residuals(m.params, m.displacement.alpha, m.displacement.beta);
      rep.value("cavity_equation_residual", std::abs(r.cavity));
      rep.value("mechanical_equation_residual", std::abs(r.mechanical));
      rep.value("critical_drive", critical_drive(m.params));
      break;
    }
    case Experiment::feasibility: {
      qnd::ReadoutParams rp = cfg.readout;
      if (!cfg.readout_alpha_given) {
        const auto s = solve_displacements(cfg.model);
        rp.alpha = s.alpha;
      }
      const auto f = qnd::frame_shifts(rp);
      const auto d = qnd::dispersive_report(rp, cfg.thresholds);
      const auto c = qnd::compensation_drive(rp, cfg.thresholds);
      rep.complex("alpha", rp.alpha);
      rep.value("abs_G", rp.coupling());
      rep.value("delta_prime", f.delta_prime);
      rep.value("delta", f.delta_bias);
      rep.value("chi", d.chi);
      rep.value("delta_over_lambda", d.detuning_ratio);
      rep.value("dispersive_validity", std::string(d.detuning_ratio_pass ? "PASS" : "FAIL"));
      rep.value("backaction", d.backaction);
      rep.value("backaction_limit", d.backaction_limit);
      rep.value("backaction_check", std::string(d.backaction_pass ? "PASS" : "FAIL"));
      rep.value("cross_shift", d.cross_shift);
      rep.value("cross_shift_over_chi", d.cross_shift_ratio);
      rep.value("compensation_amplitude", c.amplitude);
      rep.value("compensation_phase", c.phase);
      rep.value("compensation_feasible", std::string(c.feasible ? "yes" : "no"));
      break;
    }
    }
  } catch (const ConfigError &e) {
    out.exit_code = kExitConfig;
    out.error_line = error_line("config", kExitConfig, e.what(), e.line(), e.key());
    return out;
  } catch (const CriticalDrivingError &e) {
    out.exit_code = kExitSolver;
    out.error_line = error_line("solver", kExitSolver, e.what());
    return out;
  } catch (const IntegratorError &e) {
    out.exit_code = kExitSolver;
    out.error_line = error_line("solver", kExitSolver, e.what());
    return out;
  } catch (const SteadyStateError &e) {
    out.exit_code = kExitSolver;
    out.error_line = error_line("solver", kExitSolver, e.what());
    return out;
  } catch (const std::exception &e) {
    out.exit_code = kExitInternal;
    out.error_line = error_line("internal", kExitInternal, e.what());
    return out;
  }

  if (curve) {
    if (cfg.csv_path)
      out.csv = to_csv(*curve);
    if (cfg.svg_path)
      out.svg = to_svg(*curve, title, x_label);
  }
  const double secs = std::chrono::duration<double>(clock::now() - t_start).count();
  rep.value("wall_clock_s", secs);
  out.report = rep.str();
  if (gate_failed) {
    out.exit_code = kExitConvergence;
    out.error_line = error_line("convergence", kExitConvergence,
                                "truncation convergence gate failed");
  }
  return out;
}

/// Write whatever run() produced. Returns false with a message on I/O failure.
inline bool write_outputs(const RunConfig &cfg, const RunOutput &out, std::string &error) {
  auto put = [&](const std::string &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
    f.close();
    if (!f) {
      error = "cannot write '" + path + "'";
      return false;
    }
    return true;
  };
  if (cfg.csv_path && out.csv && !put(*cfg.csv_path, *out.csv))
    return false;
  if (cfg.svg_path && out.svg && !put(*cfg.svg_path, *out.svg))
    return false;
  if (cfg.report_path && !put(*cfg.report_path, out.report))
    return false;
  return true;
}

} // namespace optolg::io
