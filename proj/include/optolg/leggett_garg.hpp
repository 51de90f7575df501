#pragma once

// Leggett-Garg functionals
//   L(t1, t2) = <Q(t1)Q(0)> + <Q(t1+t2)Q(t1)> - <Q(t1+t2)Q(0)>
// evaluated with the symmetrized measurement insertion, swept over delay
// grids, plus the unbound-observable and classical-oscillator studies.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "optolg/dynamics.hpp"
#include "optolg/liouville.hpp"
#include "optolg/optomech.hpp"
#include "optolg/qops.hpp"

namespace optolg {

/// L values above bound + this are counted as violations.
inline constexpr double kViolationThreshold = 1e-9;

struct LGPoint {
  double tau = 0.0;        ///< first delay t1 (= t2 for the equal-time form)
  double tau_scaled = 0.0; ///< tau |G| / 2 pi
  double c_t1_0 = 0.0;     ///< <Q(t1) Q(0)>
  double c_t12_t1 = 0.0;   ///< <Q(t1+t2) Q(t1)>
  double c_t12_0 = 0.0;    ///< <Q(t1+t2) Q(0)>
  double l_value = 0.0;
  double bound = 1.0;
};

inline LGPoint make_point(double tau, double time_scale, double c10, double c21, double c20,
                          double bound) {
  return {tau, tau * time_scale / (2.0 * std::numbers::pi), c10, c21, c20, c10 + c21 - c20, bound};
}

enum class ObservableTag { cavity, mechanical, custom };

inline const char *to_string(ObservableTag t) {
  switch (t) {
  case ObservableTag::cavity:
    return "cavity";
  case ObservableTag::mechanical:
    return "mechanical";
  case ObservableTag::custom:
    return "custom";
  }
  return "custom";
}

struct ViolationSummary {
  double max_l = -std::numeric_limits<double>::infinity();
  double argmax_tau = 0.0;
  double argmax_tau_scaled = 0.0;
  double max_excess = -std::numeric_limits<double>::infinity(); ///< max(L - bound)
  /// Closed tau_scaled ranges of consecutive grid points with L > bound.
  std::vector<std::pair<double, double>> violating_intervals;
  bool violated() const { return !violating_intervals.empty(); }
};

struct LGCurve {
  std::vector<LGPoint> points;
  ObservableTag observable_tag = ObservableTag::custom;
  std::optional<ModelParams> params;
  std::optional<DisplacementSolution> displacement;

  std::vector<double> l_values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto &p : points)
      out.push_back(p.l_value);
    return out;
  }

  ViolationSummary summary() const {
    ViolationSummary s;
    bool open = false;
    for (const auto &p : points) {
      if (p.l_value > s.max_l) {
        s.max_l = p.l_value;
        s.argmax_tau = p.tau;
        s.argmax_tau_scaled = p.tau_scaled;
      }
      s.max_excess = std::max(s.max_excess, p.l_value - p.bound);
      const bool v = p.l_value > p.bound + kViolationThreshold;
      if (v && !open) {
        s.violating_intervals.emplace_back(p.tau_scaled, p.tau_scaled);
        open = true;
      } else if (v) {
        s.violating_intervals.back().second = p.tau_scaled;
      } else {
        open = false;
      }
    }
    return s;
  }
};

namespace detail {

inline void require_increasing(std::span<const double> grid) {
  if (grid.empty())
    throw std::invalid_argument("tau grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
      throw std::invalid_argument("tau grid entries must be finite and >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("tau grid must be strictly increasing");
  }
}

/// Step of a uniform grid, or nothing.
inline std::optional<double> uniform_step(std::span<const double> grid) {
  if (grid.size() < 2)
    return std::nullopt;
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double expected = grid.front() + h * static_cast<double>(i);
    if (std::abs(grid[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      return std::nullopt;
  }
  return h;
}

} // namespace detail

/// Three-term functional with independent delays t1 and t2.
inline LGPoint lg_general(const Superoperator &l, const OperatorMatrix &q,
                          const DensityMatrix &rho0, double t1, double t2, double time_scale = 0.0,
                          double bound = 1.0) {
  const double c10 = two_time_correlator(l, q, rho0, 0.0, t1);
  const double c21 = two_time_correlator(l, q, rho0, t1, t2);
  const double c20 = two_time_correlator(l, q, rho0, 0.0, t1 + t2);
  return make_point(t1, time_scale, c10, c21, c20, bound);
}

/// Equal delays t1 = t2 = tau. For a stationary rho0 this is
/// 2<Q(tau)Q(0)> - <Q(2tau)Q(0)>.
inline LGPoint lg_equal_time(const Superoperator &l, const OperatorMatrix &q,
                             const DensityMatrix &rho0, double tau, double time_scale = 0.0,
                             double bound = 1.0) {
  return lg_general(l, q, rho0, tau, tau, time_scale, bound);
}

/// Equal-time functional over a strictly increasing tau grid. Uniform grids
/// reuse one cached step propagator; others fall back to per-point
/// exponentials.
inline LGCurve sweep(const Superoperator &l, const OperatorMatrix &q, const DensityMatrix &rho0,
                     std::span<const double> tau_grid, double time_scale = 0.0,
                     double bound = 1.0) {
  detail::require_increasing(tau_grid);
  detail::require_state_dims(l, rho0.dims(), "sweep");
  detail::require_state_dims(l, q.dims(), "sweep");
  LGCurve curve;
  curve.points.reserve(tau_grid.size());

  const auto h = detail::uniform_step(tau_grid);
  if (!h) {
    for (double tau : tau_grid)
      curve.points.push_back(lg_equal_time(l, q, rho0, tau, time_scale, bound));
    return curve;
  }

  const PropagatorCache step(l, *h);
  const CMatrix insertion = symmetrized_insertion(q).data();
  const Eigen::RowVectorXcd q_row = expectation_row(q);
  const CVector v0 = vec(rho0.op());
  const CVector inserted0 = insertion * v0;

  const double t0 = tau_grid.front();
  CVector state = v0;                // rho(tau)
  Eigen::RowVectorXcd row = q_row;  // Tr[Q e^{L tau} .]
  Eigen::RowVectorXcd row2 = q_row; // Tr[Q e^{2 L tau} .]
  if (t0 > 0.0) {
    const CMatrix start = propagator(l, t0).data();
    state = start * v0;
    row = q_row * start;
    row2 = row * start;
  }

  for (std::size_t j = 0; j < tau_grid.size(); ++j) {
    if (j > 0) {
      state = step.advance(state);
      row = step.advance_row(row);
      row2 = step.advance_row(step.advance_row(row2));
    }
    const double c10 = (row * inserted0).value().real();
    const double c21 = (row * (insertion * state)).value().real();
    const double c20 = (row2 * inserted0).value().real();
    curve.points.push_back(make_point(tau_grid[j], time_scale, c10, c21, c20, bound));
  }
  return curve;
}

/// General functional over a t1 grid at fixed t2.
inline LGCurve sweep_general(const Superoperator &l, const OperatorMatrix &q,
                             const DensityMatrix &rho0, std::span<const double> t1_grid,
                             double t2, double time_scale = 0.0, double bound = 1.0) {
  detail::require_increasing(t1_grid);
  detail::require_time(t2, "sweep_general");
  LGCurve curve;
  const auto h = detail::uniform_step(t1_grid);
  if (!h) {
    for (double t1 : t1_grid)
      curve.points.push_back(lg_general(l, q, rho0, t1, t2, time_scale, bound));
    return curve;
  }
  const PropagatorCache step(l, *h);
  const CMatrix insertion = symmetrized_insertion(q).data();
  const Eigen::RowVectorXcd q_row = expectation_row(q);
  const CVector inserted0 = insertion * vec(rho0.op());
  const Eigen::RowVectorXcd row_t2 = q_row * propagator(l, t2).data();

  const double t0 = t1_grid.front();
  CVector state = vec(rho0.op());
  Eigen::RowVectorXcd row = q_row;
  Eigen::RowVectorXcd row_sum = row_t2;
  if (t0 > 0.0) {
    const CMatrix start = propagator(l, t0).data();
    state = start * state;
    row = q_row * start;
    row_sum = row_t2 * start;
  }
  for (std::size_t j = 0; j < t1_grid.size(); ++j) {
    if (j > 0) {
      state = step.advance(state);
      row = step.advance_row(row);
      row_sum = step.advance_row(row_sum);
    }
    const double c10 = (row * inserted0).value().real();
    const double c21 = (row_t2 * (insertion * state)).value().real();
    const double c20 = (row_sum * inserted0).value().real();
    curve.points.push_back(make_point(t1_grid[j], time_scale, c10, c21, c20, bound));
  }
  return curve;
}

/// Uniform grid of `count` points on [start, stop].
inline std::vector<double> linear_grid(double start, double stop, int count) {
  if (count < 2 || !(stop > start) || !(start >= 0.0))
    throw std::invalid_argument("linear_grid: need count >= 2 and stop > start >= 0");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double h = (stop - start) / (count - 1);
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] = start + h * i;
  g.back() = stop;
  return g;
}

/// Locate the maximum of the equal-time functional on [lo, hi] by Brent's method.
inline LGPoint refine_peak(const Superoperator &l, const OperatorMatrix &q,
                           const DensityMatrix &rho0, double lo, double hi,
                           double time_scale = 0.0, double bound = 1.0) {
  auto neg = [&](double tau) { return -lg_equal_time(l, q, rho0, tau, time_scale, bound).l_value; };
  const auto [tau, value] = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
  (void)value;
  return lg_equal_time(l, q, rho0, tau, time_scale, bound);
}

/// Populations-only generator: every row and column belonging to a Fock
/// coherence |i><j|, i != j, is zeroed, leaving the classical rate equation.
inline Superoperator dephased_generator(const Superoperator &l) {
  const auto d = l.hilbert_dim();
  CMatrix out = CMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      out(i + i * d, j + j * d) = l.data()(i + i * d, j + j * d);
  return {l.dims(), std::move(out)};
}

/// |1_c><1_c| tensor (|0><0| or a thermal mechanical state at n_bar).
inline DensityMatrix initial_state(const ModelParams &p, bool thermal_mechanics = false) {
  const OperatorMatrix cav = fock_projector(p.n_c, 1);
  const OperatorMatrix mech =
      thermal_mechanics ? thermal_operator(p.n_m, p.n_bar) : fock_projector(p.n_m, 0);
  return DensityMatrix(tensor({cav, mech}));
}

/// Equal-time sweep of the model's dichotomic cavity or mechanical observable.
inline LGCurve model_sweep(const Model &m, Mode which, std::span<const double> tau_grid,
                           bool thermal_mechanics = false) {
  const OperatorMatrix q = dichotomic_observable(m.params.dims(), which);
  LGCurve c = sweep(m.liouvillian, q, initial_state(m.params, thermal_mechanics), tau_grid,
                    m.coupling());
  c.observable_tag = which == Mode::cavity ? ObservableTag::cavity : ObservableTag::mechanical;
  c.params = m.params;
  c.displacement = m.displacement;
  return c;
}

struct UnboundReport {
  LGCurve curve;                  ///< bound column holds <Q(0)^2>
  double initial_second_moment;   ///< <Q(0)^2>
  double max_second_moment;       ///< max over sampled t of <Q(t)^2>
  double max_second_moment_time;
  std::vector<double> exceeds_initial_bound_at;   ///< taus with L > <Q(0)^2>
  std::vector<double> exceeds_max_moment_bound_at; ///< taus with L > max_t <Q(t)^2>
};

/// LG combination for an unbound Hermitian observable against the two
/// candidate bounds max_t <Q(t)^2> and <Q(0)^2>. Times sampled for the
/// maximum are 0, every tau and every 2 tau of the grid.
inline UnboundReport unbound_lg_study(const Superoperator &l, const OperatorMatrix &q,
                                      const DensityMatrix &rho0, std::span<const double> tau_grid,
                                      double time_scale = 0.0) {
  if (q.hermiticity_error() > 1e-12)
    throw std::invalid_argument("unbound_lg_study: observable must be Hermitian");
  const OperatorMatrix q2 = q * q;
  UnboundReport rep;
  rep.initial_second_moment = expect(q2, rho0).real();
  rep.curve = sweep(l, q, rho0, tau_grid, time_scale, rep.initial_second_moment);
  rep.curve.observable_tag = ObservableTag::custom;

  rep.max_second_moment = rep.initial_second_moment;
  rep.max_second_moment_time = 0.0;
  auto consider = [&](double t) {
    const double m2 = expect(q2, evolve_operator(l, rho0.op(), t)).real();
    if (m2 > rep.max_second_moment) {
      rep.max_second_moment = m2;
      rep.max_second_moment_time = t;
    }
  };
  if (const auto h = detail::uniform_step(tau_grid)) {
    const PropagatorCache step(l, *h);
    const Eigen::RowVectorXcd q2_row = expectation_row(q2);
    CVector s1 = vec(rho0.op());
    CVector s2 = s1;
    if (tau_grid.front() > 0.0) {
      const CMatrix start = propagator(l, tau_grid.front()).data();
      s1 = start * s1;
      s2 = start * s1;
    }
    for (std::size_t j = 0; j < tau_grid.size(); ++j) {
      if (j > 0) {
        s1 = step.advance(s1);
        s2 = step.advance(step.advance(s2));
      }
      for (auto [t, s] : {std::pair{tau_grid[j], &s1}, std::pair{2.0 * tau_grid[j], &s2}}) {
        const double m2 = (q2_row * *s).value().real();
        if (m2 > rep.max_second_moment) {
          rep.max_second_moment = m2;
          rep.max_second_moment_time = t;
        }
      }
    }
  } else {
    for (double t : tau_grid) {
      consider(t);
      consider(2.0 * t);
    }
  }
  for (const auto &p : rep.curve.points) {
    if (p.l_value > rep.initial_second_moment + kViolationThreshold)
      rep.exceeds_initial_bound_at.push_back(p.tau);
    if (p.l_value > rep.max_second_moment + kViolationThreshold)
      rep.exceeds_max_moment_bound_at.push_back(p.tau);
  }
  return rep;
}

struct ClassicalDemoReport {
  LGCurve curve;        ///< bound column holds C(0) = c0
  double grid_max_l;
  double grid_argmax_tau;
  double refined_max_l;      ///< at a stationary point of L'(tau) near the grid maximum
  double refined_argmax_tau;
  bool exceeds_bound;        ///< max L > C(0)
};

/// Stationary classical autocorrelation C(tau) = c0 exp(-gamma tau) cos(omega tau)
/// and its equal-time combination 2 C(tau) - C(2 tau) against the bound C(0).
inline ClassicalDemoReport classical_harmonic_demo(double omega, double gamma_c, double c0,
                                                   std::span<const double> tau_grid) {
  if (!(omega > 0.0))
    throw std::invalid_argument("classical_harmonic_demo: omega must be > 0");
  if (!(gamma_c >= 0.0))
    throw std::invalid_argument("classical_harmonic_demo: gamma must be >= 0");
  detail::require_increasing(tau_grid);

  auto corr = [&](double t) { return c0 * std::exp(-gamma_c * t) * std::cos(omega * t); };
  auto corr_prime = [&](double t) {
    return -c0 * std::exp(-gamma_c * t) * (gamma_c * std::cos(omega * t) + omega * std::sin(omega * t));
  };
  auto l_of = [&](double t) { return 2.0 * corr(t) - corr(2.0 * t); };
  auto l_prime = [&](double t) { return 2.0 * corr_prime(t) - 2.0 * corr_prime(2.0 * t); };

  ClassicalDemoReport rep;
  for (double t : tau_grid)
    rep.curve.points.push_back(make_point(t, omega, corr(t), corr(t), corr(2.0 * t), c0));
  rep.curve.observable_tag = ObservableTag::custom;

  const auto s = rep.curve.summary();
  rep.grid_max_l = s.max_l;
  rep.grid_argmax_tau = s.argmax_tau;
  rep.refined_max_l = s.max_l;
  rep.refined_argmax_tau = s.argmax_tau;

  const auto it = std::find_if(tau_grid.begin(), tau_grid.end(),
                               [&](double t) { return t == s.argmax_tau; });
  const auto j = static_cast<std::size_t>(it - tau_grid.begin());
  if (j > 0 && j + 1 < tau_grid.size()) {
    const double lo = tau_grid[j - 1], hi = tau_grid[j + 1];
    if (l_prime(lo) > 0.0 && l_prime(hi) < 0.0) {
      boost::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          l_prime, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
      const double t = 0.5 * (a + b);
      if (l_of(t) >= rep.refined_max_l) {
        rep.refined_argmax_tau = t;
        rep.refined_max_l = l_of(t);
      }
    }
  }
  rep.exceeds_bound = rep.refined_max_l > c0 + kViolationThreshold * std::abs(c0);
  return rep;
}

} // namespace optolg
