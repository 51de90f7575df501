#pragma once

// Time evolution, stationary states and two-time correlators of a
// time-independent Liouvillian.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "optolg/errors.hpp"
#include "optolg/expm.hpp"
#include "optolg/liouville.hpp"
#include "optolg/optomech.hpp"
#include "optolg/qops.hpp"

namespace optolg {

enum class Backend { expm, ode };

struct OdeTolerance {
  double relative = 1e-8;
  double absolute = 1e-10;
};

namespace detail {

inline void require_state_dims(const Superoperator &l, const HilbertDims &dims, const char *who) {
  if (!(l.dims() == dims))
    throw DimensionError(std::string(who) + ": generator dims " + l.dims().to_string() +
                         " vs state dims " + dims.to_string());
}

inline void require_time(double t, const char *who) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument(std::string(who) + ": time must be finite and >= 0");
}

/// Integrate d/dt v = L v from 0 to t with Dormand-Prince 5(4).
inline CVector integrate_ode(const CMatrix &l, const CVector &v0, double t, OdeTolerance tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<cplx>;
  State x(v0.data(), v0.data() + v0.size());
  if (t == 0.0)
    return v0;
  const auto n = static_cast<Eigen::Index>(x.size());
  auto rhs = [&](const State &in, State &out, double) {
    out.resize(in.size());
    Eigen::Map<CVector>(out.data(), n).noalias() = l * Eigen::Map<const CVector>(in.data(), n);
  };
  auto stepper =
      odeint::make_controlled(tol.absolute, tol.relative, odeint::runge_kutta_dopri5<State>());
  double time = 0.0;
  double dt = std::min(t, 1e-3);
  int consecutive_failures = 0;
  const double min_step = 1e-14 * std::max(1.0, t);
  while (time < t) {
    dt = std::min(dt, t - time);
    if (stepper.try_step(rhs, x, time, dt) == odeint::success) {
      consecutive_failures = 0;
      continue;
    }
    if (++consecutive_failures > 500 || dt < min_step)
      throw IntegratorError("adaptive integrator cannot meet tolerance (rtol " +
                                std::to_string(tol.relative) + ", atol " +
                                std::to_string(tol.absolute) + "); reached t = " +
                                std::to_string(time),
                            time);
  }
  const double reached = time;
  for (const auto &z : x)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw IntegratorError("adaptive integrator produced non-finite values (reached t = " +
                                std::to_string(reached) + ")",
                            reached);
  return Eigen::Map<const CVector>(x.data(), n);
}

} // namespace detail

/// exp(L t) as a dense superoperator.
inline Superoperator propagator(const Superoperator &l, double t) {
  detail::require_time(t, "propagator");
  return {l.dims(), expm(l.data() * t)};
}

/// Apply exp(L t) to an arbitrary operator (not necessarily a state).
inline OperatorMatrix evolve_operator(const Superoperator &l, const OperatorMatrix &x, double t,
                                      Backend backend = Backend::expm, OdeTolerance tol = {}) {
  detail::require_state_dims(l, x.dims(), "evolve_operator");
  detail::require_time(t, "evolve_operator");
  if (t == 0.0)
    return x;
  if (backend == Backend::expm)
    return unvec(x.dims(), expm(l.data() * t) * vec(x));
  return unvec(x.dims(), detail::integrate_ode(l.data(), vec(x), t, tol));
}

/// rho(t) = exp(L t) rho0, validated as a density matrix.
inline DensityMatrix propagate(const Superoperator &l, const DensityMatrix &rho0, double t,
                               Backend backend = Backend::expm, OdeTolerance tol = {}) {
  if (t == 0.0) {
    detail::require_state_dims(l, rho0.dims(), "propagate");
    return rho0;
  }
  return DensityMatrix(evolve_operator(l, rho0.op(), t, backend, tol));
}

/// One exponential of L on a fixed step, shared read-only across a grid.
class PropagatorCache {
public:
  PropagatorCache(Superoperator l, double step)
      : liouvillian_(std::move(l)), step_(step), step_propagator_(propagator(liouvillian_, step)) {
    if (!(step > 0.0))
      throw std::invalid_argument("PropagatorCache: step must be > 0");
  }

  const Superoperator &liouvillian() const noexcept { return liouvillian_; }
  double step() const noexcept { return step_; }
  const Superoperator &matrix_exponential_of_step() const noexcept { return step_propagator_; }

  /// exp(L step) v
  CVector advance(const CVector &v) const { return step_propagator_.data() * v; }
  /// r exp(L step), for propagating expectation functionals backwards.
  Eigen::RowVectorXcd advance_row(const Eigen::RowVectorXcd &r) const {
    return r * step_propagator_.data();
  }

private:
  Superoperator liouvillian_;
  double step_;
  Superoperator step_propagator_;
};

struct SteadyStateResult {
  DensityMatrix rho;
  double residual; ///< max |L vec(rho)|
};

/// Solve L vec(rho) = 0 with the first population equation replaced by Tr rho = 1.
inline SteadyStateResult steady_state_with_residual(const Superoperator &l) {
  const HilbertDims &dims = l.dims();
  const auto d = dims.total();
  const auto n = d * d;
  CMatrix a = l.data();
  a.row(0) = trace_row(dims);
  CVector rhs = CVector::Zero(n);
  rhs(0) = 1.0;

  const Eigen::PartialPivLU<CMatrix> lu(a);
  const double scale = std::max(1.0, l.data().cwiseAbs().maxCoeff());
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.minCoeff() / pivots.maxCoeff();
  const double rcond = std::min(lu.rcond(), pivot_ratio);
  if (!(rcond > 1e-13))
    throw SteadyStateError("steady_state: generator has a degenerate null space (reciprocal "
                           "condition " + std::to_string(rcond) +
                           " after the trace constraint)");
  const CVector v = lu.solve(rhs);
  OperatorMatrix rho = unvec(dims, v);
  rho = 0.5 * (rho + rho.adjoint());
  const double residual = (l.data() * vec(rho)).cwiseAbs().maxCoeff();
  if (residual > 1e-10 * scale)
    throw SteadyStateError("steady_state: residual " + std::to_string(residual) +
                           " exceeds tolerance");
  return {DensityMatrix(std::move(rho)), residual};
}

inline DensityMatrix steady_state(const Superoperator &l) {
  return steady_state_with_residual(l).rho;
}

/// X -> (Q X + X Q) / 2. For dichotomic Q this is P+ X P+ - P- X P-, the
/// state update of a projective measurement weighted by its outcome.
inline Superoperator symmetrized_insertion(const OperatorMatrix &q) {
  Superoperator s = left_mult(q) + right_mult(q);
  s *= 0.5;
  return s;
}

/// <Q(t1 + t2) Q(t1)>: evolve rho0 to t1, apply the symmetrized insertion
/// of Q, evolve by t2 and close with Tr[Q .]. Returns the real part.
inline double two_time_correlator(const Superoperator &l, const OperatorMatrix &q,
                                  const DensityMatrix &rho0, double t1, double t2,
                                  Backend backend = Backend::expm, OdeTolerance tol = {}) {
  detail::require_state_dims(l, q.dims(), "two_time_correlator");
  detail::require_state_dims(l, rho0.dims(), "two_time_correlator");
  detail::require_time(t1, "two_time_correlator");
  detail::require_time(t2, "two_time_correlator");
  const OperatorMatrix rho_t1 = evolve_operator(l, rho0.op(), t1, backend, tol);
  const OperatorMatrix inserted = 0.5 * (q * rho_t1 + rho_t1 * q);
  const OperatorMatrix later = evolve_operator(l, inserted, t2, backend, tol);
  return expect(q, later).real();
}

struct ConvergenceReport {
  int base_n_c = 0;
  int base_n_m = 0;
  double max_deviation = 0.0; ///< between the base truncation and one level higher
  bool pass = false;
  double tolerance = 1e-4;
  /// Smallest ladder level (applied to both modes) whose curve agrees with
  /// the next level within tolerance; empty when none did.
  std::optional<int> first_pass_level;
  std::vector<std::pair<int, double>> ladder; ///< (level, deviation to level+1)
};

/// Recompute an observable curve at (n_c + 1, n_m + 1) and compare. With
/// `ladder_max > base`, also climb a common truncation ladder and report
/// the first level that passes.
inline ConvergenceReport truncation_convergence(
    const ModelParams &p,
    const std::function<std::vector<double>(const ModelParams &)> &observable_curve,
    double tolerance = 1e-4, int ladder_max = 0) {
  auto deviation = [&](const ModelParams &lo, const ModelParams &hi) {
    const auto a = observable_curve(lo);
    const auto b = observable_curve(hi);
    if (a.size() != b.size())
      throw DimensionError("truncation_convergence: curves differ in length");
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      dev = std::max(dev, std::abs(a[i] - b[i]));
    return dev;
  };
  ConvergenceReport rep;
  rep.base_n_c = p.n_c;
  rep.base_n_m = p.n_m;
  rep.tolerance = tolerance;
  ModelParams up = p;
  up.n_c += 1;
  up.n_m += 1;
  rep.max_deviation = deviation(p, up);
  rep.pass = rep.max_deviation < tolerance;

  const int start = std::max(p.n_c, p.n_m);
  for (int level = start; level <= ladder_max; ++level) {
    ModelParams lo = p, hi = p;
    lo.n_c = lo.n_m = level;
    hi.n_c = hi.n_m = level + 1;
    const double dev =
        (level == p.n_c && level == p.n_m) ? rep.max_deviation : deviation(lo, hi);
    rep.ladder.emplace_back(level, dev);
    if (dev < tolerance) {
      rep.first_pass_level = level;
      break;
    }
  }
  if (rep.pass && !rep.first_pass_level && p.n_c == p.n_m)
    rep.first_pass_level = p.n_c;
  return rep;
}

} // namespace optolg
