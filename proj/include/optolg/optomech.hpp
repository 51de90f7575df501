#pragma once

// Driven optomechanical model linearized about its coherent displacements.
//
// All frequencies are in units of the mechanical frequency unless stated
// otherwise; callers that hold physical values should go through
// ModelParams::normalized().

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "optolg/errors.hpp"
#include "optolg/liouville.hpp"
#include "optolg/qops.hpp"

namespace optolg {

struct ModelParams {
  double delta = 1.0;           ///< cavity detuning from the drive
  double omega_m = 1.0;         ///< mechanical frequency
  double g = 1e-3;              ///< dimensionless single-photon coupling
  double omega_drive_amp = 0.0; ///< drive amplitude Omega
  double kappa = 0.05;          ///< cavity linewidth
  double gamma = 1e-4;          ///< mechanical linewidth
  double n_bar = 0.0;           ///< thermal phonon occupation of the bath
  int n_c = 4;
  int n_m = 4;
  bool rwa_only = false;
  bool include_nonlinear_term = true;
  /// (Gamma/2)[(beta* d - beta d^dag) rho + rho (beta d^dag - beta* d)]
  bool include_mech_linear_dissipation = false;

  void validate() const {
    auto fail = [](const std::string &m) { throw std::invalid_argument("ModelParams: " + m); };
    if (!(omega_m > 0.0))
      fail("omega_m must be > 0");
    if (!(kappa >= 0.0))
      fail("kappa must be >= 0");
    if (!(gamma >= 0.0))
      fail("gamma must be >= 0");
    if (!(n_bar >= 0.0))
      fail("n_bar must be >= 0");
    if (!std::isfinite(delta) || !std::isfinite(g) || !std::isfinite(omega_drive_amp))
      fail("delta, g and omega_drive_amp must be finite");
    if (n_c < 2 || n_m < 2)
      fail("truncations must be >= 2");
  }

  /// Resolved-sideband cooling: delta > 0 and a cavity narrower than omega_m.
  bool in_cooling_regime() const { return delta > 0.0 && kappa < omega_m; }

  /// Rescale every frequency so that omega_m becomes 1.
  ModelParams normalized() const {
    validate();
    ModelParams p = *this;
    p.delta /= omega_m;
    p.omega_drive_amp /= omega_m;
    p.kappa /= omega_m;
    p.gamma /= omega_m;
    p.omega_m = 1.0;
    return p;
  }

  HilbertDims dims() const { return HilbertDims{n_c, n_m}; }
};

struct DisplacementSolution {
  cplx alpha{0.0, 0.0};
  cplx beta{0.0, 0.0};
  cplx g_eff{0.0, 0.0}; ///< G = g omega_m alpha
  int iterations = 0;
  double residual = 0.0; ///< relative residual of the alpha equation
};

struct DisplacementResiduals {
  /// alpha Delta + 2 omega_m g alpha (beta + beta*) + Omega - i kappa alpha / 2
  cplx cavity;
  /// omega_m beta + omega_m g |alpha|^2
  cplx mechanical;
  /// cavity equation with a standalone -i kappa term instead of -i kappa alpha/2
  cplx cavity_printed_form;
};

inline DisplacementResiduals displacement_residuals(const ModelParams &p, cplx alpha, cplx beta) {
  const cplx shift = 2.0 * p.omega_m * p.g * alpha * (beta + std::conj(beta));
  const cplx base = alpha * p.delta + shift + p.omega_drive_amp;
  return {base - I_UNIT * p.kappa * alpha / 2.0,
          p.omega_m * beta + p.omega_m * p.g * std::norm(alpha),
          base - I_UNIT * p.kappa};
}

struct DisplacementOptions {
  double damping = 0.5;
  int max_iterations = 10000;
  double tolerance = 1e-13;
};

/// Intensity |alpha|^2 at the fold of the modulus equation
///   x [(Delta - 4 omega_m g^2 x)^2 + kappa^2/4] = Omega^2,
/// i.e. the end of the branch connected to x = 0. NaN when there is no fold.
inline double fold_intensity(const ModelParams &p) {
  const double b = 4.0 * p.omega_m * p.g * p.g;
  const double k = p.kappa / 2.0;
  const double disc = p.delta * p.delta - 3.0 * k * k;
  if (b <= 0.0 || p.delta <= 0.0 || disc < 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return (2.0 * p.delta - std::sqrt(disc)) / (3.0 * b);
}

/// Drive amplitude at which the physical displacement branch ends
/// (infinite when the branch never folds).
inline double critical_drive(const ModelParams &p) {
  const double x = fold_intensity(p);
  if (std::isnan(x))
    return std::numeric_limits<double>::infinity();
  const double b = 4.0 * p.omega_m * p.g * p.g;
  const double detune = p.delta - b * x;
  return std::sqrt(x * (detune * detune + p.kappa * p.kappa / 4.0));
}

/// Damped fixed point alpha <- -Omega / (Delta - 4 omega_m g^2 |alpha|^2 - i kappa/2),
/// started from the g = 0 solution, with beta = -g |alpha|^2.
inline DisplacementSolution solve_displacements(const ModelParams &p,
                                                const DisplacementOptions &opt = {}) {
  p.validate();
  DisplacementSolution out;
  if (p.omega_drive_amp == 0.0)
    return out;

  const double b = 4.0 * p.omega_m * p.g * p.g;
  const cplx lossy = cplx(0.0, -p.kappa / 2.0);
  const double omega_c = critical_drive(p);
  auto critical_error = [&](const std::string &why) {
    return CriticalDrivingError("solve_displacements: " + why +
                                    "; critical drive estimate Omega_c = " +
                                    std::to_string(omega_c) + " (order omega_m/g = " +
                                    std::to_string(p.g != 0.0 ? p.omega_m / std::abs(p.g)
                                                              : std::numeric_limits<double>::infinity()) +
                                    ")",
                                omega_c);
  };
  if (std::abs(p.omega_drive_amp) > omega_c)
    throw critical_error("drive |Omega| = " + std::to_string(std::abs(p.omega_drive_amp)) +
                         " exceeds the fold of the displacement branch");

  auto map = [&](cplx a) { return -p.omega_drive_amp / (p.delta - b * std::norm(a) + lossy); };

  cplx alpha = -p.omega_drive_amp / (p.delta + lossy);
  int it = 0;
  bool converged = false;
  while (it < opt.max_iterations) {
    ++it;
    const cplx next = (1.0 - opt.damping) * alpha + opt.damping * map(alpha);
    const double step = std::abs(next - alpha);
    alpha = next;
    if (step <= opt.tolerance * std::max(1.0, std::abs(alpha))) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw critical_error("no convergence after " + std::to_string(opt.max_iterations) +
                         " iterations");
  const double x_fold = fold_intensity(p);
  if (!std::isnan(x_fold) && std::norm(alpha) > x_fold * (1.0 + 1e-9))
    throw critical_error("fixed point left the branch connected to the undriven solution");

  // One undamped polish step so the returned alpha satisfies the map itself.
  alpha = map(alpha);
  out.alpha = alpha;
  out.beta = cplx(-p.g * std::norm(alpha), 0.0);
  out.g_eff = p.g * p.omega_m * alpha;
  out.iterations = it;
  const auto res = displacement_residuals(p, out.alpha, out.beta);
  out.residual = std::abs(res.cavity) / std::max(1.0, std::abs(p.omega_drive_amp));
  return out;
}

/// Cavity and mechanical lowering operators on the two-mode space.
struct ModeOperators {
  OperatorMatrix c;
  OperatorMatrix d;
};

inline ModeOperators mode_operators(const HilbertDims &dims) {
  if (dims.size() != 2)
    throw DimensionError("mode_operators: expected [n_c, n_m], got " + dims.to_string());
  return {embed(destroy(dims[0]), dims, Mode::cavity),
          embed(destroy(dims[1]), dims, Mode::mechanical)};
}

/// Linearized Hamiltonian in the displaced frame:
///   (Delta + 2 g omega_m beta) c^dag c + omega_m d^dag d
///   + g omega_m (d + d^dag)(alpha* c + alpha c^dag) + g omega_m (d + d^dag) c^dag c
inline OperatorMatrix build_hamiltonian(const ModelParams &p, const DisplacementSolution &s) {
  p.validate();
  const HilbertDims dims = p.dims();
  const auto [c, d] = mode_operators(dims);
  const OperatorMatrix cd = c.adjoint();
  const OperatorMatrix dd = d.adjoint();
  const OperatorMatrix nc = cd * c;
  const double coupling = p.g * p.omega_m;

  OperatorMatrix h = (p.delta + 2.0 * coupling * s.beta.real()) * nc;
  h += p.omega_m * (dd * d);
  if (p.rwa_only) {
    h += coupling * (std::conj(s.alpha) * (dd * c) + s.alpha * (d * cd));
  } else {
    h += coupling * ((d + dd) * (std::conj(s.alpha) * c + s.alpha * cd));
  }
  if (p.include_nonlinear_term)
    h += coupling * ((d + dd) * nc);
  return h;
}

/// [(c, kappa), (d, Gamma (N+1)), (d^dag, Gamma N)]; the heating channel is
/// omitted when N = 0.
inline std::vector<CollapseOperator> build_collapse_ops(const ModelParams &p,
                                                        const DisplacementSolution &) {
  p.validate();
  const auto [c, d] = mode_operators(p.dims());
  std::vector<CollapseOperator> out;
  out.push_back({c, p.kappa});
  out.push_back({d, p.gamma * (p.n_bar + 1.0)});
  if (p.n_bar > 0.0)
    out.push_back({d.adjoint(), p.gamma * p.n_bar});
  return out;
}

/// (Gamma/2)[A rho - rho A] with A = beta* d - beta d^dag.
inline Superoperator mechanical_linear_dissipation(const ModelParams &p,
                                                   const DisplacementSolution &s) {
  const auto [c, d] = mode_operators(p.dims());
  const OperatorMatrix a = std::conj(s.beta) * d - s.beta * d.adjoint();
  Superoperator out = left_mult(a) - right_mult(a);
  out *= p.gamma / 2.0;
  return out;
}

/// Full generator of the displaced-frame master equation.
inline Superoperator build_liouvillian(const ModelParams &p, const DisplacementSolution &s) {
  Superoperator l = liouvillian(build_hamiltonian(p, s), build_collapse_ops(p, s));
  if (p.include_mech_linear_dissipation)
    l += mechanical_linear_dissipation(p, s);
  return l;
}

/// Everything needed to simulate one parameter point.
struct Model {
  ModelParams params;
  DisplacementSolution displacement;
  Superoperator liouvillian;

  double coupling() const { return std::abs(displacement.g_eff); }
};

inline Model make_model(const ModelParams &p) {
  auto s = solve_displacements(p);
  auto l = build_liouvillian(p, s);
  return {p, s, std::move(l)};
}

/// Drive amplitude giving |G| = target on the physical branch, for fixed
/// Delta, kappa, g (omega_m units). Returns NaN when unreachable.
inline double drive_for_coupling(const ModelParams &p, double target_coupling) {
  const double x = std::pow(target_coupling / (p.g * p.omega_m), 2);
  const double x_fold = fold_intensity(p);
  if (!std::isnan(x_fold) && x > x_fold)
    return std::numeric_limits<double>::quiet_NaN();
  const double b = 4.0 * p.omega_m * p.g * p.g;
  const double detune = p.delta - b * x;
  return std::sqrt(x * (detune * detune + p.kappa * p.kappa / 4.0));
}

/// Model parameters with |G| = target and the displaced cavity resonant
/// with the mechanics, i.e. Delta + 2 g omega_m beta = omega_m.
inline ModelParams resonant_params(double target_coupling, double kappa, double gamma,
                                   double n_bar, double g, int truncation) {
  ModelParams p;
  p.omega_m = 1.0;
  p.g = g;
  p.kappa = kappa;
  p.gamma = gamma;
  p.n_bar = n_bar;
  p.n_c = truncation;
  p.n_m = truncation;
  p.delta = 1.0 + 2.0 * target_coupling * target_coupling;
  p.omega_drive_amp = drive_for_coupling(p, target_coupling);
  if (std::isnan(p.omega_drive_amp))
    throw CriticalDrivingError("resonant_params: |G| = " + std::to_string(target_coupling) +
                                   " is beyond the displacement fold",
                               critical_drive(p));
  return p;
}

enum class Regime { weak, strong };

/// Illustrative parameter sets in omega_m = 1 units: kappa = 0.05,
/// Gamma = 1e-4, N = 0, g = 1e-3, with |G| = 0.05 (weak) or 0.3 (strong).
inline ModelParams default_figure2_params(Regime regime) {
  const double coupling = regime == Regime::weak ? 0.05 : 0.3;
  const int truncation = regime == Regime::weak ? 4 : 5;
  return resonant_params(coupling, 0.05, 1e-4, 0.0, 1e-3, truncation);
}

} // namespace optolg
