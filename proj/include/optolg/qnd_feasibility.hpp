#pragma once

// Scalar checks for dispersive qubit readout of the displaced cavity.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace optolg::qnd {

struct ReadoutParams {
  double epsilon = 0.0;     ///< qubit splitting
  double omega_c = 0.0;     ///< lab-frame cavity frequency
  double omega_drive = 0.0; ///< cavity drive frequency
  double lambda = 0.0;      ///< qubit-cavity coupling
  std::complex<double> alpha{0.0, 0.0};
  double g = 0.0;
  double omega_m = 1.0;

  void validate() const {
    if (!(lambda > 0.0))
      throw std::invalid_argument("ReadoutParams: lambda must be > 0");
    if (!(epsilon > 0.0) || !(omega_c > 0.0) || !(omega_drive > 0.0) || !(omega_m > 0.0))
      throw std::invalid_argument("ReadoutParams: frequencies must be > 0");
  }

  /// |g alpha omega_m|, the effective cavity-mechanics coupling.
  double coupling() const { return std::abs(g * alpha * omega_m); }
};

/// Thresholds for the qualitative "much less than" conditions.
struct FeasibilityThresholds {
  double max_detuning_ratio = 10.0;   ///< delta / lambda must stay below this
  double backaction_fraction = 0.1;   ///< lambda^3/delta^2 < fraction * |g alpha omega_m|
  double compensation_cap = 0.5;      ///< lambda |alpha| above this is flagged
};

struct FrameShifts {
  double delta_prime; ///< epsilon - omega_d
  double delta_bias;  ///< epsilon - omega_c
};

inline FrameShifts frame_shifts(const ReadoutParams &p) {
  return {p.epsilon - p.omega_drive, p.epsilon - p.omega_c};
}

struct DispersiveReport {
  double delta_bias;
  double chi;             ///< lambda^2 / delta
  double detuning_ratio;  ///< delta / lambda
  bool detuning_ratio_pass;
  double backaction;      ///< lambda^3 / delta^2
  double backaction_limit;
  bool backaction_pass;
  double cross_shift;     ///< (lambda |g alpha| omega_m)^2 / delta^3
  double cross_shift_ratio; ///< cross_shift / chi
};

inline DispersiveReport dispersive_report(const ReadoutParams &p,
                                          const FeasibilityThresholds &th = {}) {
  p.validate();
  const double delta = frame_shifts(p).delta_bias;
  if (delta == 0.0)
    throw std::invalid_argument("dispersive_report: qubit resonant with the cavity (delta = 0)");
  DispersiveReport r{};
  r.delta_bias = delta;
  r.chi = p.lambda * p.lambda / delta;
  r.detuning_ratio = delta / p.lambda;
  r.detuning_ratio_pass = r.detuning_ratio < th.max_detuning_ratio;
  r.backaction = p.lambda * p.lambda * p.lambda / (delta * delta);
  r.backaction_limit = th.backaction_fraction * p.coupling();
  r.backaction_pass = std::abs(r.backaction) < r.backaction_limit;
  const double x = p.lambda * p.coupling();
  r.cross_shift = x * x / (delta * delta * delta);
  r.cross_shift_ratio = r.cross_shift / r.chi;
  return r;
}

struct CompensationDrive {
  double amplitude; ///< lambda |alpha|
  double phase;     ///< arg(alpha) + pi, wrapped to [0, 2 pi)
  bool feasible;
};

/// Qubit drive that cancels lambda (alpha sigma+ e^{-i w_d t} + h.c.).
inline CompensationDrive compensation_drive(const ReadoutParams &p,
                                            const FeasibilityThresholds &th = {}) {
  const double amp = p.lambda * std::abs(p.alpha);
  double phase = 0.0;
  if (amp > 0.0) {
    phase = std::fmod(std::arg(p.alpha) + std::numbers::pi, 2.0 * std::numbers::pi);
    if (phase < 0.0)
      phase += 2.0 * std::numbers::pi;
  }
  return {amp, phase, amp <= th.compensation_cap};
}

} // namespace optolg::qnd
