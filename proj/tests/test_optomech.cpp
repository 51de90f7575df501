#include <gtest/gtest.h>

#include <random>

#include "optolg/dynamics.hpp"
#include "optolg/optomech.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace optolg;
using optolg::testing::cubic_oracle_alpha;
using optolg::testing::max_abs;

namespace {

ModelParams base_params() {
  ModelParams p;
  p.delta = 1.0;
  p.omega_m = 1.0;
  p.omega_drive_amp = 0.1;
  p.kappa = 0.05;
  p.g = 0.01;
  p.n_c = 3;
  p.n_m = 3;
  return p;
}

} // namespace

TEST(Displacement, DecoupledLimitIsExact) {
  ModelParams p = base_params();
  p.g = 0.0;
  const auto s = solve_displacements(p);
  const cplx expected = -p.omega_drive_amp / cplx(p.delta, -p.kappa / 2.0);
  EXPECT_LT(std::abs(s.alpha - expected), 1e-14);
  EXPECT_EQ(s.beta, cplx(0.0, 0.0));
}

TEST(Displacement, NoDriveNoDisplacement) {
  ModelParams p = base_params();
  p.omega_drive_amp = 0.0;
  const auto s = solve_displacements(p);
  EXPECT_EQ(s.alpha, cplx(0.0, 0.0));
  EXPECT_EQ(s.beta, cplx(0.0, 0.0));
  EXPECT_EQ(s.g_eff, cplx(0.0, 0.0));
}

TEST(Displacement, MatchesCubicOracleAtReferencePoint) {
  const ModelParams p = base_params();
  const auto s = solve_displacements(p);
  EXPECT_LT(std::abs(s.alpha - cubic_oracle_alpha(p)), 1e-12);
  // First-order agreement with the small-g formula.
  const cplx small_g = -p.omega_drive_amp / cplx(p.delta, -p.kappa / 2.0);
  EXPECT_LT(std::abs(s.alpha - small_g), 1e-5);
}

TEST(Displacement, MatchesCubicOracleOnRandomDraws) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    ModelParams p;
    p.omega_m = 0.5 + 1.5 * u(rng);
    p.delta = 0.3 + 2.0 * u(rng);
    p.kappa = 0.6 * u(rng);
    p.g = std::pow(10.0, -3.0 + 2.0 * u(rng));
    const double omega_c = critical_drive(p);
    p.omega_drive_amp = (0.05 + 0.85 * u(rng)) * (std::isfinite(omega_c) ? omega_c : 10.0);
    const auto s = solve_displacements(p);
    const cplx ref = cubic_oracle_alpha(p);
    EXPECT_LT(std::abs(s.alpha - ref), 1e-10 * std::max(1.0, std::abs(ref))) << i;
  }
}

TEST(Displacement, ResidualsAndBetaRelation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    ModelParams p = base_params();
    p.kappa = 0.3 * u(rng);
    p.g = 0.001 + 0.02 * u(rng);
    p.omega_drive_amp = 0.8 * u(rng) * critical_drive(p);
    const auto s = solve_displacements(p);
    const auto r = displacement_residuals(p, s.alpha, s.beta);
    const double scale = std::max(1.0, std::abs(p.omega_drive_amp));
    EXPECT_LT(std::abs(r.cavity) / scale, 1e-12);
    EXPECT_LT(std::abs(r.mechanical) / scale, 1e-12);
    EXPECT_LT(std::abs(s.beta + p.g * std::norm(s.alpha)), 1e-12 * std::max(1.0, std::norm(s.alpha)));
    EXPECT_LT(s.residual, 1e-12);
  }
}

TEST(Displacement, CouplingIsLinearInSmallG) {
  ModelParams p = base_params();
  p.g = 1e-6;
  const double g1 = std::abs(solve_displacements(p).g_eff);
  p.g = 2e-6;
  const double g2 = std::abs(solve_displacements(p).g_eff);
  EXPECT_NEAR(g2 / g1, 2.0, 1e-9);
  const double predicted = 1e-6 * p.omega_m * p.omega_drive_amp /
                           std::abs(cplx(p.delta, -p.kappa / 2.0));
  EXPECT_NEAR(g1 / predicted, 1.0, 1e-9);
}

TEST(Displacement, CriticalDrivingIsReported) {
  ModelParams p = base_params();
  const double omega_c = critical_drive(p);
  ASSERT_TRUE(std::isfinite(omega_c));
  p.omega_drive_amp = 1.01 * omega_c;
  try {
    solve_displacements(p);
    FAIL() << "expected CriticalDrivingError";
  } catch (const CriticalDrivingError &e) {
    EXPECT_NEAR(e.critical_drive(), omega_c, 1e-12);
    EXPECT_NE(std::string(e.what()).find("critical drive"), std::string::npos);
  }
  // Also when the iteration budget is exhausted just below the fold.
  p.omega_drive_amp = 0.999999 * omega_c;
  EXPECT_THROW(solve_displacements(p, {0.5, 50, 1e-13}), CriticalDrivingError);
}

TEST(Hamiltonian, DecoupledOscillators) {
  ModelParams p = base_params();
  p.g = 0.0;
  p.delta = 1.3;
  const auto s = solve_displacements(p);
  const auto h = build_hamiltonian(p, s);
  const auto [c, d] = mode_operators(p.dims());
  const auto expected = 1.3 * (c.adjoint() * c) + 1.0 * (d.adjoint() * d);
  EXPECT_LT(max_abs(h.data() - expected.data()), 1e-15);
}

TEST(Hamiltonian, IsHermitian) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    ModelParams p = base_params();
    p.delta = 0.5 + u(rng);
    p.kappa = 0.2 * u(rng);
    p.g = 0.05 * u(rng);
    p.omega_drive_amp = 0.5 * u(rng) * std::min(1.0, critical_drive(p));
    p.rwa_only = u(rng) < 0.5;
    p.include_nonlinear_term = u(rng) < 0.5;
    p.n_c = 2 + static_cast<int>(3 * u(rng));
    p.n_m = 2 + static_cast<int>(3 * u(rng));
    const auto h = build_hamiltonian(p, solve_displacements(p));
    EXPECT_LT(h.hermiticity_error(), 1e-14);
  }
}

TEST(Hamiltonian, RwaSingleExcitationBlock) {
  ModelParams p = base_params();
  p.rwa_only = true;
  p.omega_drive_amp = 0.5;
  const auto s = solve_displacements(p);
  const auto h = build_hamiltonian(p, s).data();
  const Eigen::Index one_zero = 1 * p.n_m + 0, zero_one = 0 * p.n_m + 1;
  EXPECT_NEAR(std::abs(h(one_zero, zero_one)), std::abs(s.g_eff), 1e-15);
  EXPECT_LT(std::abs(h(one_zero, zero_one) - s.g_eff), 1e-15);
  EXPECT_LT(std::abs(h(zero_one, zero_one) - p.omega_m), 1e-15);
  EXPECT_LT(std::abs(h(one_zero, one_zero) - (p.delta + 2.0 * p.g * p.omega_m * s.beta.real())),
            1e-15);
}

TEST(Hamiltonian, RwaIsExcitationConservingProjection) {
  ModelParams p = base_params();
  p.omega_drive_amp = 0.7;
  p.include_nonlinear_term = false;
  const auto s = solve_displacements(p);
  const CMatrix full = build_hamiltonian(p, s).data();
  p.rwa_only = true;
  const CMatrix rwa = build_hamiltonian(p, s).data();
  CMatrix projected = CMatrix::Zero(full.rows(), full.cols());
  for (Eigen::Index i = 0; i < full.rows(); ++i)
    for (Eigen::Index j = 0; j < full.cols(); ++j) {
      const auto exc_i = i / p.n_m + i % p.n_m;
      const auto exc_j = j / p.n_m + j % p.n_m;
      if (exc_i == exc_j)
        projected(i, j) = full(i, j);
    }
  EXPECT_EQ(max_abs(projected - rwa), 0.0);
}

TEST(Collapse, ChannelsAndRates) {
  ModelParams p = base_params();
  p.gamma = 0.01;
  p.n_bar = 0.0;
  EXPECT_EQ(build_collapse_ops(p, {}).size(), 2u);
  p.n_bar = 1.5;
  const auto ops = build_collapse_ops(p, {});
  ASSERT_EQ(ops.size(), 3u);
  EXPECT_DOUBLE_EQ(ops[0].rate, p.kappa);
  EXPECT_DOUBLE_EQ(ops[1].rate, p.gamma * 2.5);
  EXPECT_DOUBLE_EQ(ops[2].rate, p.gamma * 1.5);
  for (const auto &c : ops)
    EXPECT_GE(c.rate, 0.0);
}

TEST(Collapse, DecoupledMechanicsThermalizes) {
  // Detailed balance is exact on the truncated ladder, so the stationary
  // state is the truncated geometric distribution.
  ModelParams p = base_params();
  p.g = 0.0;
  p.gamma = 0.05;
  p.n_bar = 2.0;
  p.n_c = 2;
  p.n_m = 12;
  const auto m = make_model(p);
  const auto rho = steady_state(m.liouvillian);
  const auto [c, d] = mode_operators(p.dims());
  const double occ = expect(d.adjoint() * d, rho).real();
  const double truncated = expect(number(12), DensityMatrix(thermal_operator(12, 2.0))).real();
  EXPECT_NEAR(occ, truncated, 1e-10);

  // With a deep ladder the mean converges to n_bar.
  p.n_m = 24;
  const auto rho_deep = steady_state(make_model(p).liouvillian);
  const auto [c2, d2] = mode_operators(p.dims());
  EXPECT_NEAR(expect(d2.adjoint() * d2, rho_deep).real(), 2.0, 2e-3);
}

TEST(LinearDissipation, IsTracePreservingAndSmall) {
  ModelParams p = default_figure2_params(Regime::weak);
  const auto s = solve_displacements(p);
  const auto extra = mechanical_linear_dissipation(p, s);
  EXPECT_LT(trace_annihilation_error(extra), 1e-14);
  // The term scales with Gamma |beta|.
  EXPECT_LT(max_abs(extra.data()), p.gamma * std::abs(s.beta) * 2.0 * std::sqrt(p.n_m));
}

TEST(Defaults, WeakRegime) {
  const auto p = default_figure2_params(Regime::weak);
  EXPECT_TRUE(p.in_cooling_regime());
  const auto s = solve_displacements(p);
  EXPECT_NEAR(std::abs(s.g_eff), 0.05, 1e-10);
  EXPECT_GT(std::abs(s.g_eff), 100.0 * p.gamma);
  // Displaced cavity is resonant with the mechanics.
  EXPECT_NEAR(p.delta + 2.0 * p.g * p.omega_m * s.beta.real(), p.omega_m, 1e-10);
  EXPECT_DOUBLE_EQ(p.kappa, 0.05);
  EXPECT_DOUBLE_EQ(p.gamma, 1e-4);
  EXPECT_DOUBLE_EQ(p.n_bar, 0.0);
}

TEST(Defaults, StrongRegime) {
  const auto p = default_figure2_params(Regime::strong);
  EXPECT_TRUE(p.in_cooling_regime());
  const auto s = solve_displacements(p);
  EXPECT_NEAR(std::abs(s.g_eff) / p.omega_m, 0.3, 1e-10);
}

TEST(Defaults, UnitDeltaCannotReachStrongCoupling) {
  // With Delta = omega_m the displacement branch folds before |G| = 0.3.
  ModelParams p = default_figure2_params(Regime::strong);
  p.delta = 1.0;
  EXPECT_TRUE(std::isnan(drive_for_coupling(p, 0.3)));
}

TEST(Params, NormalizationToMechanicalUnits) {
  ModelParams p;
  p.omega_m = 2.0 * 3.141592653589793 * 10e6;
  p.delta = p.omega_m;
  p.kappa = 0.05 * p.omega_m;
  p.gamma = 1e-4 * p.omega_m;
  p.omega_drive_amp = 3.0 * p.omega_m;
  const auto n = p.normalized();
  EXPECT_DOUBLE_EQ(n.omega_m, 1.0);
  EXPECT_DOUBLE_EQ(n.delta, 1.0);
  EXPECT_NEAR(n.kappa, 0.05, 1e-15);
  EXPECT_NEAR(n.gamma, 1e-4, 1e-18);
  EXPECT_DOUBLE_EQ(n.omega_drive_amp, 3.0);
}

TEST(Params, Validation) {
  ModelParams p;
  p.kappa = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.omega_m = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.n_c = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
