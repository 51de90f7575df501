#include <gtest/gtest.h>

#include <random>

#include "optolg/dynamics.hpp"
#include "optolg/liouville.hpp"
#include "test_support.hpp"

using namespace optolg;
using optolg::testing::max_abs;
using optolg::testing::random_hermitian;
using optolg::testing::random_matrix;

namespace {

/// Random Liouvillian: Hermitian H plus a few random collapse operators.
Superoperator random_liouvillian(std::mt19937_64 &rng, const HilbertDims &dims) {
  std::uniform_real_distribution<double> rate(0.0, 2.0);
  const auto d = dims.total();
  const OperatorMatrix h(dims, random_hermitian(rng, d));
  std::vector<CollapseOperator> cs;
  for (int k = 0; k < 3; ++k)
    cs.push_back({OperatorMatrix(dims, random_matrix(rng, d)), rate(rng)});
  return liouvillian(h, cs);
}

} // namespace

TEST(SuperoperatorMaps, LeftIdentity) {
  const HilbertDims dims{3};
  EXPECT_EQ(max_abs(left_mult(identity(dims)).data() - Superoperator::identity(dims).data()),
            0.0);
}

TEST(SuperoperatorMaps, MatchDirectProducts) {
  std::mt19937_64 rng(1);
  const HilbertDims dims{3};
  for (int i = 0; i < 20; ++i) {
    const OperatorMatrix a(dims, random_matrix(rng, 3));
    const OperatorMatrix x(dims, random_matrix(rng, 3));
    const CMatrix ax = a.data() * x.data();
    const CMatrix xa = x.data() * a.data();
    EXPECT_LT(max_abs(left_mult(a).apply(x).data() - ax), 1e-13);
    EXPECT_LT(max_abs(right_mult(a).apply(x).data() - xa), 1e-13);
  }
}

TEST(SuperoperatorMaps, LeftAndRightCommute) {
  std::mt19937_64 rng(2);
  const HilbertDims dims{2, 2};
  for (int i = 0; i < 20; ++i) {
    const OperatorMatrix a(dims, random_matrix(rng, 4));
    const OperatorMatrix b(dims, random_matrix(rng, 4));
    const auto lr = (right_mult(a) * left_mult(b)).data();
    const auto rl = (left_mult(b) * right_mult(a)).data();
    EXPECT_LT(max_abs(lr - rl), 1e-12);
  }
}

TEST(Dissipator, ZeroRateIsZeroMap) {
  const auto s = lindblad_dissipator(destroy(4), 0.0);
  EXPECT_EQ(max_abs(s.data()), 0.0);
}

TEST(Dissipator, RejectsNegativeRate) {
  EXPECT_THROW(lindblad_dissipator(destroy(3), -0.1), std::invalid_argument);
}

TEST(Dissipator, AdditiveInRate) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const HilbertDims dims{2, 2};
  for (int i = 0; i < 20; ++i) {
    const OperatorMatrix c(dims, random_matrix(rng, 4));
    const double r1 = u(rng), r2 = u(rng);
    const auto sum = lindblad_dissipator(c, r1) + lindblad_dissipator(c, r2);
    const auto joint = lindblad_dissipator(c, r1 + r2);
    EXPECT_LT(max_abs(sum.data() - joint.data()), 1e-14 * std::max(1.0, max_abs(joint.data())));
  }
}

TEST(Dissipator, PreservesHermiticity) {
  std::mt19937_64 rng(4);
  const HilbertDims dims{3, 2};
  for (int i = 0; i < 100; ++i) {
    const OperatorMatrix c(dims, random_matrix(rng, 6));
    const auto s = lindblad_dissipator(c, 0.7);
    const OperatorMatrix rho(dims, random_hermitian(rng, 6));
    EXPECT_LT(s.apply(rho).hermiticity_error(), 1e-12);
  }
}

TEST(Dissipator, SingleModeDecayMatchesExponential) {
  // d<n>/dt = -kappa <n> for a lone damped mode starting in |1>.
  const double kappa = 0.3;
  const auto l = liouvillian(zero_operator(HilbertDims{3}), {{destroy(3), kappa}});
  const auto rho0 = fock_projector(3, 1);
  for (double t : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    const auto rho = unvec(HilbertDims{3}, expm(l.data() * t) * vec(rho0));
    const double n = expect(number(3), rho).real();
    EXPECT_NEAR(n / std::exp(-kappa * t), 1.0, 1e-12) << "t=" << t;
  }
}

TEST(Dissipator, DetailedBalanceGivesNbar) {
  const int n = 40;
  const double gamma = 0.2, nbar = 1.3;
  const auto a = destroy(n);
  const auto l = liouvillian(zero_operator(HilbertDims{n}),
                             {{a, gamma * (nbar + 1.0)}, {a.adjoint(), gamma * nbar}});
  const auto rho = steady_state(l);
  // Truncation at 40 levels cuts off a geometric tail of weight (1.3/2.3)^40.
  EXPECT_NEAR(expect(number(n), rho).real(), nbar, 1e-8);
}

TEST(Liouvillian, ZeroHamiltonianNoCollapseIsZero) {
  const auto l = liouvillian(zero_operator(HilbertDims{3}), {});
  EXPECT_EQ(max_abs(l.data()), 0.0);
}

TEST(Liouvillian, ClosedSpectrumIsImaginary) {
  std::mt19937_64 rng(5);
  const HilbertDims dims{2, 3};
  for (int i = 0; i < 10; ++i) {
    const OperatorMatrix h(dims, random_hermitian(rng, 6));
    const auto l = liouvillian(h, {});
    Eigen::ComplexEigenSolver<CMatrix> es(l.data(), false);
    EXPECT_LT(es.eigenvalues().real().cwiseAbs().maxCoeff(), 1e-8);

    // The spectrum is the set of differences of the Hamiltonian's eigenvalues.
    Eigen::SelfAdjointEigenSolver<CMatrix> hs(h.data());
    const auto &e = hs.eigenvalues();
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      double best = 1e9;
      for (Eigen::Index a = 0; a < e.size(); ++a)
        for (Eigen::Index b = 0; b < e.size(); ++b)
          best = std::min(best, std::abs(es.eigenvalues()(k) - cplx(0.0, -(e(a) - e(b)))));
      EXPECT_LT(best, 1e-8);
    }
  }
}

TEST(Liouvillian, DissipativeSpectrumIsStable) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    const auto l = random_liouvillian(rng, HilbertDims{2, 3});
    Eigen::ComplexEigenSolver<CMatrix> es(l.data(), false);
    EXPECT_LE(es.eigenvalues().real().maxCoeff(), 1e-10);
  }
}

TEST(Liouvillian, TraceIsLeftNullVector) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto l = random_liouvillian(rng, HilbertDims{3, 2});
    EXPECT_LT(trace_annihilation_error(l), 1e-10 * std::max(1.0, max_abs(l.data())));
  }
}

TEST(Liouvillian, DimensionMismatch) {
  EXPECT_THROW(liouvillian(zero_operator(HilbertDims{3}), {{destroy(4), 1.0}}), DimensionError);
}

TEST(Vectorization, ExpectationRowMatchesTrace) {
  std::mt19937_64 rng(8);
  const HilbertDims dims{2, 2};
  const OperatorMatrix a(dims, random_matrix(rng, 4));
  const OperatorMatrix x(dims, random_matrix(rng, 4));
  const cplx via_row = (expectation_row(a) * vec(x)).value();
  EXPECT_LT(std::abs(via_row - (a.data() * x.data()).trace()), 1e-12);
  EXPECT_LT(std::abs((trace_row(dims) * vec(x)).value() - x.data().trace()), 1e-12);
}
