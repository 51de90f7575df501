#pragma once

#include <cmath>
#include <random>

#include "optolg/qops.hpp"

namespace optolg::testing {

inline CMatrix random_matrix(std::mt19937_64 &rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

inline CMatrix random_hermitian(std::mt19937_64 &rng, Eigen::Index n) {
  const CMatrix m = random_matrix(rng, n);
  return 0.5 * (m + m.adjoint());
}

/// Random full-rank density matrix A A^dag / Tr.
inline DensityMatrix random_density(std::mt19937_64 &rng, const HilbertDims &dims) {
  const CMatrix a = random_matrix(rng, dims.total());
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(OperatorMatrix(dims, rho));
}

inline double max_abs(const CMatrix &m) { return m.cwiseAbs().maxCoeff(); }

} // namespace optolg::testing
