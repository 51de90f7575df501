#pragma once

// Dense operator algebra on truncated bosonic tensor-product spaces.
//
// Factor ordering is cavity first, mechanics second everywhere in the
// library; Kronecker products put the first factor in the slowest-varying
// index, so basis state |n_c, n_m> sits at row n_c * N_m + n_m.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "optolg/errors.hpp"

namespace optolg {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx I_UNIT{0.0, 1.0};

/// Tensor factor indices for the two-mode model.
enum class Mode : std::size_t { cavity = 0, mechanical = 1 };

/// Truncation of each tensor factor.
class HilbertDims {
public:
  HilbertDims() = default;
  HilbertDims(std::initializer_list<int> dims) : HilbertDims(std::vector<int>(dims)) {}
  explicit HilbertDims(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty())
      throw DimensionError("HilbertDims: at least one factor required");
    for (int d : dims_)
      if (d < 2)
        throw DimensionError("HilbertDims: every truncation must be >= 2, got " +
                             std::to_string(d));
  }

  std::span<const int> factors() const noexcept { return dims_; }
  std::size_t size() const noexcept { return dims_.size(); }
  int operator[](std::size_t i) const { return dims_.at(i); }

  Eigen::Index total() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), Eigen::Index{1},
                           [](Eigen::Index a, int b) { return a * b; });
  }

  HilbertDims concat(const HilbertDims &other) const {
    std::vector<int> out = dims_;
    out.insert(out.end(), other.dims_.begin(), other.dims_.end());
    return HilbertDims(std::move(out));
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (i)
        s += ",";
      s += std::to_string(dims_[i]);
    }
    return s + "]";
  }

  friend bool operator==(const HilbertDims &, const HilbertDims &) = default;

private:
  std::vector<int> dims_;
};

/// Square complex matrix tagged with its tensor structure.
class OperatorMatrix {
public:
  OperatorMatrix(HilbertDims dims, CMatrix data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    const auto d = dims_.total();
    if (data_.rows() != d || data_.cols() != d)
      throw DimensionError("OperatorMatrix: data is " + std::to_string(data_.rows()) + "x" +
                           std::to_string(data_.cols()) + " but dims " + dims_.to_string() +
                           " require " + std::to_string(d));
  }

  const HilbertDims &dims() const noexcept { return dims_; }
  const CMatrix &data() const noexcept { return data_; }
  Eigen::Index dim() const noexcept { return data_.rows(); }

  OperatorMatrix adjoint() const { return {dims_, data_.adjoint()}; }

  double hermiticity_error() const {
    return (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  }

  OperatorMatrix &operator+=(const OperatorMatrix &o) {
    require_same(o, "+");
    data_ += o.data_;
    return *this;
  }
  OperatorMatrix &operator-=(const OperatorMatrix &o) {
    require_same(o, "-");
    data_ -= o.data_;
    return *this;
  }
  OperatorMatrix &operator*=(cplx s) {
    data_ *= s;
    return *this;
  }

  friend OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix &b) { return a += b; }
  friend OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix &b) { return a -= b; }
  friend OperatorMatrix operator*(cplx s, OperatorMatrix a) { return a *= s; }
  friend OperatorMatrix operator*(OperatorMatrix a, cplx s) { return a *= s; }
  friend OperatorMatrix operator*(const OperatorMatrix &a, const OperatorMatrix &b) {
    a.require_same(b, "*");
    return {a.dims_, a.data_ * b.data_};
  }

  void require_same(const OperatorMatrix &o, const char *op) const {
    if (!(dims_ == o.dims_))
      throw DimensionError(std::string("OperatorMatrix ") + op + ": dims " + dims_.to_string() +
                           " vs " + o.dims_.to_string());
  }

private:
  HilbertDims dims_;
  CMatrix data_;
};

/// Validation tolerances for density matrices.
struct StateTolerance {
  double trace = 1e-9;
  double hermiticity = 1e-10;
  double min_eigenvalue = -1e-8;
};

/// Unit-trace, Hermitian, positive semidefinite operator. Construction
/// validates; use `unchecked` only for intermediate results that are later
/// re-validated.
class DensityMatrix {
public:
  explicit DensityMatrix(OperatorMatrix op, StateTolerance tol = {}) : op_(std::move(op)) {
    validate(tol);
  }

  static DensityMatrix unchecked(OperatorMatrix op) { return DensityMatrix(std::move(op), Tag{}); }

  const HilbertDims &dims() const noexcept { return op_.dims(); }
  const CMatrix &data() const noexcept { return op_.data(); }
  const OperatorMatrix &op() const noexcept { return op_; }

  cplx trace() const { return op_.data().trace(); }
  double hermiticity_error() const { return op_.hermiticity_error(); }
  double min_eigenvalue() const {
    const CMatrix herm = 0.5 * (op_.data() + op_.data().adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  void validate(StateTolerance tol = {}) const {
    const cplx tr = trace();
    if (std::abs(tr - 1.0) > tol.trace)
      throw StateInvariantError("DensityMatrix: trace " + std::to_string(tr.real()) + "+" +
                                std::to_string(tr.imag()) + "i differs from 1");
    if (hermiticity_error() > tol.hermiticity)
      throw StateInvariantError("DensityMatrix: not Hermitian (max deviation " +
                                std::to_string(hermiticity_error()) + ")");
    if (min_eigenvalue() < tol.min_eigenvalue)
      throw StateInvariantError("DensityMatrix: negative eigenvalue " +
                                std::to_string(min_eigenvalue()));
  }

private:
  struct Tag {};
  DensityMatrix(OperatorMatrix op, Tag) : op_(std::move(op)) {}
  OperatorMatrix op_;
};

inline OperatorMatrix identity(const HilbertDims &dims) {
  const auto d = dims.total();
  return {dims, CMatrix::Identity(d, d)};
}

inline OperatorMatrix identity(int n) { return identity(HilbertDims{n}); }

inline OperatorMatrix zero_operator(const HilbertDims &dims) {
  const auto d = dims.total();
  return {dims, CMatrix::Zero(d, d)};
}

/// Bosonic lowering operator truncated to n levels.
inline OperatorMatrix destroy(int n) {
  if (n < 2)
    throw DimensionError("destroy: truncation must be >= 2, got " + std::to_string(n));
  CMatrix a = CMatrix::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k)
    a(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
  return {HilbertDims{n}, std::move(a)};
}

inline OperatorMatrix create(int n) { return destroy(n).adjoint(); }

inline OperatorMatrix number(int n) {
  if (n < 2)
    throw DimensionError("number: truncation must be >= 2, got " + std::to_string(n));
  CMatrix m = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k)
    m(k, k) = static_cast<double>(k);
  return {HilbertDims{n}, std::move(m)};
}

/// |k><k| on an n-level factor.
inline OperatorMatrix fock_projector(int n, int k) {
  if (n < 2)
    throw DimensionError("fock_projector: truncation must be >= 2, got " + std::to_string(n));
  if (k < 0 || k >= n)
    throw DimensionError("fock_projector: level " + std::to_string(k) +
                         " outside truncation " + std::to_string(n));
  CMatrix p = CMatrix::Zero(n, n);
  p(k, k) = 1.0;
  return {HilbertDims{n}, std::move(p)};
}

inline OperatorMatrix diagonal(std::span<const double> entries) {
  const auto n = static_cast<Eigen::Index>(entries.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    m(i, i) = entries[static_cast<std::size_t>(i)];
  return {HilbertDims{static_cast<int>(n)}, std::move(m)};
}

inline OperatorMatrix diagonal(std::initializer_list<double> entries) {
  return diagonal(std::span<const double>(entries.begin(), entries.size()));
}

/// Kronecker product in list order; dims are concatenated.
inline OperatorMatrix tensor(std::span<const OperatorMatrix> ops) {
  if (ops.empty())
    throw DimensionError("tensor: empty operator list");
  HilbertDims dims = ops.front().dims();
  CMatrix acc = ops.front().data();
  for (std::size_t i = 1; i < ops.size(); ++i) {
    acc = CMatrix(Eigen::kroneckerProduct(acc, ops[i].data()));
    dims = dims.concat(ops[i].dims());
  }
  return {std::move(dims), std::move(acc)};
}

inline OperatorMatrix tensor(std::initializer_list<OperatorMatrix> ops) {
  return tensor(std::span<const OperatorMatrix>(ops.begin(), ops.size()));
}

/// Place a single-factor operator at position `factor`, identity elsewhere.
inline OperatorMatrix embed(const OperatorMatrix &local, const HilbertDims &dims,
                            std::size_t factor) {
  if (factor >= dims.size())
    throw DimensionError("embed: factor index " + std::to_string(factor) + " out of range for " +
                         dims.to_string());
  if (local.dims().size() != 1 || local.dims()[0] != dims[factor])
    throw DimensionError("embed: local operator dims " + local.dims().to_string() +
                         " do not match factor " + std::to_string(factor) + " of " +
                         dims.to_string());
  std::vector<OperatorMatrix> parts;
  parts.reserve(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i)
    parts.push_back(i == factor ? local : identity(dims[i]));
  return tensor(parts);
}

inline OperatorMatrix embed(const OperatorMatrix &local, const HilbertDims &dims, Mode mode) {
  return embed(local, dims, static_cast<std::size_t>(mode));
}

/// 2|1><1| - 1 on the selected factor: +1 when exactly one quantum is present.
inline OperatorMatrix dichotomic_observable(const HilbertDims &dims, std::size_t factor) {
  if (factor >= dims.size())
    throw DimensionError("dichotomic_observable: invalid mode index " + std::to_string(factor));
  const int n = dims[factor];
  OperatorMatrix local = 2.0 * fock_projector(n, 1) - identity(n);
  return embed(local, dims, factor);
}

inline OperatorMatrix dichotomic_observable(const HilbertDims &dims, Mode mode) {
  return dichotomic_observable(dims, static_cast<std::size_t>(mode));
}

/// Projectors onto the +1 and -1 eigenspaces of a dichotomic observable.
inline std::pair<OperatorMatrix, OperatorMatrix> dichotomic_projectors(const OperatorMatrix &q) {
  const OperatorMatrix id = identity(q.dims());
  return {0.5 * (id + q), 0.5 * (id - q)};
}

/// Tr(op rho).
inline cplx expect(const OperatorMatrix &op, const OperatorMatrix &rho) {
  if (!(op.dims() == rho.dims()))
    throw DimensionError("expect: dims " + op.dims().to_string() + " vs " +
                         rho.dims().to_string());
  // Tr(AB) = sum_ij A_ij B_ji
  return (op.data().transpose().cwiseProduct(rho.data())).sum();
}

inline cplx expect(const OperatorMatrix &op, const DensityMatrix &rho) {
  return expect(op, rho.op());
}

/// Pure product Fock state |levels[0], levels[1], ...>.
inline DensityMatrix fock_state(const HilbertDims &dims, std::span<const int> levels) {
  if (levels.size() != dims.size())
    throw DimensionError("fock_state: expected " + std::to_string(dims.size()) + " levels");
  std::vector<OperatorMatrix> parts;
  for (std::size_t i = 0; i < dims.size(); ++i)
    parts.push_back(fock_projector(dims[i], levels[i]));
  return DensityMatrix(tensor(parts));
}

inline DensityMatrix fock_state(const HilbertDims &dims, std::initializer_list<int> levels) {
  return fock_state(dims, std::span<const int>(levels.begin(), levels.size()));
}

/// Geometric (Bose-Einstein) populations renormalized on the truncation.
inline OperatorMatrix thermal_operator(int n, double n_bar) {
  if (n < 2)
    throw DimensionError("thermal_operator: truncation must be >= 2");
  if (!(n_bar >= 0.0))
    throw std::invalid_argument("thermal_operator: n_bar must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(n));
  const double ratio = n_bar / (n_bar + 1.0);
  double w = 1.0, norm = 0.0;
  for (auto &pk : p) {
    pk = w;
    norm += w;
    w *= ratio;
  }
  for (auto &pk : p)
    pk /= norm;
  return diagonal(p);
}

inline DensityMatrix product_state(std::span<const OperatorMatrix> factors) {
  return DensityMatrix(tensor(factors));
}

} // namespace optolg
