#pragma once

// Superoperators acting on column-stacked density matrices.
//
// vec(X) stacks the columns of X, which is Eigen's native column-major
// layout, so vec(A X B) = (B^T kron A) vec(X). Every formula below is
// written under that convention.

#include <string>
#include <utility>
#include <vector>

#include "optolg/qops.hpp"

namespace optolg {

class Superoperator {
public:
  Superoperator(HilbertDims dims, CMatrix data) : dims_(std::move(dims)), data_(std::move(data)) {
    const auto d = dims_.total();
    if (data_.rows() != d * d || data_.cols() != d * d)
      throw DimensionError("Superoperator: data must be " + std::to_string(d * d) + " square");
  }

  static Superoperator zero(const HilbertDims &dims) {
    const auto d2 = dims.total() * dims.total();
    return {dims, CMatrix::Zero(d2, d2)};
  }

  static Superoperator identity(const HilbertDims &dims) {
    const auto d2 = dims.total() * dims.total();
    return {dims, CMatrix::Identity(d2, d2)};
  }

  const HilbertDims &dims() const noexcept { return dims_; }
  const CMatrix &data() const noexcept { return data_; }
  Eigen::Index hilbert_dim() const noexcept { return dims_.total(); }

  Superoperator &operator+=(const Superoperator &o) {
    require_same(o);
    data_ += o.data_;
    return *this;
  }
  Superoperator &operator-=(const Superoperator &o) {
    require_same(o);
    data_ -= o.data_;
    return *this;
  }
  Superoperator &operator*=(cplx s) {
    data_ *= s;
    return *this;
  }
  friend Superoperator operator+(Superoperator a, const Superoperator &b) { return a += b; }
  friend Superoperator operator-(Superoperator a, const Superoperator &b) { return a -= b; }
  friend Superoperator operator*(cplx s, Superoperator a) { return a *= s; }
  friend Superoperator operator*(const Superoperator &a, const Superoperator &b) {
    a.require_same(b);
    return {a.dims_, a.data_ * b.data_};
  }

  /// Apply to an operator: returns the matrix form of S(X).
  OperatorMatrix apply(const OperatorMatrix &x) const;

private:
  void require_same(const Superoperator &o) const {
    if (!(dims_ == o.dims_))
      throw DimensionError("Superoperator: dims " + dims_.to_string() + " vs " +
                           o.dims_.to_string());
  }

  HilbertDims dims_;
  CMatrix data_;
};

inline CVector vec(const OperatorMatrix &x) {
  return Eigen::Map<const CVector>(x.data().data(), x.data().size());
}

inline OperatorMatrix unvec(const HilbertDims &dims, const CVector &v) {
  const auto d = dims.total();
  if (v.size() != d * d)
    throw DimensionError("unvec: vector length " + std::to_string(v.size()) + " != " +
                         std::to_string(d * d));
  return {dims, Eigen::Map<const CMatrix>(v.data(), d, d)};
}

inline OperatorMatrix Superoperator::apply(const OperatorMatrix &x) const {
  if (!(x.dims() == dims_))
    throw DimensionError("Superoperator::apply: operand dims " + x.dims().to_string());
  return unvec(dims_, data_ * vec(x));
}

/// Row vector t with t . vec(X) = Tr X.
inline Eigen::RowVectorXcd trace_row(const HilbertDims &dims) {
  const auto d = dims.total();
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    t(i + i * d) = 1.0;
  return t;
}

/// Row vector r with r . vec(X) = Tr(op X).
inline Eigen::RowVectorXcd expectation_row(const OperatorMatrix &op) {
  // Tr(op X) = sum_ij op_ji X_ij, and X_ij sits at i + j d.
  const CMatrix t = op.data().transpose();
  return Eigen::Map<const Eigen::RowVectorXcd>(t.data(), t.size());
}

/// X -> op X
inline Superoperator left_mult(const OperatorMatrix &op) {
  const auto d = op.dim();
  return {op.dims(), Eigen::kroneckerProduct(CMatrix::Identity(d, d), op.data()).eval()};
}

/// X -> X op
inline Superoperator right_mult(const OperatorMatrix &op) {
  const auto d = op.dim();
  return {op.dims(),
          Eigen::kroneckerProduct(op.data().transpose(), CMatrix::Identity(d, d)).eval()};
}

/// X -> A X B
inline Superoperator sandwich(const OperatorMatrix &a, const OperatorMatrix &b) {
  a.require_same(b, "sandwich");
  return {a.dims(), Eigen::kroneckerProduct(b.data().transpose(), a.data()).eval()};
}

/// X -> -i [H, X]
inline Superoperator hamiltonian_generator(const OperatorMatrix &h) {
  Superoperator s = left_mult(h) - right_mult(h);
  s *= -I_UNIT;
  return s;
}

/// X -> (rate/2) (2 c X c^dag - c^dag c X - X c^dag c)
inline Superoperator lindblad_dissipator(const OperatorMatrix &c, double rate) {
  if (!(rate >= 0.0))
    throw std::invalid_argument("lindblad_dissipator: rate must be >= 0, got " +
                                std::to_string(rate));
  const OperatorMatrix cd = c.adjoint();
  const OperatorMatrix cdc = cd * c;
  Superoperator s = 2.0 * sandwich(c, cd) - left_mult(cdc) - right_mult(cdc);
  s *= 0.5 * rate;
  return s;
}

struct CollapseOperator {
  OperatorMatrix op;
  double rate;
};

/// -i[H, .] plus a Lindblad dissipator for each collapse channel.
inline Superoperator liouvillian(const OperatorMatrix &h,
                                 const std::vector<CollapseOperator> &collapse) {
  Superoperator l = hamiltonian_generator(h);
  for (const auto &c : collapse) {
    if (!(c.op.dims() == h.dims()))
      throw DimensionError("liouvillian: collapse operator dims " + c.op.dims().to_string() +
                           " vs Hamiltonian " + h.dims().to_string());
    l += lindblad_dissipator(c.op, c.rate);
  }
  return l;
}

/// max |t . S| : how far the trace functional is from being a left null vector.
inline double trace_annihilation_error(const Superoperator &s) {
  return (trace_row(s.dims()) * s.data()).cwiseAbs().maxCoeff();
}

} // namespace optolg
