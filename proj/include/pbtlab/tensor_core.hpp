#pragma once

// Dense operator algebra over composite spaces.
//
// Basis convention: row-major, subsystem-ordered computational basis. The
// first subsystem of a shape is the most significant digit of the flat index.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "pbtlab/errors.hpp"

namespace pbtlab {

using cplx = std::complex<double>;
using Index = Eigen::Index;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kNegativeEigenTol = -1e-9;

/// Ordered local dimensions of a composite space. Every entry is at least 2.
class SubsystemShape {
 public:
  SubsystemShape() = default;
  explicit SubsystemShape(std::vector<int> dims) : dims_(std::move(dims)) {
    for (int d : dims_) {
      if (d < 2) throw ValidationError("SubsystemShape: local dimension must be >= 2, got " + std::to_string(d));
    }
  }
  SubsystemShape(std::initializer_list<int> dims) : SubsystemShape(std::vector<int>(dims)) {}

  static SubsystemShape uniform(int d, int count) { return SubsystemShape(std::vector<int>(count, d)); }

  const std::vector<int>& dims() const noexcept { return dims_; }
  int count() const noexcept { return static_cast<int>(dims_.size()); }
  int operator[](int k) const { return dims_.at(k); }

  Index dimension() const noexcept {
    Index n = 1;
    for (int d : dims_) n *= d;
    return n;
  }

  SubsystemShape concat(const SubsystemShape& other) const {
    std::vector<int> out = dims_;
    out.insert(out.end(), other.dims_.begin(), other.dims_.end());
    return SubsystemShape(std::move(out));
  }

  SubsystemShape select(std::span<const int> idx) const {
    std::vector<int> out;
    out.reserve(idx.size());
    for (int k : idx) out.push_back(dims_.at(k));
    return SubsystemShape(std::move(out));
  }

  bool operator==(const SubsystemShape&) const = default;

 private:
  std::vector<int> dims_;
};

namespace detail {

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(std::abs(m(i, j)))) return false;
  return true;
}

// Flat full-space index for every multi-index over `subset` (enumerated
// row-major in the order given), with the other subsystems' digits at zero.
inline std::vector<Index> subset_offsets(const SubsystemShape& shape, std::span<const int> subset) {
  const int n = shape.count();
  std::vector<Index> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * shape[k + 1];

  std::vector<Index> out{0};
  for (int k : subset) {
    std::vector<Index> next;
    next.reserve(out.size() * shape[k]);
    for (Index base : out)
      for (int digit = 0; digit < shape[k]; ++digit) next.push_back(base + digit * stride[k]);
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

/// Square operator tagged with the composite shape it acts on.
template <typename Scalar>
class BasicOperator {
 public:
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BasicOperator() = default;
  BasicOperator(SubsystemShape shape, MatrixType matrix) : shape_(std::move(shape)), matrix_(std::move(matrix)) {
    const Index n = shape_.dimension();
    if (matrix_.rows() != n || matrix_.cols() != n)
      throw ValidationError("Operator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                            std::to_string(matrix_.cols()) + " but shape has dimension " + std::to_string(n));
    if (!detail::all_finite(matrix_)) throw ValidationError("Operator: entries must be finite");
  }

  static BasicOperator identity(const SubsystemShape& shape) {
    const Index n = shape.dimension();
    return BasicOperator(shape, MatrixType::Identity(n, n));
  }

  const SubsystemShape& shape() const noexcept { return shape_; }
  const MatrixType& matrix() const noexcept { return matrix_; }
  Index dimension() const noexcept { return matrix_.rows(); }
  Scalar trace() const { return matrix_.trace(); }

  BasicOperator adjoint() const { return BasicOperator(shape_, matrix_.adjoint()); }

 private:
  SubsystemShape shape_;
  MatrixType matrix_;
};

/// State vector tagged with its composite shape.
template <typename Scalar>
class BasicKet {
 public:
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicKet() = default;
  BasicKet(SubsystemShape shape, VectorType amplitudes)
      : shape_(std::move(shape)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != shape_.dimension())
      throw ValidationError("Ket: vector length " + std::to_string(amplitudes_.size()) +
                            " does not match shape dimension " + std::to_string(shape_.dimension()));
    if (!detail::all_finite(amplitudes_)) throw ValidationError("Ket: amplitudes must be finite");
  }

  const SubsystemShape& shape() const noexcept { return shape_; }
  const VectorType& amplitudes() const noexcept { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }
  bool is_normalized(double tol = 1e-12) const { return std::abs(amplitudes_.squaredNorm() - 1.0) <= tol; }

  /// |v><v|
  BasicOperator<Scalar> projector() const {
    return BasicOperator<Scalar>(shape_, amplitudes_ * amplitudes_.adjoint());
  }

 private:
  SubsystemShape shape_;
  VectorType amplitudes_;
};

using Operator = BasicOperator<cplx>;
using Ket = BasicKet<cplx>;

template <typename Scalar>
BasicOperator<Scalar> tensor(const BasicOperator<Scalar>& a, const BasicOperator<Scalar>& b) {
  typename BasicOperator<Scalar>::MatrixType m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return BasicOperator<Scalar>(a.shape().concat(b.shape()), std::move(m));
}

template <typename Scalar>
BasicKet<Scalar> tensor(const BasicKet<Scalar>& a, const BasicKet<Scalar>& b) {
  typename BasicKet<Scalar>::VectorType v = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return BasicKet<Scalar>(a.shape().concat(b.shape()), std::move(v));
}

/// a^{(x) count}
template <typename Scalar>
BasicOperator<Scalar> tensor_power(const BasicOperator<Scalar>& a, int count) {
  if (count < 1) throw ValidationError("tensor_power: count must be >= 1");
  BasicOperator<Scalar> out = a;
  for (int k = 1; k < count; ++k) out = tensor(out, a);
  return out;
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in
/// their original order regardless of the order given.
template <typename Scalar>
BasicOperator<Scalar> partial_trace(const BasicOperator<Scalar>& a, std::span<const int> keep) {
  const SubsystemShape& shape = a.shape();
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw ValidationError("partial_trace: duplicate subsystem index");
  for (int k : kept)
    if (k < 0 || k >= shape.count())
      throw ValidationError("partial_trace: subsystem index " + std::to_string(k) + " out of range");
  if (kept.empty()) throw ValidationError("partial_trace: keep set must be non-empty");

  std::vector<int> traced;
  for (int k = 0; k < shape.count(); ++k)
    if (!std::binary_search(kept.begin(), kept.end(), k)) traced.push_back(k);

  const auto kept_off = detail::subset_offsets(shape, kept);
  const auto traced_off = detail::subset_offsets(shape, traced);
  const Index n = static_cast<Index>(kept_off.size());
  const auto& m = a.matrix();

  typename BasicOperator<Scalar>::MatrixType out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      Scalar acc(0);
      for (Index t : traced_off) acc += m(kept_off[i] + t, kept_off[j] + t);
      out(i, j) = acc;
    }
  }
  return BasicOperator<Scalar>(shape.select(kept), std::move(out));
}

template <typename Scalar>
BasicOperator<Scalar> partial_trace(const BasicOperator<Scalar>& a, std::initializer_list<int> keep) {
  return partial_trace(a, std::span<const int>(keep.begin(), keep.size()));
}

namespace detail {
inline void check_permutation(std::span<const int> perm, int count) {
  if (static_cast<int>(perm.size()) != count)
    throw ValidationError("permute_subsystems: permutation has " + std::to_string(perm.size()) +
                          " entries for " + std::to_string(count) + " subsystems");
  std::vector<int> sorted(perm.begin(), perm.end());
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < count; ++k)
    if (sorted[k] != k) throw ValidationError("permute_subsystems: not a permutation");
}
}  // namespace detail

/// Relabels subsystems: position k of the result holds input subsystem perm[k].
template <typename Scalar>
BasicOperator<Scalar> permute_subsystems(const BasicOperator<Scalar>& a, std::span<const int> perm) {
  detail::check_permutation(perm, a.shape().count());
  const auto off = detail::subset_offsets(a.shape(), perm);
  const Index n = a.dimension();
  const auto& m = a.matrix();
  typename BasicOperator<Scalar>::MatrixType out(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) out(i, j) = m(off[i], off[j]);
  return BasicOperator<Scalar>(a.shape().select(perm), std::move(out));
}

template <typename Scalar>
BasicOperator<Scalar> permute_subsystems(const BasicOperator<Scalar>& a, std::initializer_list<int> perm) {
  return permute_subsystems(a, std::span<const int>(perm.begin(), perm.size()));
}

template <typename Scalar>
BasicKet<Scalar> permute_subsystems(const BasicKet<Scalar>& a, std::span<const int> perm) {
  detail::check_permutation(perm, a.shape().count());
  const auto off = detail::subset_offsets(a.shape(), perm);
  typename BasicKet<Scalar>::VectorType out(a.amplitudes().size());
  for (Index i = 0; i < out.size(); ++i) out(i) = a.amplitudes()(off[i]);
  return BasicKet<Scalar>(a.shape().select(perm), std::move(out));
}

template <typename Scalar>
BasicKet<Scalar> permute_subsystems(const BasicKet<Scalar>& a, std::initializer_list<int> perm) {
  return permute_subsystems(a, std::span<const int>(perm.begin(), perm.size()));
}

/// max_ij |a - a^dagger|
template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.rows() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

template <typename Scalar>
struct BasicEigenDecomposition {
  Eigen::VectorXd values;  // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // orthonormal columns
};

/// Hermitian eigendecomposition. Inputs within kHermitianTol of Hermitian are
/// symmetrized first; anything further off throws.
template <typename Derived>
BasicEigenDecomposition<typename Derived::Scalar> eigh(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.rows() != a.cols()) throw ValidationError("eigh: matrix must be square");
  const double herr = hermiticity_error(a);
  if (!(herr <= kHermitianTol))
    throw ValidationError("eigh: input is not Hermitian (max |a - a^dagger| = " + std::to_string(herr) + ")");
  const MatrixType sym = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatrixType> solver(sym);
  if (solver.info() != Eigen::Success) throw ConsistencyError("eigh: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Scalar>
BasicEigenDecomposition<Scalar> eigh(const BasicOperator<Scalar>& a) {
  return eigh(a.matrix());
}

template <typename Scalar>
struct BasicPseudoInverseRoot {
  BasicOperator<Scalar> inv_sqrt;  // S^{-1/2} on the support, 0 on the kernel
  BasicOperator<Scalar> support;   // projector onto the support
  int rank = 0;
};

/// Default rank threshold: dim * 1e-12 * largest eigenvalue.
inline double default_kernel_tol(Index dim, double largest_eigenvalue) {
  return static_cast<double>(dim) * 1e-12 * std::max(largest_eigenvalue, 0.0);
}

/// Pseudo-inverse square root of a PSD operator together with its support
/// projector. Pass kernel_tol < 0 for the scale-invariant default.
template <typename Scalar>
BasicPseudoInverseRoot<Scalar> pinv_sqrt_with_support(const BasicOperator<Scalar>& a, double kernel_tol = -1.0) {
  using MatrixType = typename BasicOperator<Scalar>::MatrixType;
  const auto dec = eigh(a);
  const Index n = a.dimension();
  if (n > 0 && dec.values(0) < kNegativeEigenTol)
    throw ValidationError("op_pinv_sqrt: operator is not positive semidefinite (min eigenvalue " +
                          std::to_string(dec.values(0)) + ")");
  const double tol = kernel_tol >= 0 ? kernel_tol : default_kernel_tol(n, n > 0 ? dec.values(n - 1) : 0.0);

  Eigen::VectorXd root = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(n);
  int rank = 0;
  for (Index k = 0; k < n; ++k) {
    if (dec.values(k) > tol) {
      root(k) = 1.0 / std::sqrt(dec.values(k));
      mask(k) = 1.0;
      ++rank;
    }
  }
  const MatrixType& v = dec.vectors;
  MatrixType inv_sqrt = v * root.cast<Scalar>().asDiagonal() * v.adjoint();
  MatrixType support = v * mask.cast<Scalar>().asDiagonal() * v.adjoint();
  return {BasicOperator<Scalar>(a.shape(), std::move(inv_sqrt)), BasicOperator<Scalar>(a.shape(), std::move(support)),
          rank};
}

/// Eigenvalues <= kernel_tol map to 0, the rest to lambda^{-1/2}.
template <typename Scalar>
BasicOperator<Scalar> op_pinv_sqrt(const BasicOperator<Scalar>& a, double kernel_tol = -1.0) {
  return pinv_sqrt_with_support(a, kernel_tol).inv_sqrt;
}

/// Principal square root of a PSD operator; tiny negative eigenvalues are clipped.
template <typename Scalar>
BasicOperator<Scalar> op_sqrt(const BasicOperator<Scalar>& a) {
  using MatrixType = typename BasicOperator<Scalar>::MatrixType;
  const auto dec = eigh(a);
  if (a.dimension() > 0 && dec.values(0) < kNegativeEigenTol)
    throw ValidationError("op_sqrt: operator is not positive semidefinite");
  const Eigen::VectorXd root = dec.values.cwiseMax(0.0).cwiseSqrt();
  MatrixType out = dec.vectors * root.cast<Scalar>().asDiagonal() * dec.vectors.adjoint();
  return BasicOperator<Scalar>(a.shape(), std::move(out));
}

/// Ambient-dimension cap for dense storage. Defaults to 4096; override with
/// the PBTLAB_DIM_CAP environment variable.
std::int64_t dimension_cap();

/// Throws DimensionCapError when `requested` exceeds dimension_cap().
void check_dimension_cap(std::int64_t requested, const std::string& what);

/// Integer power with overflow saturation at INT64_MAX.
std::int64_t checked_pow(std::int64_t base, int exponent);

}  // namespace pbtlab
