#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "pbtlab/tensor_core.hpp"

namespace pbtlab {

inline constexpr double kTraceTol = 1e-10;
inline constexpr double kChoiMarginalTol = 1e-9;

using Rng = std::mt19937_64;

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator {
 public:
  /// Validates and symmetrizes `op`; throws ValidationError naming the
  /// invariant that failed.
  explicit DensityOperator(const Operator& op);

  static DensityOperator from_ket(const Ket& ket);
  static DensityOperator maximally_mixed(const SubsystemShape& shape);

  const Operator& op() const noexcept { return op_; }
  const SubsystemShape& shape() const noexcept { return op_.shape(); }
  const Eigen::MatrixXcd& matrix() const noexcept { return op_.matrix(); }
  Index dimension() const noexcept { return op_.dimension(); }

 private:
  Operator op_;
};

/// Returns a description of the first violated density-operator invariant, if any.
std::optional<std::string> density_violation(const Operator& op);

/// Channel stored as its normalized Choi state on (output, reference).
class QuantumChannelChoi {
 public:
  /// Throws ValidationError unless `choi` is on {d, d} and its reference
  /// marginal is I/d within 1e-9.
  explicit QuantumChannelChoi(DensityOperator choi);

  const DensityOperator& choi() const noexcept { return choi_; }
  int d() const noexcept { return d_; }

 private:
  DensityOperator choi_;
  int d_;
};

struct IsotropicParam {
  double p;
  int d;

  void validate() const;
};

/// (1/sqrt d) sum_i |ii>
Ket max_entangled(int d);

/// Generalized Pauli X^m Z^n with X|j> = |j+1 mod d>, Z|j> = w^j |j>.
Eigen::MatrixXcd weyl_operator(int d, int m, int n);

/// (1-p) I/d + p rho on a single qudit.
DensityOperator depolarizing_apply(const DensityOperator& rho, double p);

/// p Phi+ + (1-p) I/d^2.
DensityOperator isotropic_state(const IsotropicParam& param);

/// (D_p (x) id)(Phi+), the same state built by acting on Alice's half.
DensityOperator isotropic_state_channel_form(const IsotropicParam& param);

/// Parameter p of the isotropic state sharing rho's fully entangled fraction,
/// p = (d^2 f - 1)/(d^2 - 1).
IsotropicParam twirl_to_isotropic(const DensityOperator& rho);

/// Haar-random pure state from normalized complex Gaussian amplitudes.
Ket haar_ket(int d, Rng& rng);
Ket haar_ket(int d, std::uint64_t seed);

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
Eigen::MatrixXcd haar_unitary(int d, Rng& rng);

/// Hilbert-Schmidt random mixed state G G^dagger / Tr(G G^dagger).
DensityOperator random_density_operator(const SubsystemShape& shape, Rng& rng);

/// Identity channel: Choi = Phi+.
QuantumChannelChoi identity_channel_choi(int d);

/// Completely depolarizing channel: Choi = I/d^2.
QuantumChannelChoi fully_depolarizing_choi(int d);

/// Lambda(X) = d Tr_ref[ J (1 (x) X^T) ] for a single-qudit input X.
Eigen::MatrixXcd apply_channel(const QuantumChannelChoi& channel, const Eigen::MatrixXcd& input);

/// Standard teleportation over `rho`: Alice's half is rotated so the fully
/// entangled fraction is attained at Phi+, then generalized Bell measurement
/// on (input, Alice) and Weyl correction on Bob.
QuantumChannelChoi standard_teleportation_choi(const DensityOperator& rho);

}  // namespace pbtlab
