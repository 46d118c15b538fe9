#include "pbtlab/quantum_states.hpp"

#include <numbers>

#include "pbtlab/fidelity.hpp"

namespace pbtlab {

std::optional<std::string> density_violation(const Operator& op) {
  const auto& m = op.matrix();
  const double herr = hermiticity_error(m);
  if (!(herr <= kHermitianTol)) return "not Hermitian (max |rho - rho^dagger| = " + std::to_string(herr) + ")";
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) return "trace is " + std::to_string(tr) + ", expected 1";
  const auto dec = eigh(m);
  if (dec.values.size() > 0 && dec.values(0) < kNegativeEigenTol)
    return "not positive semidefinite (min eigenvalue " + std::to_string(dec.values(0)) + ")";
  return std::nullopt;
}

DensityOperator::DensityOperator(const Operator& op) {
  if (auto why = density_violation(op)) throw ValidationError("DensityOperator: " + *why);
  op_ = Operator(op.shape(), (op.matrix() + op.matrix().adjoint()) / 2.0);
}

DensityOperator DensityOperator::from_ket(const Ket& ket) {
  if (!ket.is_normalized(1e-10)) throw ValidationError("DensityOperator: ket is not normalized");
  return DensityOperator(ket.projector());
}

DensityOperator DensityOperator::maximally_mixed(const SubsystemShape& shape) {
  const Index n = shape.dimension();
  return DensityOperator(Operator(shape, Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n)));
}

QuantumChannelChoi::QuantumChannelChoi(DensityOperator choi) : choi_(std::move(choi)), d_(0) {
  const auto& dims = choi_.shape().dims();
  if (dims.size() != 2 || dims[0] != dims[1])
    throw ValidationError("QuantumChannelChoi: Choi state must live on {d, d}");
  d_ = dims[0];
  const auto marginal = partial_trace(choi_.op(), {1});
  const Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(d_, d_) / static_cast<double>(d_);
  const double err = max_abs(marginal.matrix() - target);
  if (err > kChoiMarginalTol)
    throw ValidationError("QuantumChannelChoi: channel is not trace preserving (reference marginal off by " +
                          std::to_string(err) + ")");
}

void IsotropicParam::validate() const {
  if (d < 2) throw ValidationError("IsotropicParam: d must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("IsotropicParam: p must lie in [0, 1], got " + std::to_string(p));
}

Ket max_entangled(int d) {
  if (d < 2) throw ValidationError("max_entangled: d must be >= 2");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) v(i * d + i) = amp;
  return Ket(SubsystemShape{d, d}, std::move(v));
}

Eigen::MatrixXcd weyl_operator(int d, int m, int n) {
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d, d);
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    x((j + m) % d, j) = 1.0;
    z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * n * j / d);
  }
  return x * z;
}

DensityOperator depolarizing_apply(const DensityOperator& rho, double p) {
  if (rho.shape().count() != 1) throw ValidationError("depolarizing_apply: expects a single-subsystem state");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("depolarizing_apply: p must lie in [0, 1]");
  const Index d = rho.dimension();
  Eigen::MatrixXcd out = p * rho.matrix() + (1.0 - p) * Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
  return DensityOperator(Operator(rho.shape(), std::move(out)));
}

DensityOperator isotropic_state(const IsotropicParam& param) {
  param.validate();
  const int d = param.d;
  const double d2 = static_cast<double>(d) * d;
  Eigen::MatrixXcd out = param.p * max_entangled(d).projector().matrix() +
                         (1.0 - param.p) * Eigen::MatrixXcd::Identity(d * d, d * d) / d2;
  return DensityOperator(Operator(SubsystemShape{d, d}, std::move(out)));
}

DensityOperator isotropic_state_channel_form(const IsotropicParam& param) {
  param.validate();
  const int d = param.d;
  // (D_p (x) id)(X) = p X + (1-p) (I/d) (x) Tr_A X
  const Operator phi = max_entangled(d).projector();
  const Operator bob = partial_trace(phi, {1});
  const Operator mixed(SubsystemShape{d}, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
  Eigen::MatrixXcd out = param.p * phi.matrix() + (1.0 - param.p) * tensor(mixed, bob).matrix();
  return DensityOperator(Operator(SubsystemShape{d, d}, std::move(out)));
}

IsotropicParam twirl_to_isotropic(const DensityOperator& rho) {
  const int d = bipartite_local_dimension(rho);
  const double d2 = static_cast<double>(d) * d;
  const FEFResult fef = fully_entangled_fraction(rho);
  if (fef.value < 1.0 / d2 - 1e-9)
    throw ConsistencyError("twirl_to_isotropic: fully entangled fraction " + std::to_string(fef.value) +
                           " is below 1/d^2");
  const double p = (d2 * fef.value - 1.0) / (d2 - 1.0);
  return IsotropicParam{std::clamp(p, 0.0, 1.0), d};
}

Ket haar_ket(int d, Rng& rng) {
  if (d < 2) throw ValidationError("haar_ket: d must be >= 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(d);
  for (int i = 0; i < d; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = cplx(re, im);
  }
  v.normalize();
  return Ket(SubsystemShape{d}, std::move(v));
}

Ket haar_ket(int d, std::uint64_t seed) {
  Rng rng(seed);
  return haar_ket(d, rng);
}

namespace {
Eigen::MatrixXcd ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}
}  // namespace

Eigen::MatrixXcd haar_unitary(int d, Rng& rng) {
  const Eigen::MatrixXcd g = ginibre(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const cplx diag = r(k, k);
    const double mag = std::abs(diag);
    if (mag > 0) q.col(k) *= diag / mag;
  }
  return q;
}

DensityOperator random_density_operator(const SubsystemShape& shape, Rng& rng) {
  const Index n = shape.dimension();
  const Eigen::MatrixXcd g = ginibre(n, n, rng);
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(Operator(shape, std::move(rho)));
}

QuantumChannelChoi identity_channel_choi(int d) {
  return QuantumChannelChoi(DensityOperator::from_ket(max_entangled(d)));
}

QuantumChannelChoi fully_depolarizing_choi(int d) {
  return QuantumChannelChoi(DensityOperator::maximally_mixed(SubsystemShape{d, d}));
}

Eigen::MatrixXcd apply_channel(const QuantumChannelChoi& channel, const Eigen::MatrixXcd& input) {
  const int d = channel.d();
  if (input.rows() != d || input.cols() != d) throw ValidationError("apply_channel: input has the wrong dimension");
  // (Lambda(X))_{ab} = d sum_{ij} J_{(a,i),(b,j)} X_{ij}
  const auto& j = channel.choi().matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      cplx acc = 0.0;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) acc += j(a * d + r, b * d + c) * input(r, c);
      out(a, b) = static_cast<double>(d) * acc;
    }
  return out;
}

QuantumChannelChoi standard_teleportation_choi(const DensityOperator& rho) {
  const int d = bipartite_local_dimension(rho);
  const FEFResult fef = fully_entangled_fraction(rho);

  // Rotate Alice's half so the maximizing maximally entangled state is Phi+.
  const Eigen::MatrixXcd align = Eigen::kroneckerProduct(fef.maximizer.adjoint(), Eigen::MatrixXcd::Identity(d, d));
  const Operator aligned(rho.shape(), align * rho.matrix() * align.adjoint());

  // Input T maximally entangled with reference D; subsystem order (T, A, B, D).
  const Operator input = max_entangled(d).projector();
  const Operator joint = permute_subsystems(tensor(input, aligned), {0, 2, 3, 1});

  const Eigen::VectorXcd phi = max_entangled(d).amplitudes();
  const Eigen::MatrixXcd id_d = Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      const Eigen::MatrixXcd w = weyl_operator(d, m, n);
      const Eigen::VectorXcd bell = Eigen::kroneckerProduct(w, id_d) * phi;
      // K = W_B (<Phi_mn|_{TA} (x) 1_B), extended by 1_D.
      const Eigen::MatrixXcd project = Eigen::kroneckerProduct(Eigen::MatrixXcd(bell.adjoint()), id_d);
      const Eigen::MatrixXcd kraus = Eigen::kroneckerProduct(Eigen::MatrixXcd(w * project), id_d);
      out += kraus * joint.matrix() * kraus.adjoint();
    }
  }
  return QuantumChannelChoi(DensityOperator(Operator(SubsystemShape{d, d}, std::move(out))));
}

}  // namespace pbtlab
