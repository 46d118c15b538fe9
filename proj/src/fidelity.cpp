#include "pbtlab/fidelity.hpp"

#include <cmath>

namespace pbtlab {

namespace {

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

// u_{a d + i} = U_{ai}, so (U (x) 1)|Phi+> = u / sqrt(d).
Eigen::VectorXcd flatten_row_major(const Eigen::MatrixXcd& u) {
  const Index d = u.rows();
  Eigen::VectorXcd v(d * d);
  for (Index a = 0; a < d; ++a)
    for (Index i = 0; i < d; ++i) v(a * d + i) = u(a, i);
  return v;
}

Eigen::MatrixXcd unflatten_row_major(const Eigen::VectorXcd& v, Index d) {
  Eigen::MatrixXcd u(d, d);
  for (Index a = 0; a < d; ++a)
    for (Index i = 0; i < d; ++i) u(a, i) = v(a * d + i);
  return u;
}

Eigen::MatrixXcd polar_factor(const Eigen::MatrixXcd& g) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double overlap(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& u) {
  const Eigen::VectorXcd v = flatten_row_major(u);
  return (v.adjoint() * rho * v)(0, 0).real() / static_cast<double>(u.rows());
}

struct AscentRun {
  Eigen::MatrixXcd unitary;
  double value;
  int iterations;
  bool converged;
};

AscentRun ascend(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd u, const FefOptions& options) {
  const Index d = u.rows();
  double value = overlap(rho, u);
  double prev_delta = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::MatrixXcd grad = unflatten_row_major(rho * flatten_row_major(u), d);
    Eigen::MatrixXcd next = polar_factor(grad);
    const double next_value = overlap(rho, next);
    // The step cannot decrease a convex objective beyond round-off.
    if (next_value <= value) return {u, value, it, true};
    const double delta = next_value - value;
    u = std::move(next);
    value = next_value;
    // Convergence is linear; bound the remaining gain by delta r / (1 - r).
    const double rate = prev_delta > 0.0 ? delta / prev_delta : 1.0;
    const double remaining = rate < 1.0 ? delta * rate / (1.0 - rate) : delta;
    if (delta <= options.tol && remaining <= options.tol) return {u, value, it, true};
    prev_delta = delta;
  }
  return {u, value, options.max_iter, false};
}

}  // namespace

int bipartite_local_dimension(const DensityOperator& rho) {
  const auto& dims = rho.shape().dims();
  if (dims.size() != 2 || dims[0] != dims[1])
    throw ValidationError("expected a bipartite state on {d, d}");
  return dims[0];
}

FidelityReport make_fidelity_report(double entanglement_fidelity, int d) {
  return {entanglement_fidelity, teleportation_fidelity_from_F(entanglement_fidelity, d), d};
}

double entanglement_fidelity(const QuantumChannelChoi& channel) {
  const Eigen::VectorXcd phi = max_entangled(channel.d()).amplitudes();
  return clamp_unit((phi.adjoint() * channel.choi().matrix() * phi)(0, 0).real());
}

double teleportation_fidelity_from_F(double entanglement_fidelity, int d) {
  if (d < 2) throw ValidationError("teleportation_fidelity_from_F: d must be >= 2");
  if (!(entanglement_fidelity >= 0.0 && entanglement_fidelity <= 1.0))
    throw ValidationError("teleportation_fidelity_from_F: F must lie in [0, 1], got " +
                          std::to_string(entanglement_fidelity));
  return (d * entanglement_fidelity + 1.0) / (d + 1.0);
}

MonteCarloEstimate mc_teleportation_fidelity(const QuantumChannelChoi& channel, std::int64_t samples,
                                             std::uint64_t seed) {
  if (samples < 1) throw ValidationError("mc_teleportation_fidelity: samples must be >= 1");
  const int d = channel.d();
  const auto& j = channel.choi().matrix();
  Rng rng(seed);
  // <psi|Lambda(psi)|psi> = d <psi, psi*| J |psi, psi*>
  double mean = 0.0;
  double m2 = 0.0;
  for (std::int64_t n = 1; n <= samples; ++n) {
    const Eigen::VectorXcd psi = haar_ket(d, rng).amplitudes();
    const Eigen::VectorXcd probe = Eigen::kroneckerProduct(psi, Eigen::VectorXcd(psi.conjugate()));
    const double x = d * (probe.adjoint() * j * probe)(0, 0).real();
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  const double variance = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  return {mean, std::sqrt(variance / static_cast<double>(samples))};
}

double max_entangled_overlap(const DensityOperator& rho, const Eigen::MatrixXcd& local_unitary) {
  const int d = bipartite_local_dimension(rho);
  if (local_unitary.rows() != d || local_unitary.cols() != d)
    throw ValidationError("max_entangled_overlap: unitary has the wrong dimension");
  return overlap(rho.matrix(), local_unitary);
}

FEFResult fef_qubit_magic(const DensityOperator& rho) {
  if (rho.shape() != SubsystemShape{2, 2}) throw ValidationError("fef_qubit_magic: expects a two-qubit state");
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  Eigen::Matrix4cd q = Eigen::Matrix4cd::Zero();
  q(0, 0) = s;      q(3, 0) = s;
  q(0, 1) = i * s;  q(3, 1) = -i * s;
  q(1, 2) = i * s;  q(2, 2) = i * s;
  q(1, 3) = s;      q(2, 3) = -s;
  const Eigen::Matrix4d real_part = (q.adjoint() * rho.matrix() * q).real();
  const Eigen::Matrix4d sym = (real_part + real_part.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(sym);
  const Eigen::Vector4cd e = q * solver.eigenvectors().col(3).cast<cplx>();

  FEFResult out;
  out.value = clamp_unit(solver.eigenvalues()(3));
  out.maximizer = std::sqrt(2.0) * unflatten_row_major(e, 2);
  out.converged = true;
  out.iterations = 0;
  return out;
}

FEFResult fef_iterative(const DensityOperator& rho, const FefOptions& options) {
  const int d = bipartite_local_dimension(rho);
  if (options.starts < 1 || options.max_iter < 1) throw ValidationError("fef_iterative: starts and max_iter must be >= 1");
  const Eigen::MatrixXcd& m = rho.matrix();

  // Starts: identity, the maximally entangled state nearest the top
  // eigenvector, then Haar-random unitaries.
  std::vector<Eigen::MatrixXcd> starts;
  starts.push_back(Eigen::MatrixXcd::Identity(d, d));
  if (options.starts > 1) {
    const auto dec = eigh(m);
    starts.push_back(polar_factor(unflatten_row_major(dec.vectors.col(d * d - 1), d)));
  }
  Rng rng(options.seed);
  while (static_cast<int>(starts.size()) < options.starts) starts.push_back(haar_unitary(d, rng));

  FEFResult best;
  best.value = -1.0;
  for (const auto& start : starts) {
    const AscentRun run = ascend(m, start, options);
    if (run.value > best.value) {
      best.value = run.value;
      best.maximizer = run.unitary;
      best.iterations = run.iterations;
      best.converged = run.converged;
    }
  }
  best.value = clamp_unit(best.value);
  return best;
}

FEFResult fully_entangled_fraction(const DensityOperator& rho) {
  const int d = bipartite_local_dimension(rho);
  return d == 2 ? fef_qubit_magic(rho) : fef_iterative(rho);
}

bool is_meaningful(const DensityOperator& rho) {
  const int d = bipartite_local_dimension(rho);
  return fully_entangled_fraction(rho).value > 1.0 / d + 1e-12;
}

}  // namespace pbtlab
