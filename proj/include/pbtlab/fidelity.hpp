#pragma once

#include <cstdint>

#include "pbtlab/quantum_states.hpp"

namespace pbtlab {

struct FidelityReport {
  double entanglement_fidelity;
  double teleportation_fidelity;
  int d;
};

FidelityReport make_fidelity_report(double entanglement_fidelity, int d);

/// Fully entangled fraction and a local unitary U with |e> = (U (x) 1)|Phi+>.
struct FEFResult {
  double value = 0.0;
  Eigen::MatrixXcd maximizer;
  bool converged = false;
  int iterations = 0;
};

struct FefOptions {
  int starts = 20;
  double tol = 1e-12;
  int max_iter = 20000;
  std::uint64_t seed = 0;
};

struct MonteCarloEstimate {
  double estimate;
  double standard_error;
};

/// <Phi+| J |Phi+>, clamped to [0, 1].
double entanglement_fidelity(const QuantumChannelChoi& channel);

/// (dF + 1)/(d + 1).
double teleportation_fidelity_from_F(double entanglement_fidelity, int d);

/// Haar average of <psi|Lambda(psi)|psi>.
MonteCarloEstimate mc_teleportation_fidelity(const QuantumChannelChoi& channel, std::int64_t samples,
                                             std::uint64_t seed);

/// <Phi+| (U^dagger (x) 1) rho (U (x) 1) |Phi+>
double max_entangled_overlap(const DensityOperator& rho, const Eigen::MatrixXcd& local_unitary);

/// Two-qubit closed form: top eigenvalue of Re(Q^dagger rho Q) in the magic basis Q.
FEFResult fef_qubit_magic(const DensityOperator& rho);

/// Multi-start ascent over U in U(d). Each step moves to the unitary polar
/// factor of the gradient, which never decreases the (convex) objective.
FEFResult fef_iterative(const DensityOperator& rho, const FefOptions& options = {});

/// Closed form for two qubits, fef_iterative otherwise.
FEFResult fully_entangled_fraction(const DensityOperator& rho);

/// f(rho) > 1/d, i.e. beats the classical teleportation bound 2/(d+1).
bool is_meaningful(const DensityOperator& rho);

/// Local dimension d of a state on {d, d}; throws otherwise.
int bipartite_local_dimension(const DensityOperator& rho);

}  // namespace pbtlab
