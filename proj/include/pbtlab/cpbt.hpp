#pragma once

// Controlled port-based teleportation over three-party pure states: a
// controller measures one party and the remaining pair feeds M-port PBT.

#include <array>
#include <string>
#include <vector>

#include "pbtlab/fidelity.hpp"
#include "pbtlab/quantum_states.hpp"

namespace pbtlab {

enum class Party { A = 0, B = 1, C = 2 };

inline constexpr std::array<Party, 3> kAllParties{Party::A, Party::B, Party::C};

char party_label(Party party);
Party parse_party(const std::string& label);

/// Normalized pure state on three qudits (A, B, C) of equal dimension.
class TripartiteState {
 public:
  explicit TripartiteState(Ket ket);

  const Ket& ket() const noexcept { return ket_; }
  int d() const noexcept { return ket_.shape()[0]; }

 private:
  Ket ket_;
};

/// Rank-1 projective measurement on one qudit.
class ProjectiveMeasurement {
 public:
  /// Columns of `basis` are the measurement vectors; must be orthonormal within 1e-10.
  explicit ProjectiveMeasurement(Eigen::MatrixXcd basis);

  /// Qubit basis {cos(t/2)|0> + e^{i f} sin(t/2)|1>, its orthogonal complement}.
  static ProjectiveMeasurement qubit(double theta, double phi);
  static ProjectiveMeasurement computational(int d);

  const Eigen::MatrixXcd& basis() const noexcept { return basis_; }
  int outcomes() const noexcept { return static_cast<int>(basis_.cols()); }

 private:
  Eigen::MatrixXcd basis_;
};

/// a|000> + b|111>
TripartiteState ghz_extended(double a, double b);

/// w0|000> + w1|100> + w2|101> + w3|110>
TripartiteState w_class(double w0, double w1, double w2, double w3);

struct OutcomePair {
  double probability;
  DensityOperator pair;  // on the two other parties, in A, B, C order
};

/// Outcome `outcome` of `measurement` on `party`. Zero-probability outcomes
/// return probability 0 and the maximally mixed pair.
OutcomePair post_measurement_pair(const TripartiteState& state, Party party,
                                  const ProjectiveMeasurement& measurement, int outcome);

/// State of the two parties other than `party`, without any measurement.
DensityOperator reduced_pair(const TripartiteState& state, Party party);

/// sum_i p_i FT(Lambda_{rho_i}) for a fixed controller measurement.
double controlled_teleportation_fidelity(const TripartiteState& state, Party party,
                                         const ProjectiveMeasurement& measurement);

/// FT(Lambda_{rho_pair}) with no controller assistance.
double uncontrolled_teleportation_fidelity(const TripartiteState& state, Party party);

struct CtOptimizerOptions {
  int theta_steps = 181;
  int phi_steps = 361;
  int restarts = 10;
  double tol = 1e-9;
  int max_iter = 2000;
};

struct OptimizerTrace {
  int grid_points = 0;
  int restarts = 0;
  int iterations = 0;  // simplex iterations summed over restarts
  bool converged = false;
};

struct MaxCtResult {
  double value;
  ProjectiveMeasurement best;
  double theta;
  double phi;
  OptimizerTrace trace;
};

/// Maximal controlled-teleportation fidelity over qubit projective
/// measurements: angular grid, then simplex refinement from the best cells.
MaxCtResult max_ct_fidelity(const TripartiteState& state, Party party, const CtOptimizerOptions& options = {});

/// Leading terms: f_ct (1 - d^2/4M) + d/4M.
double controlled_pbt_fidelity(double max_ct, int ports, int d);

double cpbt_fidelity(const TripartiteState& state, Party party, int ports, const CtOptimizerOptions& options = {});

struct ControlPowerReport {
  Party party;
  int ports;
  double f_ct;       // maximal CT fidelity
  double f_nc;       // FT of the unmeasured pair
  double f_ct_M;     // maximal CPBT fidelity at M
  double f_nc_M;     // uncontrolled PBT fidelity at M
  double power_M;    // f_ct_M - f_nc_M
  double power_scaled;  // (f_ct - f_nc)(1 - d^2/4M)
  OptimizerTrace trace;
};

ControlPowerReport control_power(const TripartiteState& state, Party party, int ports,
                                 const CtOptimizerOptions& options = {});

/// Minimum over the three choices of controller; ties go to A, then B, then C.
ControlPowerReport minimal_control_power(const TripartiteState& state, int ports,
                                         const CtOptimizerOptions& options = {});

}  // namespace pbtlab
