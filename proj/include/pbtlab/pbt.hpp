#pragma once

// Exact port-based teleportation for small port counts, plus the closed-form
// and leading-order fidelity expressions it is checked against.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pbtlab/fidelity.hpp"
#include "pbtlab/quantum_states.hpp"

namespace pbtlab {

struct MaxEntangledResource {};
struct IsotropicResource {
  double p;
};
struct CustomResource {
  DensityOperator state;
};
using Resource = std::variant<MaxEntangledResource, IsotropicResource, CustomResource>;

/// Which ensemble the pretty good measurement is built from.
enum class MeasurementDesign {
  /// Ideal maximally entangled port states (conjugated by O): the standard
  /// protocol run on whatever resource is actually shared.
  Standard,
  /// Port states of the resource actually shared.
  ResourceMatched,
};

class PBTSetup {
 public:
  /// Throws ValidationError on bad parameters and DimensionCapError when
  /// d^(M+1) exceeds the dimension cap.
  PBTSetup(int d, int ports, Resource resource, std::optional<Eigen::MatrixXcd> alice_op = std::nullopt,
           MeasurementDesign design = MeasurementDesign::Standard);

  int d() const noexcept { return d_; }
  int ports() const noexcept { return ports_; }
  const Resource& resource() const noexcept { return resource_; }
  const std::optional<Eigen::MatrixXcd>& alice_op() const noexcept { return alice_op_; }
  MeasurementDesign design() const noexcept { return design_; }

  /// The single-port bipartite resource on {d, d}.
  DensityOperator resource_state() const;
  bool symmetric_resource() const { return !alice_op_.has_value(); }

  /// Same ports, operation and design with a different resource.
  PBTSetup with_resource(Resource resource) const;

 private:
  int d_;
  int ports_;
  Resource resource_;
  std::optional<Eigen::MatrixXcd> alice_op_;
  MeasurementDesign design_;
};

/// sigma^(t) on (A_1, ..., A_M, B), t = 0..M-1.
struct PortStates {
  std::vector<Operator> sigmas;
};

struct POVM {
  std::vector<Operator> elements;
};

/// Leading terms of a large-M expansion; the O(M^{-3/2+eps}) remainder is
/// not evaluated.
struct AsymptoticEstimate {
  double leading_value;
  double correction;
  std::string order_note = "O(M^{-3/2+eps}) remainder not evaluated";

  double raw() const { return leading_value + correction; }
  /// raw() clamped to [0, 1]; the expansion leaves that range for M ~ 1.
  double value() const { return std::clamp(raw(), 0.0, 1.0); }
};

/// Port states from the product structure: sigma^(t) = rho_{A_t B} (x) rho_A^{(x)(M-1)}.
PortStates port_states(const PBTSetup& setup);

/// Literal construction: build rho^{(x)M}, trace out every Bob port but t and
/// relabel. Needs d^(2M) within the dimension cap.
PortStates port_states_bruteforce(const PBTSetup& setup);

/// (1/d^{M-1}) Phi+_{A_t B} (x) 1 on the other Alice ports.
Operator max_entangled_port_state(int d, int ports, int t);

/// Binomial-sum closed form of the isotropic-resource port state.
Operator isotropic_port_state(int d, int ports, double p, int t);

/// eta_t = (O (x) 1) sigma^(t) (O^dagger (x) 1) for the measurement design
/// (`measurement == true`) or for the resource actually shared.
std::vector<Operator> conjugated_port_states(const PBTSetup& setup, bool measurement);

/// Pretty good measurement S^{-1/2} eta_t S^{-1/2} + (1/M)(1 - P_supp(S)).
POVM pretty_good_measurement(const std::vector<Operator>& ensemble);

POVM pgm(const PBTSetup& setup);

/// Tr Pi_t eta_t for every port t.
std::vector<double> port_success_terms(const PBTSetup& setup);

/// (1/d^2) sum_t Tr Pi_t eta_t
double pbt_entanglement_fidelity(const PBTSetup& setup);

/// Full channel via sqrt(Pi_t) acting on (Alice ports, input). Needs
/// d^(2M+2) within the dimension cap.
QuantumChannelChoi pbt_channel_choi(const PBTSetup& setup);

/// 1 - (d^2 - 1)/4M
AsymptoticEstimate asymptotic_F(int ports, int d);

/// 1 - d(d - 1)/4M
AsymptoticEstimate asymptotic_FT(int ports, int d);

/// Exact fidelity over depolarized ports: p F_ideal + (1 - p)/d^2.
double depolarized_resource_F(double p, double ideal_fidelity, int d);

/// (d^2 p F_ideal + d + 1 - p) / (d(d + 1))
double depolarized_resource_FT(double p, double ideal_fidelity, int d);

/// p FT_ideal + (1 - p)/d, the same quantity from the ideal teleportation fidelity.
double depolarized_resource_FT_from_FT(double p, double ideal_teleportation_fidelity, int d);

/// f(rho_p) - p(d^2 - 1)/4M
AsymptoticEstimate isotropic_asymptotic_F(double p, int ports, int d);

/// FT(Lambda_{rho_p}) - p d(d - 1)/4M
AsymptoticEstimate isotropic_asymptotic_FT(double p, int ports, int d);

/// f (1 - d^2/4M) + 1/4M for a resource with fully entangled fraction f.
AsymptoticEstimate mixed_resource_asymptotic_F(double fef, int ports, int d);

/// FT(Lambda_rho)(1 - d^2/4M) + d/4M with FT(Lambda_rho) = (d f + 1)/(d + 1).
AsymptoticEstimate mixed_resource_asymptotic_FT(double fef, int ports, int d);

/// (1 + (d^2 - 1) p)/d^2
double isotropic_fef(double p, int d);

}  // namespace pbtlab
