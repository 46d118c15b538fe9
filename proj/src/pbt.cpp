#include "pbtlab/pbt.hpp"

#include <cmath>
#include <numeric>

namespace pbtlab {

namespace {

void check_ports_and_dimension(int ports, int d) {
  if (ports < 1) throw ValidationError("port count M must be >= 1, got " + std::to_string(ports));
  if (d < 2) throw ValidationError("local dimension d must be >= 2, got " + std::to_string(d));
}

void check_probability(double p, const char* where) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(where) + ": p must lie in [0, 1]");
}

void check_fef(double fef, int d, const char* where) {
  const double lo = 1.0 / (static_cast<double>(d) * d);
  if (!(fef >= lo - 1e-12 && fef <= 1.0 + 1e-12))
    throw ValidationError(std::string(where) + ": fully entangled fraction must lie in [1/d^2, 1], got " +
                          std::to_string(fef));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Moves subsystem `from` to the last position, keeping the others in order.
std::vector<int> move_to_end(int count, int from) {
  std::vector<int> perm;
  for (int k = 0; k < count; ++k)
    if (k != from) perm.push_back(k);
  perm.push_back(from);
  return perm;
}

// Tensor of `ports` factors on (A_1, .., A_t, B, A_{t+1}, .., A_M) with `pair`
// at port t and `single` elsewhere, then B moved last.
Operator place_pair(const Operator& pair, const Operator& single, int ports, int t) {
  std::optional<Operator> acc;
  for (int s = 0; s < ports; ++s) {
    const Operator& factor = s == t ? pair : single;
    acc = acc ? tensor(*acc, factor) : factor;
  }
  const auto perm = move_to_end(ports + 1, t + 1);
  return permute_subsystems(*acc, perm);
}

Eigen::MatrixXcd alice_extended(const Eigen::MatrixXcd& op, int d) {
  return Eigen::kroneckerProduct(op, Eigen::MatrixXcd::Identity(d, d));
}

}  // namespace

PBTSetup::PBTSetup(int d, int ports, Resource resource, std::optional<Eigen::MatrixXcd> alice_op,
                   MeasurementDesign design)
    : d_(d), ports_(ports), resource_(std::move(resource)), alice_op_(std::move(alice_op)), design_(design) {
  check_ports_and_dimension(ports_, d_);
  if (const auto* iso = std::get_if<IsotropicResource>(&resource_)) check_probability(iso->p, "PBTSetup");
  if (const auto* custom = std::get_if<CustomResource>(&resource_)) {
    if (custom->state.shape() != SubsystemShape{d_, d_})
      throw ValidationError("PBTSetup: custom resource must be a state on {d, d}");
  }
  check_dimension_cap(checked_pow(d_, ports_ + 1), "PBTSetup (d^(M+1))");
  if (alice_op_) {
    const Index n = static_cast<Index>(checked_pow(d_, ports_));
    if (alice_op_->rows() != n || alice_op_->cols() != n)
      throw ValidationError("PBTSetup: Alice's operation must be " + std::to_string(n) + "x" + std::to_string(n));
    const double norm = alice_op_->squaredNorm();
    if (std::abs(norm - static_cast<double>(n)) > 1e-6 * static_cast<double>(n))
      throw ValidationError("PBTSetup: Alice's operation must satisfy Tr[O O^dagger] = d^M (got " +
                            std::to_string(norm) + ")");
    // The conjugated resource is a state only if Tr[O^dagger O rho_A^(x)M] = 1;
    // automatic when rho_A = I/d.
    if (const auto* custom = std::get_if<CustomResource>(&resource_)) {
      const Operator alice = partial_trace(custom->state.op(), {0});
      const Operator marginal = tensor_power(alice, ports_);
      const double weight = ((alice_op_->adjoint() * *alice_op_).cwiseProduct(marginal.matrix().transpose())).sum().real();
      if (std::abs(weight - 1.0) > 1e-6)
        throw ValidationError("PBTSetup: Alice's operation does not keep the custom resource normalized (Tr[O^dagger O rho_A^M] = " +
                              std::to_string(weight) + ")");
    }
  }
}

DensityOperator PBTSetup::resource_state() const {
  return std::visit(
      [this](const auto& r) -> DensityOperator {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, MaxEntangledResource>) {
          return DensityOperator::from_ket(max_entangled(d_));
        } else if constexpr (std::is_same_v<T, IsotropicResource>) {
          return isotropic_state({r.p, d_});
        } else {
          return r.state;
        }
      },
      resource_);
}

PBTSetup PBTSetup::with_resource(Resource resource) const {
  return PBTSetup(d_, ports_, std::move(resource), alice_op_, design_);
}

PortStates port_states(const PBTSetup& setup) {
  const int ports = setup.ports();
  const DensityOperator pair = setup.resource_state();
  const Operator alice = partial_trace(pair.op(), {0});
  PortStates out;
  out.sigmas.reserve(ports);
  for (int t = 0; t < ports; ++t) out.sigmas.push_back(place_pair(pair.op(), alice, ports, t));
  return out;
}

PortStates port_states_bruteforce(const PBTSetup& setup) {
  const int ports = setup.ports();
  check_dimension_cap(checked_pow(setup.d(), 2 * ports), "port_states_bruteforce (d^(2M))");
  const Operator full = tensor_power(setup.resource_state().op(), ports);  // A1 B1 A2 B2 ...
  PortStates out;
  for (int t = 0; t < ports; ++t) {
    std::vector<int> keep;
    for (int s = 0; s < ports; ++s) keep.push_back(2 * s);
    keep.push_back(2 * t + 1);
    const Operator reduced = partial_trace(full, keep);  // A1 .. A_t B_t A_{t+1} .. A_M
    const auto perm = move_to_end(ports + 1, t + 1);
    out.sigmas.push_back(permute_subsystems(reduced, perm));
  }
  return out;
}

Operator max_entangled_port_state(int d, int ports, int t) {
  check_ports_and_dimension(ports, d);
  if (t < 0 || t >= ports) throw ValidationError("max_entangled_port_state: port index out of range");
  const Operator phi = max_entangled(d).projector();
  const Operator id = Operator::identity(SubsystemShape{d});
  const Operator placed = place_pair(phi, id, ports, t);
  return Operator(placed.shape(), placed.matrix() / std::pow(static_cast<double>(d), ports - 1));
}

Operator isotropic_port_state(int d, int ports, double p, int t) {
  check_probability(p, "isotropic_port_state");
  const Operator entangled = max_entangled_port_state(d, ports, t);  // already carries 1/d^{M-1}
  const Index n = entangled.dimension();
  const double dm = static_cast<double>(d);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(n, n) / std::pow(dm, ports + 1);
  for (int r = 0; r <= ports; ++r) {
    const double weight = std::pow(p, ports - r) * std::pow(1.0 - p, r);
    out += weight * (binomial(ports - 1, r) * entangled.matrix() + binomial(ports - 1, r - 1) * mixed);
  }
  return Operator(entangled.shape(), std::move(out));
}

std::vector<Operator> conjugated_port_states(const PBTSetup& setup, bool measurement) {
  const int ports = setup.ports();
  std::vector<Operator> sigmas;
  if (measurement && setup.design() == MeasurementDesign::Standard) {
    for (int t = 0; t < ports; ++t) sigmas.push_back(max_entangled_port_state(setup.d(), ports, t));
  } else {
    sigmas = port_states(setup).sigmas;
  }
  if (!setup.alice_op()) return sigmas;
  const Eigen::MatrixXcd big = alice_extended(*setup.alice_op(), setup.d());
  for (auto& s : sigmas) s = Operator(s.shape(), big * s.matrix() * big.adjoint());
  return sigmas;
}

POVM pretty_good_measurement(const std::vector<Operator>& ensemble) {
  if (ensemble.empty()) throw ValidationError("pretty_good_measurement: empty ensemble");
  const SubsystemShape& shape = ensemble.front().shape();
  const Index n = ensemble.front().dimension();
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& e : ensemble) {
    if (e.shape() != shape) throw ValidationError("pretty_good_measurement: ensemble shapes differ");
    total += e.matrix();
  }
  const auto root = pinv_sqrt_with_support(Operator(shape, std::move(total)));
  const Eigen::MatrixXcd completion =
      (Eigen::MatrixXcd::Identity(n, n) - root.support.matrix()) / static_cast<double>(ensemble.size());
  POVM out;
  out.elements.reserve(ensemble.size());
  for (const auto& e : ensemble) {
    Eigen::MatrixXcd el = root.inv_sqrt.matrix() * e.matrix() * root.inv_sqrt.matrix() + completion;
    out.elements.emplace_back(shape, (el + el.adjoint()) / 2.0);
  }
  return out;
}

POVM pgm(const PBTSetup& setup) { return pretty_good_measurement(conjugated_port_states(setup, true)); }

std::vector<double> port_success_terms(const PBTSetup& setup) {
  const POVM povm = pgm(setup);
  const auto actual = conjugated_port_states(setup, false);
  std::vector<double> terms;
  terms.reserve(actual.size());
  for (std::size_t t = 0; t < actual.size(); ++t) {
    // Tr(A B) without forming the product.
    const double tr = (povm.elements[t].matrix().transpose().cwiseProduct(actual[t].matrix())).sum().real();
    terms.push_back(tr);
  }
  return terms;
}

double pbt_entanglement_fidelity(const PBTSetup& setup) {
  const auto terms = port_success_terms(setup);
  const double d2 = static_cast<double>(setup.d()) * setup.d();
  return std::clamp(std::accumulate(terms.begin(), terms.end(), 0.0) / d2, 0.0, 1.0);
}

QuantumChannelChoi pbt_channel_choi(const PBTSetup& setup) {
  const int d = setup.d();
  const int ports = setup.ports();
  check_dimension_cap(checked_pow(d, 2 * ports + 2), "pbt_channel_choi (d^(2M+1) * d)");
  const POVM povm = pgm(setup);
  const auto actual = conjugated_port_states(setup, false);
  const Operator input = max_entangled(d).projector();  // (T, D)

  // (A_1..A_M, B, T, D) -> (A_1..A_M, T, B, D)
  std::vector<int> perm(ports + 3);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[ports], perm[ports + 1]);
  const Eigen::MatrixXcd id_bd = Eigen::MatrixXcd::Identity(d * d, d * d);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (int t = 0; t < ports; ++t) {
    const Operator joint = permute_subsystems(tensor(actual[t], input), perm);
    const Eigen::MatrixXcd root = op_sqrt(povm.elements[t]).matrix();
    const Eigen::MatrixXcd kraus = Eigen::kroneckerProduct(root, id_bd);
    const Operator post(joint.shape(), kraus * joint.matrix() * kraus.adjoint());
    out += partial_trace(post, {ports + 1, ports + 2}).matrix();  // keep (B, D)
  }
  return QuantumChannelChoi(DensityOperator(Operator(SubsystemShape{d, d}, std::move(out))));
}

AsymptoticEstimate asymptotic_F(int ports, int d) {
  check_ports_and_dimension(ports, d);
  return {1.0, -(static_cast<double>(d) * d - 1.0) / (4.0 * ports)};
}

AsymptoticEstimate asymptotic_FT(int ports, int d) {
  check_ports_and_dimension(ports, d);
  return {1.0, -(static_cast<double>(d) * (d - 1.0)) / (4.0 * ports)};
}

double depolarized_resource_F(double p, double ideal_fidelity, int d) {
  check_probability(p, "depolarized_resource_F");
  if (!(ideal_fidelity >= 0.0 && ideal_fidelity <= 1.0))
    throw ValidationError("depolarized_resource_F: ideal fidelity must lie in [0, 1]");
  if (d < 2) throw ValidationError("depolarized_resource_F: d must be >= 2");
  return p * ideal_fidelity + (1.0 - p) / (static_cast<double>(d) * d);
}

double depolarized_resource_FT(double p, double ideal_fidelity, int d) {
  check_probability(p, "depolarized_resource_FT");
  if (!(ideal_fidelity >= 0.0 && ideal_fidelity <= 1.0))
    throw ValidationError("depolarized_resource_FT: ideal fidelity must lie in [0, 1]");
  if (d < 2) throw ValidationError("depolarized_resource_FT: d must be >= 2");
  const double dd = d;
  return (dd * dd * p * ideal_fidelity + dd + 1.0 - p) / (dd * (dd + 1.0));
}

double depolarized_resource_FT_from_FT(double p, double ideal_teleportation_fidelity, int d) {
  check_probability(p, "depolarized_resource_FT_from_FT");
  if (d < 2) throw ValidationError("depolarized_resource_FT_from_FT: d must be >= 2");
  return p * ideal_teleportation_fidelity + (1.0 - p) / d;
}

double isotropic_fef(double p, int d) {
  check_probability(p, "isotropic_fef");
  const double d2 = static_cast<double>(d) * d;
  return (1.0 + (d2 - 1.0) * p) / d2;
}

AsymptoticEstimate isotropic_asymptotic_F(double p, int ports, int d) {
  check_ports_and_dimension(ports, d);
  check_probability(p, "isotropic_asymptotic_F");
  const double d2 = static_cast<double>(d) * d;
  return {isotropic_fef(p, d), -p * (d2 - 1.0) / (4.0 * ports)};
}

AsymptoticEstimate isotropic_asymptotic_FT(double p, int ports, int d) {
  check_ports_and_dimension(ports, d);
  check_probability(p, "isotropic_asymptotic_FT");
  return {teleportation_fidelity_from_F(isotropic_fef(p, d), d), -p * d * (d - 1.0) / (4.0 * ports)};
}

AsymptoticEstimate mixed_resource_asymptotic_F(double fef, int ports, int d) {
  check_ports_and_dimension(ports, d);
  check_fef(fef, d, "mixed_resource_asymptotic_F");
  const double d2 = static_cast<double>(d) * d;
  return {fef, (1.0 - fef * d2) / (4.0 * ports)};
}

AsymptoticEstimate mixed_resource_asymptotic_FT(double fef, int ports, int d) {
  check_ports_and_dimension(ports, d);
  check_fef(fef, d, "mixed_resource_asymptotic_FT");
  const double d2 = static_cast<double>(d) * d;
  const double ft = teleportation_fidelity_from_F(std::clamp(fef, 0.0, 1.0), d);
  return {ft, (d - ft * d2) / (4.0 * ports)};
}

}  // namespace pbtlab
