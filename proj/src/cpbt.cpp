#include "pbtlab/cpbt.hpp"

#include <numbers>

#include "nelder_mead.hpp"
#include "pbtlab/pbt.hpp"

namespace pbtlab {

namespace {

constexpr double kZeroProbability = 1e-15;

// Subsystem order with the controller first: (party, other, other).
std::vector<int> controller_first(Party party) {
  const int c = static_cast<int>(party);
  std::vector<int> perm{c};
  for (int k = 0; k < 3; ++k)
    if (k != c) perm.push_back(k);
  return perm;
}

// Row x holds the (unnormalized) pair amplitudes given controller digit x.
Eigen::MatrixXcd controller_rows(const TripartiteState& state, Party party) {
  const int d = state.d();
  const Ket moved = permute_subsystems(state.ket(), controller_first(party));
  Eigen::MatrixXcd rows(d, d * d);
  for (int x = 0; x < d; ++x) rows.row(x) = moved.amplitudes().segment(x * d * d, d * d).transpose();
  return rows;
}

Eigen::Matrix4cd magic_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  Eigen::Matrix4cd q = Eigen::Matrix4cd::Zero();
  q(0, 0) = s;      q(3, 0) = s;
  q(0, 1) = i * s;  q(3, 1) = -i * s;
  q(1, 2) = i * s;  q(2, 2) = i * s;
  q(1, 3) = s;      q(2, 3) = -s;
  return q;
}

// Objective for qubits without building density operators. For a rank-1
// pair v v^dagger (unnormalized, weight p), p f = top eigenvalue of
// Re(w w^dagger) with w = Q^dagger v, i.e. of the 2x2 Gram matrix of (Re w, Im w).
class QubitObjective {
 public:
  QubitObjective(const TripartiteState& state, Party party)
      : rows_magic_(controller_rows(state, party) * magic_basis().conjugate()) {}

  double operator()(double theta, double phi) const {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const cplx e = std::polar(1.0, phi);
    // conj of the measurement vectors, since v = m^dagger rows
    const Eigen::Vector2cd m0(c, std::conj(e) * s);
    const Eigen::Vector2cd m1(-e * s, c);
    double weighted_fef = 0.0;
    for (const auto& m : {m0, m1}) {
      const Eigen::Vector4cd w = (m.transpose() * rows_magic_).transpose();
      const Eigen::Vector4d a = w.real();
      const Eigen::Vector4d b = w.imag();
      const double aa = a.squaredNorm();
      const double bb = b.squaredNorm();
      const double ab = a.dot(b);
      weighted_fef += 0.5 * (aa + bb + std::sqrt((aa - bb) * (aa - bb) + 4.0 * ab * ab));
    }
    return (2.0 * weighted_fef + 1.0) / 3.0;
  }

 private:
  Eigen::Matrix<cplx, 2, 4> rows_magic_;
};

}  // namespace

char party_label(Party party) { return "ABC"[static_cast<int>(party)]; }

Party parse_party(const std::string& label) {
  if (label == "A" || label == "a") return Party::A;
  if (label == "B" || label == "b") return Party::B;
  if (label == "C" || label == "c") return Party::C;
  throw ValidationError("party must be one of A, B, C (got '" + label + "')");
}

TripartiteState::TripartiteState(Ket ket) : ket_(std::move(ket)) {
  const auto& dims = ket_.shape().dims();
  if (dims.size() != 3 || dims[0] != dims[1] || dims[1] != dims[2])
    throw ValidationError("TripartiteState: expects three qudits of equal dimension");
  if (!ket_.is_normalized(1e-12)) throw ValidationError("TripartiteState: ket is not normalized");
}

ProjectiveMeasurement::ProjectiveMeasurement(Eigen::MatrixXcd basis) : basis_(std::move(basis)) {
  if (basis_.rows() < 2 || basis_.rows() != basis_.cols())
    throw ValidationError("ProjectiveMeasurement: basis must be d x d with d >= 2");
  const Eigen::MatrixXcd gram = basis_.adjoint() * basis_;
  const double err = max_abs(gram - Eigen::MatrixXcd::Identity(basis_.cols(), basis_.cols()));
  if (err > 1e-10) throw ValidationError("ProjectiveMeasurement: basis is not orthonormal (error " + std::to_string(err) + ")");
}

ProjectiveMeasurement ProjectiveMeasurement::qubit(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const cplx e = std::polar(1.0, phi);
  Eigen::Matrix2cd basis;
  basis << c, -std::conj(e) * s,
           e * s, c;
  return ProjectiveMeasurement(basis);
}

ProjectiveMeasurement ProjectiveMeasurement::computational(int d) {
  return ProjectiveMeasurement(Eigen::MatrixXcd::Identity(d, d));
}

TripartiteState ghz_extended(double a, double b) {
  if (a < 0.0 || b < 0.0) throw ValidationError("ghz_extended: coefficients must be non-negative");
  if (std::abs(a * a + b * b - 1.0) > 1e-10)
    throw ValidationError("ghz_extended: coefficients must satisfy a^2 + b^2 = 1");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
  v(0) = a;
  v(7) = b;
  v.normalize();
  return TripartiteState(Ket(SubsystemShape{2, 2, 2}, std::move(v)));
}

TripartiteState w_class(double w0, double w1, double w2, double w3) {
  if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0 || w3 < 0.0)
    throw ValidationError("w_class: coefficients must be non-negative");
  if (std::abs(w0 * w0 + w1 * w1 + w2 * w2 + w3 * w3 - 1.0) > 1e-10)
    throw ValidationError("w_class: coefficients must satisfy sum w_i^2 = 1");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
  v(0b000) = w0;
  v(0b100) = w1;
  v(0b101) = w2;
  v(0b110) = w3;
  v.normalize();
  return TripartiteState(Ket(SubsystemShape{2, 2, 2}, std::move(v)));
}

OutcomePair post_measurement_pair(const TripartiteState& state, Party party,
                                  const ProjectiveMeasurement& measurement, int outcome) {
  const int d = state.d();
  if (measurement.outcomes() != d) throw ValidationError("post_measurement_pair: measurement dimension mismatch");
  if (outcome < 0 || outcome >= d) throw ValidationError("post_measurement_pair: outcome index out of range");
  const Eigen::MatrixXcd rows = controller_rows(state, party);
  const Eigen::VectorXcd v = (measurement.basis().col(outcome).adjoint() * rows).transpose();
  const double prob = v.squaredNorm();
  const SubsystemShape pair_shape{d, d};
  if (prob <= kZeroProbability) return {0.0, DensityOperator::maximally_mixed(pair_shape)};
  return {prob, DensityOperator(Operator(pair_shape, v * v.adjoint() / prob))};
}

DensityOperator reduced_pair(const TripartiteState& state, Party party) {
  const int c = static_cast<int>(party);
  std::vector<int> keep;
  for (int k = 0; k < 3; ++k)
    if (k != c) keep.push_back(k);
  return DensityOperator(partial_trace(state.ket().projector(), keep));
}

double controlled_teleportation_fidelity(const TripartiteState& state, Party party,
                                         const ProjectiveMeasurement& measurement) {
  const int d = state.d();
  double total = 0.0;
  for (int i = 0; i < measurement.outcomes(); ++i) {
    const OutcomePair out = post_measurement_pair(state, party, measurement, i);
    if (out.probability == 0.0) continue;
    total += out.probability * teleportation_fidelity_from_F(fully_entangled_fraction(out.pair).value, d);
  }
  return total;
}

double uncontrolled_teleportation_fidelity(const TripartiteState& state, Party party) {
  return teleportation_fidelity_from_F(fully_entangled_fraction(reduced_pair(state, party)).value, state.d());
}

MaxCtResult max_ct_fidelity(const TripartiteState& state, Party party, const CtOptimizerOptions& options) {
  if (state.d() != 2) throw ValidationError("max_ct_fidelity: measurement optimization supports qubits only");
  if (options.theta_steps < 2 || options.phi_steps < 2 || options.restarts < 1)
    throw ValidationError("max_ct_fidelity: grid needs >= 2 steps per angle and >= 1 restart");
  const QubitObjective objective(state, party);
  const double pi = std::numbers::pi;
  const double dtheta = pi / (options.theta_steps - 1);
  const double dphi = 2.0 * pi / (options.phi_steps - 1);

  const int cells = options.theta_steps * options.phi_steps;
  std::vector<double> grid(cells);
  for (int i = 0; i < options.theta_steps; ++i)
    for (int j = 0; j < options.phi_steps; ++j) grid[i * options.phi_steps + j] = objective(i * dtheta, j * dphi);

  std::vector<int> order(cells);
  std::iota(order.begin(), order.end(), 0);
  const int restarts = std::min(options.restarts, cells);
  std::partial_sort(order.begin(), order.begin() + restarts, order.end(), [&](int x, int y) {
    return grid[x] > grid[y] || (grid[x] == grid[y] && x < y);
  });

  OptimizerTrace trace;
  trace.grid_points = cells;
  trace.restarts = restarts;
  double best_value = grid[order[0]];
  double best_theta = (order[0] / options.phi_steps) * dtheta;
  double best_phi = (order[0] % options.phi_steps) * dphi;
  bool best_converged = true;

  auto negated = [&](const std::array<double, 2>& x) { return -objective(x[0], x[1]); };
  for (int r = 0; r < restarts; ++r) {
    const int cell = order[r];
    const std::array<double, 2> start{(cell / options.phi_steps) * dtheta, (cell % options.phi_steps) * dphi};
    const auto run = detail::nelder_mead<2>(negated, start, {dtheta, dphi}, options.tol, options.max_iter);
    trace.iterations += run.iterations;
    if (-run.value > best_value) {
      best_value = -run.value;
      best_theta = run.x[0];
      best_phi = run.x[1];
      best_converged = run.converged;
    }
  }
  trace.converged = best_converged;

  ProjectiveMeasurement best = ProjectiveMeasurement::qubit(best_theta, best_phi);
  const double value = controlled_teleportation_fidelity(state, party, best);
  return {value, std::move(best), best_theta, best_phi, trace};
}

double controlled_pbt_fidelity(double max_ct, int ports, int d) {
  if (ports < 1) throw ValidationError("controlled_pbt_fidelity: M must be >= 1");
  const double scale = 1.0 - static_cast<double>(d) * d / (4.0 * ports);
  return max_ct * scale + d / (4.0 * ports);
}

double cpbt_fidelity(const TripartiteState& state, Party party, int ports, const CtOptimizerOptions& options) {
  if (ports < 1) throw ValidationError("cpbt_fidelity: M must be >= 1");
  return controlled_pbt_fidelity(max_ct_fidelity(state, party, options).value, ports, state.d());
}

ControlPowerReport control_power(const TripartiteState& state, Party party, int ports,
                                 const CtOptimizerOptions& options) {
  if (ports < 1) throw ValidationError("control_power: M must be >= 1");
  const int d = state.d();
  const MaxCtResult ct = max_ct_fidelity(state, party, options);
  const double pair_fef = fully_entangled_fraction(reduced_pair(state, party)).value;

  ControlPowerReport report{};
  report.party = party;
  report.ports = ports;
  report.f_ct = ct.value;
  report.f_nc = teleportation_fidelity_from_F(pair_fef, d);
  report.f_ct_M = controlled_pbt_fidelity(ct.value, ports, d);
  report.f_nc_M = mixed_resource_asymptotic_FT(pair_fef, ports, d).raw();
  report.power_M = report.f_ct_M - report.f_nc_M;
  report.power_scaled = (report.f_ct - report.f_nc) * (1.0 - static_cast<double>(d) * d / (4.0 * ports));
  report.trace = ct.trace;
  if (std::abs(report.power_M - report.power_scaled) > 1e-9)
    throw ConsistencyError("control_power: difference and scaled forms disagree");
  return report;
}

ControlPowerReport minimal_control_power(const TripartiteState& state, int ports, const CtOptimizerOptions& options) {
  std::optional<ControlPowerReport> best;
  for (Party party : kAllParties) {
    ControlPowerReport r = control_power(state, party, ports, options);
    if (!best || r.power_M < best->power_M - 1e-12) best = r;
  }
  return *best;
}

}  // namespace pbtlab
