// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "pbtlab/cpbt.hpp"
#include "pbtlab/pbt.hpp"
#include "pbtlab/sweep.hpp"
#include "test_support.hpp"

using namespace pbtlab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Eigen::MatrixXcd seeded_alice_op(int d, int ports, std::uint64_t seed) {
  Rng rng(seed);
  const Index n = static_cast<Index>(std::pow(d, ports));
  Eigen::MatrixXcd o = pbtlab::testing::random_complex(n, n, rng);
  return o * std::sqrt(static_cast<double>(n) / o.squaredNorm());
}

Outcome depolarized_identity() {
  double worst = 0.0;
  for (int m = 1; m <= 3; ++m) {
    for (bool random_op : {false, true}) {
      const auto op = random_op ? std::optional(seeded_alice_op(2, m, 2024 + m)) : std::nullopt;
      const double ideal = pbt_entanglement_fidelity(PBTSetup(2, m, MaxEntangledResource{}, op));
      for (double p : {0.0, 0.3, 0.7, 1.0}) {
        const double noisy = pbt_entanglement_fidelity(PBTSetup(2, m, IsotropicResource{p}, op));
        worst = std::max(worst, std::abs(noisy - (p * ideal + (1 - p) / 4)));
      }
    }
  }
  return {worst <= 1e-9, "max |F_p - (p F + (1-p)/4)| = " + fmt("%.3g", worst)};
}

Outcome isotropic_fef_identity() {
  double magic = 0.0;
  double iterative = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double p = k / 10.0;
    const auto rho = isotropic_state({p, 2});
    magic = std::max(magic, std::abs(fef_qubit_magic(rho).value - (1 + 3 * p) / 4));
    iterative = std::max(iterative, std::abs(fef_iterative(rho).value - fef_qubit_magic(rho).value));
  }
  return {magic <= 1e-10 && iterative <= 1e-8,
          "magic-basis error " + fmt("%.3g", magic) + ", ascent vs magic " + fmt("%.3g", iterative)};
}

Outcome teleportation_closure() {
  Rng rng(20240601);
  double worst_sigma = 0.0;
  double worst_fef = 0.0;
  bool ok = true;
  for (int k = 0; k < 20; ++k) {
    const auto rho = random_density_operator(SubsystemShape{2, 2}, rng);
    const auto channel = standard_teleportation_choi(rho);
    const double f = entanglement_fidelity(channel);
    const double fef = fef_qubit_magic(rho).value;
    worst_fef = std::max(worst_fef, std::abs(f - fef));
    const auto mc = mc_teleportation_fidelity(channel, 10000, 1000 + k);
    const double z = std::abs(mc.estimate - (2 * f + 1) / 3) / mc.standard_error;
    worst_sigma = std::max(worst_sigma, z);
    ok = ok && z <= 3.0 && std::abs(f - fef) <= 1e-8;
  }
  return {ok, "worst MC deviation " + fmt("%.2f", worst_sigma) + " standard errors, |F - f| <= " +
                  fmt("%.3g", worst_fef)};
}

Outcome port_state_closed_form() {
  double worst = 0.0;
  for (int m = 2; m <= 4; ++m)
    for (double p : {0.25, 0.75}) {
      const auto brute = port_states_bruteforce(PBTSetup(2, m, IsotropicResource{p}));
      for (int t = 0; t < m; ++t)
        worst = std::max(worst, max_abs(brute.sigmas[t].matrix() - isotropic_port_state(2, m, p, t).matrix()));
    }
  return {worst <= 1e-12, "max entrywise difference " + fmt("%.3g", worst)};
}

Outcome asymptotic_trend() {
  const double gap4 = std::abs(pbt_entanglement_fidelity(PBTSetup(2, 4, MaxEntangledResource{})) - asymptotic_F(4, 2).raw());
  const double gap8 = std::abs(pbt_entanglement_fidelity(PBTSetup(2, 8, MaxEntangledResource{})) - asymptotic_F(8, 2).raw());
  double worst = 0.0;
  for (double p : {0.0, 0.25, 0.5, 0.75, 1.0})
    for (int m : {1, 2, 5, 10, 100}) {
      const double f = isotropic_fef(p, 2);
      worst = std::max(worst, std::abs(isotropic_asymptotic_F(p, m, 2).raw() - mixed_resource_asymptotic_F(f, m, 2).raw()));
      worst = std::max(worst, std::abs(isotropic_asymptotic_FT(p, m, 2).raw() - mixed_resource_asymptotic_FT(f, m, 2).raw()));
    }
  return {gap8 < gap4 && worst <= 1e-12,
          "gap M=4 " + fmt("%.4g", gap4) + ", gap M=8 " + fmt("%.4g", gap8) + ", grid consistency " + fmt("%.3g", worst)};
}

Outcome ghz_control_power() {
  double worst = 0.0;
  double worst_min = 0.0;
  for (double a : {0.3, 1 / std::sqrt(2.0), 0.8}) {
    const double b = std::sqrt(1 - a * a);
    const auto state = ghz_extended(a, b);
    for (int m : {2, 10, 100}) {
      const double expected = (2 * a * b / 3) * (1 - 1.0 / m);
      for (Party party : kAllParties)
        worst = std::max(worst, std::abs(control_power(state, party, m).power_M - expected));
      const auto min = minimal_control_power(state, m);
      for (Party party : kAllParties)
        worst_min = std::max(worst_min, std::abs(min.power_M - control_power(state, party, m).power_M));
    }
  }
  return {worst <= 1e-6 && worst_min <= 1e-8,
          "closed-form error " + fmt("%.3g", worst) + ", minimal vs per-party " + fmt("%.3g", worst_min)};
}

Outcome structural_invariants() {
  Rng rng(777);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  int failures = 0;
  for (int k = 0; k < 50; ++k) {
    const int m = 1 + k % 3;
    const auto rho = random_density_operator(SubsystemShape{2, 2}, rng);
    const PBTSetup setup(2, m, CustomResource{rho});

    const POVM povm = pgm(setup);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(povm.elements[0].dimension(), povm.elements[0].dimension());
    bool psd = true;
    for (const auto& e : povm.elements) {
      sum += e.matrix();
      psd = psd && eigh(e).values(0) >= -1e-9;
    }
    const bool complete = max_abs(sum - Eigen::MatrixXcd::Identity(sum.rows(), sum.cols())) <= 1e-8;

    const auto marginal = partial_trace(pbt_channel_choi(setup).choi().op(), {1});
    const auto std_marginal = partial_trace(standard_teleportation_choi(rho).choi().op(), {1});
    const Eigen::MatrixXcd half = Eigen::MatrixXcd::Identity(2, 2) / 2.0;
    const bool trace_preserving = max_abs(marginal.matrix() - half) <= 1e-8 && max_abs(std_marginal.matrix() - half) <= 1e-8;

    const double f = fef_qubit_magic(rho).value;
    const bool fef_bounds = f >= 0.25 - 1e-12 && f <= 1.0 + 1e-12 &&
                            max_entangled_overlap(rho, haar_unitary(2, rng)) <= f + 1e-9;

    const TripartiteState state(Ket(SubsystemShape{2, 2, 2}, haar_ket(8, rng).amplitudes()));
    const auto meas = ProjectiveMeasurement::qubit(angle(rng) / 2, angle(rng));
    bool probabilities = true;
    bool dominance = true;
    for (Party party : kAllParties) {
      const double total = post_measurement_pair(state, party, meas, 0).probability +
                           post_measurement_pair(state, party, meas, 1).probability;
      probabilities = probabilities && std::abs(total - 1.0) <= 1e-10;
      const auto report = control_power(state, party, 1 + k);
      dominance = dominance && report.f_ct_M >= report.f_nc_M - 1e-8;
    }
    if (!(complete && psd && trace_preserving && fef_bounds && probabilities && dominance)) ++failures;
  }
  return {failures == 0, std::to_string(50 - failures) + "/50 instances satisfy every invariant"};
}

Outcome sweep_determinism() {
  SweepSpec spec;
  spec.d = 2;
  spec.m_first = 1;
  spec.m_last = 3;
  spec.p_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::ostringstream first;
  std::ostringstream second;
  write_sweep_csv(first, run_sweep(spec));
  write_sweep_csv(second, run_sweep(spec));
  return {first.str() == second.str() && !first.str().empty(),
          std::to_string(first.str().size()) + " bytes, runs " + (first.str() == second.str() ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"depolarized-resource identity", depolarized_identity},
      {"isotropic fully entangled fraction", isotropic_fef_identity},
      {"teleportation fidelity closure", teleportation_closure},
      {"port-state closed form", port_state_closed_form},
      {"asymptotic trend and consistency", asymptotic_trend},
      {"GHZ control power", ghz_control_power},
      {"structural invariants", structural_invariants},
      {"sweep determinism", sweep_determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", index, name, out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failed;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
