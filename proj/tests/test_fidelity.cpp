#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pbtlab/errors.hpp"
#include "pbtlab/fidelity.hpp"
#include <unsupported/Eigen/KroneckerProduct>
#include "test_support.hpp"

using namespace pbtlab;

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

DensityOperator rotate(const DensityOperator& rho, const Eigen::MatrixXcd& u) {
  return DensityOperator(Operator(rho.shape(), u * rho.matrix() * u.adjoint()));
}

}  // namespace

TEST_CASE("teleportation fidelity from entanglement fidelity") {
  CHECK(teleportation_fidelity_from_F(0.25, 2) == doctest::Approx(0.5));
  CHECK(teleportation_fidelity_from_F(1.0, 3) == doctest::Approx(1.0));
  for (int d : {2, 3, 4}) CHECK(teleportation_fidelity_from_F(1.0 / d, d) == doctest::Approx(2.0 / (d + 1)));
  CHECK_THROWS_AS(teleportation_fidelity_from_F(1.2, 2), ValidationError);
  CHECK_THROWS_AS(teleportation_fidelity_from_F(0.5, 1), ValidationError);

  const auto report = make_fidelity_report(0.625, 2);
  CHECK(report.teleportation_fidelity == doctest::Approx(0.75));
}

TEST_CASE("entanglement fidelity of reference channels") {
  CHECK(entanglement_fidelity(identity_channel_choi(3)) == doctest::Approx(1.0));
  CHECK(entanglement_fidelity(fully_depolarizing_choi(3)) == doctest::Approx(1.0 / 9));
}

TEST_CASE("monte carlo teleportation fidelity") {
  const auto id = mc_teleportation_fidelity(identity_channel_choi(2), 2000, 1);
  CHECK(id.estimate == doctest::Approx(1.0).epsilon(1e-12));

  const auto dep = mc_teleportation_fidelity(fully_depolarizing_choi(2), 2000, 1);
  CHECK(dep.estimate == doctest::Approx(0.5).epsilon(1e-12));

  const auto iso = standard_teleportation_choi(isotropic_state({0.5, 2}));
  const auto est = mc_teleportation_fidelity(iso, 10000, 7);
  CHECK(std::abs(est.estimate - 0.75) <= 3 * est.standard_error + 1e-12);

  const auto again = mc_teleportation_fidelity(iso, 10000, 7);
  CHECK(again.estimate == est.estimate);
}

TEST_CASE("fully entangled fraction of isotropic states") {
  for (int k = 0; k <= 10; ++k) {
    const double p = k / 10.0;
    const auto rho = isotropic_state({p, 2});
    CHECK(std::abs(fef_qubit_magic(rho).value - (1 + 3 * p) / 4) < 1e-10);
    CHECK(std::abs(fef_iterative(rho).value - (1 + 3 * p) / 4) < 1e-8);
  }
  const auto rho3 = isotropic_state({0.4, 3});
  CHECK(fully_entangled_fraction(rho3).value == doctest::Approx((1 + 8 * 0.4) / 9));
}

TEST_CASE("magic basis and iterative ascent agree") {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const auto rho = random_density_operator(SubsystemShape{2, 2}, rng);
    const auto magic = fef_qubit_magic(rho);
    const auto iter = fef_iterative(rho);
    CHECK(std::abs(magic.value - iter.value) < 1e-8);
    CHECK(std::abs(max_entangled_overlap(rho, magic.maximizer) - magic.value) < 1e-12);
    CHECK(iter.converged);
  }
}

TEST_CASE("fully entangled fraction is local unitary invariant and bounded") {
  Rng rng(5);
  for (int d : {2, 3}) {
    for (int k = 0; k < 5; ++k) {
      const auto rho = random_density_operator(SubsystemShape{d, d}, rng);
      const auto u = kron(haar_unitary(d, rng), haar_unitary(d, rng));
      const double f = fully_entangled_fraction(rho).value;
      CHECK(std::abs(f - fully_entangled_fraction(rotate(rho, u)).value) < 1e-7);
      CHECK(f >= 1.0 / (d * d) - 1e-12);
      CHECK(f <= 1.0 + 1e-12);
      // The maximum dominates any probe unitary.
      for (int j = 0; j < 5; ++j) CHECK(max_entangled_overlap(rho, haar_unitary(d, rng)) <= f + 1e-9);
    }
  }
}

TEST_CASE("meaningful resources") {
  CHECK(is_meaningful(DensityOperator::from_ket(max_entangled(2))));
  CHECK_FALSE(is_meaningful(DensityOperator::maximally_mixed(SubsystemShape{2, 2})));
  CHECK(is_meaningful(isotropic_state({0.34, 2})));
  CHECK_FALSE(is_meaningful(isotropic_state({0.33, 2})));
  CHECK_THROWS_AS(bipartite_local_dimension(DensityOperator::maximally_mixed(SubsystemShape{2, 3})),
                  ValidationError);
}
