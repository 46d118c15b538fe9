#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "pbtlab/errors.hpp"
#include "pbtlab/pbt.hpp"
#include "pbtlab/sweep.hpp"

using namespace pbtlab;

namespace {

std::string csv(const SweepSpec& spec) {
  std::ostringstream out;
  write_sweep_csv(out, run_sweep(spec));
  return out.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("row layout") {
  SweepSpec spec;
  spec.m_first = 1;
  spec.m_last = 3;
  spec.p_grid = {0.0, 1.0};
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 6);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].ports == static_cast<int>(k / 2) + 1);
    CHECK(rows[k].p == (k % 2 == 0 ? 0.0 : 1.0));
    REQUIRE(rows[k].f_exact.has_value());
    CHECK(std::abs(*rows[k].ft_exact - (2 * *rows[k].f_exact + 1) / 3) < 1e-12);
    CHECK(std::abs(*rows[k].f_exact - *rows[k].f_thm1) < 1e-9);
  }
  CHECK(*rows[1].f_exact == doctest::Approx(0.25));
  CHECK(*rows[5].f_exact == doctest::Approx(0.625));
}

TEST_CASE("csv text") {
  SweepSpec spec;
  spec.m_last = 3;
  spec.p_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  const std::string first = csv(spec);
  CHECK(first == csv(spec));

  std::istringstream in(first);
  std::string line;
  std::getline(in, line);
  CHECK(line == kSweepHeader);
  int count = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == 13);
    const double f = std::stod(cells[3]);
    const double ft = std::stod(cells[7]);
    CHECK(std::abs(ft - (2 * f + 1) / 3) < 1e-12);
    ++count;
  }
  CHECK(count == 15);
  CHECK(first.find('\r') == std::string::npos);
  CHECK(format_csv_number(0.1 + 0.2) == "0.3");
  CHECK(format_csv_number(1.0 / 3) == "0.333333333333");
}

TEST_CASE("cells above the cap are left empty") {
  setenv("PBTLAB_DIM_CAP", "64", 1);
  SweepSpec spec;
  spec.m_first = 5;
  spec.m_last = 6;
  spec.p_grid = {1.0};
  const auto rows = run_sweep(spec);
  unsetenv("PBTLAB_DIM_CAP");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].f_exact.has_value());
  CHECK_FALSE(rows[1].f_exact.has_value());
  CHECK_FALSE(rows[1].f_thm1.has_value());
  CHECK(rows[1].f_thm2 == doctest::Approx(1 - 3.0 / 24));

  std::ostringstream out;
  write_sweep_csv(out, rows);
  CHECK(out.str().find("\n2,6,1,,,0.875,") != std::string::npos);
}

TEST_CASE("trend in the gap column") {
  SweepSpec spec;
  spec.m_first = 4;
  spec.m_last = 8;
  spec.m_step = 4;
  spec.p_grid = {1.0};
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(*rows[1].f_exact - rows[1].f_thm2) < std::abs(*rows[0].f_exact - rows[0].f_thm2));
}

TEST_CASE("custom resource row") {
  SweepSpec spec;
  spec.m_last = 2;
  spec.custom = isotropic_state({0.5, 2});
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].p == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(*rows[1].f_exact == doctest::Approx(*rows[1].f_thm1).epsilon(1e-9));
}

TEST_CASE("sweep parameter validation") {
  SweepSpec spec;
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);
  spec.p_grid = {1.5};
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);
  spec.p_grid = {0.5};
  spec.m_first = 3;
  spec.m_last = 2;
  CHECK_THROWS_AS(run_sweep(spec), ValidationError);
}
