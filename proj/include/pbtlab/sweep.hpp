#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pbtlab/quantum_states.hpp"

namespace pbtlab {

struct SweepSpec {
  int d = 2;
  int m_first = 1;
  int m_last = 1;
  int m_step = 1;
  /// Isotropic resources, one row per p. Ignored when `custom` is set.
  std::vector<double> p_grid;
  /// A fixed resource; its row carries the twirled p.
  std::optional<DensityOperator> custom;

  void validate() const;
};

/// One (M, p) cell. Exact columns are empty when the setup is above the cap.
struct SweepRow {
  int d;
  int ports;
  double p;
  std::optional<double> f_exact;
  std::optional<double> f_thm1;  // p F_exact(ideal) + (1 - p)/d^2
  double f_thm2;                 // isotropic leading terms
  double f_thm3;                 // mixed-resource leading terms in f
  std::optional<double> ft_exact;
  double ft_asym;
  std::string warning;
};

/// Rows in M-outer, p-inner order. Rows are computed concurrently and
/// assembled by grid position.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

inline constexpr const char* kSweepHeader =
    "d,M,p,F_exact,F_thm1,F_thm2,F_thm3,FT_exact,FT_asym,gap_thm1,gap_thm2,gap_thm3,warning";

/// 12 significant digits, as used in CSV output.
std::string format_csv_number(double x);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace pbtlab
