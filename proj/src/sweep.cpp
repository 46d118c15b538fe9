#include "pbtlab/sweep.hpp"

#include <cstdio>
#include <functional>
#include <future>
#include <thread>
#include <map>

#include "pbtlab/pbt.hpp"

namespace pbtlab {

void SweepSpec::validate() const {
  if (d < 2) throw ValidationError("sweep: d must be >= 2");
  if (m_first < 1 || m_last < m_first || m_step < 1)
    throw ValidationError("sweep: M range must satisfy 1 <= first <= last with step >= 1");
  if (!custom) {
    if (p_grid.empty()) throw ValidationError("sweep: p grid must be non-empty");
    for (double p : p_grid)
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("sweep: every p must lie in [0, 1]");
  } else if (custom->shape() != SubsystemShape{d, d}) {
    throw ValidationError("sweep: custom resource must be a state on {d, d}");
  }
}

namespace {

std::optional<double> exact_or_empty(const std::function<double()>& compute) {
  try {
    return compute();
  } catch (const DimensionCapError&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const int d = spec.d;

  std::vector<int> ports_list;
  for (int m = spec.m_first; m <= spec.m_last; m += spec.m_step) ports_list.push_back(m);

  // Resource of each column: (p, f, resource).
  struct Column {
    double p;
    double fef;
    Resource resource;
    std::string warning;
  };
  std::vector<Column> columns;
  if (spec.custom) {
    const FEFResult fef = fully_entangled_fraction(*spec.custom);
    const double d2 = static_cast<double>(d) * d;
    const double p = std::clamp((d2 * fef.value - 1.0) / (d2 - 1.0), 0.0, 1.0);
    columns.push_back({p, fef.value, CustomResource{*spec.custom}, fef.converged ? "" : "fef-not-converged"});
  } else {
    for (double p : spec.p_grid) columns.push_back({p, isotropic_fef(p, d), IsotropicResource{p}, ""});
  }

  std::map<int, std::optional<double>> ideal;
  for (int m : ports_list)
    ideal[m] = exact_or_empty([&] { return pbt_entanglement_fidelity(PBTSetup(d, m, MaxEntangledResource{})); });

  struct Cell {
    int ports;
    const Column* column;
  };
  std::vector<Cell> cells;
  for (int m : ports_list)
    for (const Column& col : columns) cells.push_back({m, &col});

  auto compute = [&](const Cell& cell) {
    const int m = cell.ports;
    const Column& col = *cell.column;
    SweepRow row{};
    row.d = d;
    row.ports = m;
    row.p = col.p;
    row.warning = col.warning;
    row.f_exact = exact_or_empty([&] { return pbt_entanglement_fidelity(PBTSetup(d, m, col.resource)); });
    if (const auto& f = ideal.at(m)) row.f_thm1 = depolarized_resource_F(col.p, *f, d);
    row.f_thm2 = isotropic_asymptotic_F(col.p, m, d).value();
    row.f_thm3 = mixed_resource_asymptotic_F(col.fef, m, d).value();
    if (row.f_exact) row.ft_exact = teleportation_fidelity_from_F(*row.f_exact, d);
    row.ft_asym = mixed_resource_asymptotic_FT(col.fef, m, d).value();
    return row;
  };

  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (std::size_t begin = 0; begin < cells.size(); begin += workers) {
    const std::size_t end = std::min(cells.size(), begin + workers);
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t k = begin; k < end; ++k) batch.push_back(std::async(std::launch::async, compute, cells[k]));
    for (auto& f : batch) rows.push_back(f.get());
  }
  return rows;
}

std::string format_csv_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  auto opt = [](const std::optional<double>& x) { return x ? format_csv_number(*x) : std::string(); };
  auto gap = [](const std::optional<double>& a, const std::optional<double>& b) -> std::optional<double> {
    if (!a || !b) return std::nullopt;
    return std::abs(*a - *b);
  };
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << r.d << ',' << r.ports << ',' << format_csv_number(r.p) << ',' << opt(r.f_exact) << ',' << opt(r.f_thm1)
        << ',' << format_csv_number(r.f_thm2) << ',' << format_csv_number(r.f_thm3) << ',' << opt(r.ft_exact) << ','
        << format_csv_number(r.ft_asym) << ',' << opt(gap(r.f_exact, r.f_thm1)) << ','
        << opt(gap(r.f_exact, std::optional<double>(r.f_thm2))) << ','
        << opt(gap(r.f_exact, std::optional<double>(r.f_thm3))) << ',' << r.warning << '\n';
  }
}

}  // namespace pbtlab
