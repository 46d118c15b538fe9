// pbtlab command-line front end.
//
// Exit codes: 0 success, 2 validation error, 3 dimension cap exceeded,
// 4 optimizer non-convergence (results are still printed).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pbtlab/cpbt.hpp"
#include "pbtlab/fidelity.hpp"
#include "pbtlab/pbt.hpp"
#include "pbtlab/state_io.hpp"
#include "pbtlab/sweep.hpp"

namespace {

using namespace pbtlab;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitValidation = 2;
constexpr int kExitCap = 3;
constexpr int kExitNotConverged = 4;

// Key/value report printed as text or as a JSON run record.
class Report {
 public:
  Report(std::string command, bool as_json) : command_(std::move(command)), as_json_(as_json) {
    record_["tool"] = "pbtlab";
    record_["version"] = kVersion;
    record_["command"] = command_;
    record_["inputs"] = json::object();
    record_["results"] = json::object();
  }

  void input(const std::string& key, json value) { record_["inputs"][key] = std::move(value); }

  void value(const std::string& key, double x) {
    record_["results"][key] = x;
    lines_.push_back(key + " = " + format_csv_number(x));
  }
  void value(const std::string& key, int n) {
    record_["results"][key] = n;
    lines_.push_back(key + " = " + std::to_string(n));
  }
  void detail(const std::string& key, json value) {
    lines_.push_back(key + " = " + value.dump());
    record_["results"][key] = std::move(value);
  }
  void value(const std::string& key, const std::string& s) {
    record_["results"][key] = s;
    lines_.push_back(key + " = " + s);
  }
  void flag(const std::string& key, bool b) {
    record_["results"][key] = b;
    lines_.push_back(key + " = " + (b ? "true" : "false"));
  }
  void warn(const std::string& message) {
    record_["warnings"].push_back(message);
    lines_.push_back("warning: " + message);
  }

  void emit(double wall_seconds) {
    record_["wall_time_s"] = wall_seconds;
    if (as_json_) {
      std::cout << record_.dump(2) << '\n';
    } else {
      for (const auto& l : lines_) std::cout << l << '\n';
    }
  }

 private:
  std::string command_;
  bool as_json_;
  json record_;
  std::vector<std::string> lines_;
};

json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "' in list '" + text + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

// "3" or "1..8"
std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int m = std::stoi(text);
      return {m, m};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ValidationError("cannot parse M range '" + text + "' (expected N or A..B)");
  }
}

// Coefficients typed with a few digits are renormalized when they are within
// this distance of the unit sphere.
constexpr double kCoefficientSlack = 1e-5;

std::vector<double> normalized_coefficients(std::vector<double> w, const std::string& what) {
  double norm2 = 0.0;
  for (double x : w) {
    if (x < 0.0) throw ValidationError(what + ": coefficients must be non-negative");
    norm2 += x * x;
  }
  if (std::abs(norm2 - 1.0) > kCoefficientSlack)
    throw ValidationError(what + ": coefficients must satisfy sum of squares = 1 (got " + std::to_string(norm2) + ")");
  for (double& x : w) x /= std::sqrt(norm2);
  return w;
}

Eigen::MatrixXcd random_alice_operation(int d, int ports, std::uint64_t seed) {
  Rng rng(seed);
  const Index n = static_cast<Index>(checked_pow(d, ports));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd o(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      o(i, j) = cplx(re, im);
    }
  return o * std::sqrt(static_cast<double>(n) / o.squaredNorm());
}

struct PbtArgs {
  int d = 2;
  int ports = 1;
  std::string resource = "maxent";
  double p = 1.0;
  std::string state_file;
  std::string operator_spec;
  std::uint64_t seed = 0;
  bool choi = false;
  bool asymptotic_only = false;
  std::string design = "standard";
  bool json = false;
};

int run_fef(const std::string& path, std::uint64_t seed, bool as_json) {
  const auto start = std::chrono::steady_clock::now();
  const DensityOperator rho = read_density_file(path);
  const int d = bipartite_local_dimension(rho);
  FefOptions options;
  options.seed = seed;
  const FEFResult fef = d == 2 ? fef_qubit_magic(rho) : fef_iterative(rho, options);

  Report report("fef", as_json);
  report.input("state_file", path);
  report.input("seed", seed);
  report.value("d", d);
  report.value("f", fef.value);
  report.value("FT", teleportation_fidelity_from_F(fef.value, d));
  report.flag("meaningful", fef.value > 1.0 / d + 1e-12);
  report.flag("converged", fef.converged);
  report.value("iterations", fef.iterations);
  report.value("method", d == 2 ? std::string("magic-basis") : std::string("unitary-ascent"));
  report.detail("maximizer", matrix_json(fef.maximizer));
  if (!fef.converged) report.warn("fully entangled fraction ascent did not converge");
  report.emit(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return fef.converged ? 0 : kExitNotConverged;
}

int run_pbt(const PbtArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  Report report("pbt", a.json);
  report.input("d", a.d);
  report.input("M", a.ports);
  report.input("resource", a.resource);
  report.input("seed", a.seed);
  report.input("design", a.design);

  std::optional<DensityOperator> custom;
  double p = 1.0;
  double fef = 1.0;
  bool converged = true;
  if (a.resource == "maxent") {
    p = 1.0;
  } else if (a.resource == "isotropic") {
    p = a.p;
    report.input("p", p);
    fef = isotropic_fef(p, a.d);
  } else if (a.resource == "custom") {
    if (a.state_file.empty()) throw ValidationError("--resource custom needs --state FILE");
    report.input("state_file", a.state_file);
    custom = read_density_file(a.state_file);
    if (custom->shape() != SubsystemShape{a.d, a.d}) throw ValidationError("custom resource must be a state on {d, d}");
    FefOptions options;
    options.seed = a.seed;
    const FEFResult r = a.d == 2 ? fef_qubit_magic(*custom) : fef_iterative(*custom, options);
    fef = r.value;
    converged = r.converged;
    const double d2 = static_cast<double>(a.d) * a.d;
    p = std::clamp((d2 * fef - 1.0) / (d2 - 1.0), 0.0, 1.0);
    report.value("f", fef);
    report.value("p_twirl", p);
  } else {
    throw ValidationError("--resource must be maxent, isotropic or custom");
  }

  const auto thm3 = mixed_resource_asymptotic_F(fef, a.ports, a.d);
  const auto thm3_t = mixed_resource_asymptotic_FT(fef, a.ports, a.d);
  if (a.resource == "maxent") {
    report.value("F_asym", asymptotic_F(a.ports, a.d).value());
    report.value("FT_asym", asymptotic_FT(a.ports, a.d).value());
  } else {
    report.value("F_thm2", isotropic_asymptotic_F(p, a.ports, a.d).value());
    report.value("FT_thm2", isotropic_asymptotic_FT(p, a.ports, a.d).value());
    report.value("F_thm3", thm3.value());
    report.value("FT_thm3", thm3_t.value());
  }

  if (!a.asymptotic_only) {
    std::optional<Eigen::MatrixXcd> alice;
    if (a.operator_spec == "random") {
      alice = random_alice_operation(a.d, a.ports, a.seed);
      report.input("operator", "random");
    } else if (!a.operator_spec.empty()) {
      const Operator o = read_operator_file(a.operator_spec);
      if (o.shape() != SubsystemShape::uniform(a.d, a.ports))
        throw ValidationError("operator file must act on M subsystems of dimension d");
      alice = o.matrix();
      report.input("operator", a.operator_spec);
    }
    const MeasurementDesign design =
        a.design == "matched" ? MeasurementDesign::ResourceMatched : MeasurementDesign::Standard;
    if (a.design != "standard" && a.design != "matched") throw ValidationError("--design must be standard or matched");

    Resource resource = MaxEntangledResource{};
    if (a.resource == "isotropic") resource = IsotropicResource{p};
    if (custom) resource = CustomResource{*custom};
    const PBTSetup setup(a.d, a.ports, resource, alice, design);
    const double exact = pbt_entanglement_fidelity(setup);
    report.value("F_exact", exact);
    report.value("FT_exact", teleportation_fidelity_from_F(exact, a.d));
    if (a.resource == "maxent") {
      report.value("gap_asym", std::abs(exact - asymptotic_F(a.ports, a.d).raw()));
    } else {
      const double ideal = pbt_entanglement_fidelity(setup.with_resource(MaxEntangledResource{}));
      const double thm1 = depolarized_resource_F(p, ideal, a.d);
      report.value("F_ideal_exact", ideal);
      report.value("F_thm1", thm1);
      report.value("FT_thm1", depolarized_resource_FT(p, ideal, a.d));
      report.value("gap_thm1", std::abs(exact - thm1));
      report.value("gap_thm2", std::abs(exact - isotropic_asymptotic_F(p, a.ports, a.d).raw()));
      report.value("gap_thm3", std::abs(exact - thm3.raw()));
    }
    if (a.choi) {
      const QuantumChannelChoi ch = pbt_channel_choi(setup);
      const double f_choi = entanglement_fidelity(ch);
      report.value("F_choi", f_choi);
      report.value("FT_choi", teleportation_fidelity_from_F(f_choi, a.d));
    }
  }
  if (!converged) report.warn("fully entangled fraction ascent did not converge");
  report.emit(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return converged ? 0 : kExitNotConverged;
}

struct SweepArgs {
  int d = 2;
  std::string m_range = "1..3";
  int m_step = 1;
  std::string p_list = "0,0.25,0.5,0.75,1";
  std::string resource = "isotropic";
  std::string state_file;
  std::string out;
};

int run_sweep_command(const SweepArgs& a) {
  SweepSpec spec;
  spec.d = a.d;
  std::tie(spec.m_first, spec.m_last) = parse_range(a.m_range);
  spec.m_step = a.m_step;
  if (a.resource == "isotropic") {
    spec.p_grid = parse_list(a.p_list);
  } else if (a.resource == "maxent") {
    spec.p_grid = {1.0};
  } else if (a.resource == "custom") {
    if (a.state_file.empty()) throw ValidationError("--resource custom needs --state FILE");
    spec.custom = read_density_file(a.state_file);
  } else {
    throw ValidationError("--resource must be maxent, isotropic or custom");
  }
  const auto rows = run_sweep(spec);

  if (a.out == "-") {
    write_sweep_csv(std::cout, rows);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file '" + a.out + "'");
    write_sweep_csv(out, rows);
    if (!out) throw ValidationError("failed writing output file '" + a.out + "'");
  }
  for (const auto& r : rows)
    if (!r.warning.empty()) return kExitNotConverged;
  return 0;
}

struct ControlArgs {
  std::string selector;
  double a = 1.0;
  double b = 0.0;
  std::string w_list;
  std::string state_file;
  std::string party;
  bool minimal = false;
  int ports = 10;
  int theta_steps = 181;
  int phi_steps = 361;
  bool json = false;
};

int run_control_power(const ControlArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  Report report("control-power", args.json);
  report.input("state", args.selector);
  report.input("M", args.ports);

  std::optional<TripartiteState> state;
  if (args.selector == "ghz") {
    const auto c = normalized_coefficients({args.a, args.b}, "ghz");
    report.input("a", args.a);
    report.input("b", args.b);
    state = ghz_extended(c[0], c[1]);
  } else if (args.selector == "wclass") {
    auto w = parse_list(args.w_list);
    if (w.size() != 4) throw ValidationError("wclass: --w needs four comma-separated coefficients");
    report.input("w", w);
    w = normalized_coefficients(w, "wclass");
    state = w_class(w[0], w[1], w[2], w[3]);
  } else {
    report.input("state_file", args.state_file);
    state = read_tripartite_file(args.state_file);
  }
  if (args.minimal == !args.party.empty()) throw ValidationError("give exactly one of --party or --min");

  CtOptimizerOptions options;
  options.theta_steps = args.theta_steps;
  options.phi_steps = args.phi_steps;

  bool converged = true;
  auto emit_party = [&](const ControlPowerReport& r) {
    const std::string tag(1, party_label(r.party));
    report.value("f_ct[" + tag + "]", r.f_ct);
    report.value("f_ct_M[" + tag + "]", r.f_ct_M);
    report.value("f_nc_M[" + tag + "]", r.f_nc_M);
    report.value("power_M[" + tag + "]", r.power_M);
    converged = converged && r.trace.converged;
  };

  if (args.minimal) {
    std::optional<ControlPowerReport> best;
    for (Party party : kAllParties) {
      const ControlPowerReport r = control_power(*state, party, args.ports, options);
      emit_party(r);
      if (!best || r.power_M < best->power_M - 1e-12) best = r;
    }
    report.value("minimal_control_power", best->power_M);
    report.value("minimal_party", std::string(1, party_label(best->party)));
  } else {
    report.input("party", args.party);
    emit_party(control_power(*state, parse_party(args.party), args.ports, options));
  }
  if (!converged) report.warn("measurement optimizer did not converge");
  report.emit(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return converged ? 0 : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pbtlab: exact port-based teleportation and control-power laboratory"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::function<int()> action;

  std::string fef_file;
  std::uint64_t fef_seed = 0;
  bool fef_json = false;
  auto* fef = app.add_subcommand("fef", "Fully entangled fraction of a bipartite state file");
  fef->add_option("state_file", fef_file, "State file (JSON: dims, matrix)")->required();
  fef->add_option("--seed", fef_seed, "Seed for the multi-start ascent (d > 2)");
  fef->add_flag("--json", fef_json, "Emit a JSON run record");
  fef->callback([&] { action = [&] { return run_fef(fef_file, fef_seed, fef_json); }; });

  PbtArgs pbt_args;
  auto* pbt = app.add_subcommand("pbt", "Exact and leading-order PBT fidelities");
  pbt->add_option("--d", pbt_args.d, "Local dimension")->required();
  pbt->add_option("--M", pbt_args.ports, "Number of ports")->required();
  pbt->add_option("--resource", pbt_args.resource, "maxent | isotropic | custom");
  pbt->add_option("--p", pbt_args.p, "Isotropic parameter p in [0, 1]");
  pbt->add_option("--state", pbt_args.state_file, "Resource state file for --resource custom");
  pbt->add_option("--operator", pbt_args.operator_spec, "Alice's operation: state-format FILE or 'random'");
  pbt->add_option("--seed", pbt_args.seed, "Seed for random operations");
  pbt->add_option("--design", pbt_args.design, "Measurement ensemble: standard | matched");
  pbt->add_flag("--choi", pbt_args.choi, "Also build the full channel Choi state");
  pbt->add_flag("--asymptotic-only", pbt_args.asymptotic_only, "Skip the exact simulation");
  pbt->add_flag("--json", pbt_args.json, "Emit a JSON run record");
  pbt->callback([&] { action = [&] { return run_pbt(pbt_args); }; });

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "CSV sweep over (M, p)");
  sweep->add_option("--d", sweep_args.d, "Local dimension");
  sweep->add_option("--M", sweep_args.m_range, "Port range N or A..B");
  sweep->add_option("--M-step", sweep_args.m_step, "Port step");
  sweep->add_option("--p", sweep_args.p_list, "Comma-separated isotropic parameters");
  sweep->add_option("--resource", sweep_args.resource, "isotropic | maxent | custom");
  sweep->add_option("--state", sweep_args.state_file, "Resource state file for --resource custom");
  sweep->add_option("--out", sweep_args.out, "Output CSV path, '-' for stdout")->required();
  sweep->callback([&] { action = [&] { return run_sweep_command(sweep_args); }; });

  ControlArgs control_args;
  auto* control = app.add_subcommand("control-power", "Control power of a three-qubit pure state");
  control->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--party", control_args.party, "Controller: A | B | C");
    sub->add_flag("--min", control_args.minimal, "Minimal control power over all controllers");
    sub->add_option("--M", control_args.ports, "Number of ports");
    sub->add_option("--theta-steps", control_args.theta_steps, "Polar grid points");
    sub->add_option("--phi-steps", control_args.phi_steps, "Azimuthal grid points");
    sub->add_flag("--json", control_args.json, "Emit a JSON run record");
  };
  auto* ghz = control->add_subcommand("ghz", "a|000> + b|111>");
  ghz->add_option("--a", control_args.a)->required();
  ghz->add_option("--b", control_args.b)->required();
  add_common(ghz);
  ghz->callback([&] { control_args.selector = "ghz"; });
  auto* wclass = control->add_subcommand("wclass", "w0|000> + w1|100> + w2|101> + w3|110>");
  wclass->add_option("--w", control_args.w_list, "w0,w1,w2,w3")->required();
  add_common(wclass);
  wclass->callback([&] { control_args.selector = "wclass"; });
  auto* from_file = control->add_subcommand("file", "Pure state from a state file on {2, 2, 2}");
  from_file->add_option("--state", control_args.state_file)->required();
  add_common(from_file);
  from_file->callback([&] { control_args.selector = "file"; });
  control->callback([&] { action = [&] { return run_control_power(control_args); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    return action ? action() : kExitValidation;
  } catch (const DimensionCapError& e) {
    std::cerr << "error: " << e.what() << " (set PBTLAB_DIM_CAP to raise the cap)\n";
    return kExitCap;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
