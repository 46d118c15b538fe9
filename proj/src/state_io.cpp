#include "pbtlab/state_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pbtlab {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open state file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Operator parse_operator(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("state file: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dims") || !doc.contains("matrix"))
    throw ValidationError("state file: expected an object with fields 'dims' and 'matrix'");
  const auto& dims_json = doc["dims"];
  if (!dims_json.is_array() || dims_json.empty())
    throw ValidationError("state file: 'dims' must be a non-empty list of integers");
  std::vector<int> dims;
  for (const auto& d : dims_json) {
    if (!d.is_number_integer()) throw ValidationError("state file: 'dims' must be a list of integers");
    dims.push_back(d.get<int>());
  }
  const SubsystemShape shape(dims);
  const Index n = shape.dimension();

  const auto& entries = doc["matrix"];
  if (!entries.is_array() || static_cast<Index>(entries.size()) != n * n)
    throw ValidationError("state file: 'matrix' must hold " + std::to_string(n * n) + " [re, im] pairs");
  Eigen::MatrixXcd m(n, n);
  for (Index k = 0; k < n * n; ++k) {
    const auto& pair = entries[static_cast<std::size_t>(k)];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw ValidationError("state file: entry " + std::to_string(k) + " is not an [re, im] pair");
    m(k / n, k % n) = cplx(pair[0].get<double>(), pair[1].get<double>());
  }
  return Operator(shape, std::move(m));
}

Operator read_operator_file(const std::filesystem::path& path) { return parse_operator(slurp(path)); }

DensityOperator parse_density_operator(const std::string& text) {
  const Operator op = parse_operator(text);
  if (auto why = density_violation(op)) throw ValidationError("state file: density operator " + *why);
  return DensityOperator(op);
}

DensityOperator read_density_file(const std::filesystem::path& path) { return parse_density_operator(slurp(path)); }

TripartiteState read_tripartite_file(const std::filesystem::path& path) {
  const DensityOperator rho = read_density_file(path);
  const auto dec = eigh(rho.matrix());
  const Index n = rho.dimension();
  if (dec.values(n - 1) < 1.0 - 1e-9)
    throw ValidationError("state file: three-party state must be pure (largest eigenvalue " +
                          std::to_string(dec.values(n - 1)) + ")");
  Eigen::VectorXcd v = dec.vectors.col(n - 1);
  v.normalize();
  return TripartiteState(Ket(rho.shape(), std::move(v)));
}

std::string format_operator(const Operator& op) {
  nlohmann::json doc;
  doc["dims"] = op.shape().dims();
  nlohmann::json entries = nlohmann::json::array();
  const Index n = op.dimension();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) entries.push_back({op.matrix()(i, j).real(), op.matrix()(i, j).imag()});
  doc["matrix"] = std::move(entries);
  return doc.dump() + "\n";
}

void write_operator_file(const std::filesystem::path& path, const Operator& op) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write state file '" + path.string() + "'");
  out << format_operator(op);
}

}  // namespace pbtlab
