#pragma once

// State file format (JSON text):
//   { "dims": [2, 2], "matrix": [[re, im], [re, im], ...] }
// `matrix` lists the n*n entries row-major, n = product of dims.

#include <filesystem>
#include <string>

#include "pbtlab/cpbt.hpp"
#include "pbtlab/quantum_states.hpp"

namespace pbtlab {

Operator parse_operator(const std::string& text);
Operator read_operator_file(const std::filesystem::path& path);

/// Parses and validates the density-operator invariants; the ValidationError
/// message names the invariant that failed.
DensityOperator parse_density_operator(const std::string& text);
DensityOperator read_density_file(const std::filesystem::path& path);

/// Pure three-party state stored as its (rank-1) density matrix on {d, d, d}.
TripartiteState read_tripartite_file(const std::filesystem::path& path);

std::string format_operator(const Operator& op);
void write_operator_file(const std::filesystem::path& path, const Operator& op);

}  // namespace pbtlab
