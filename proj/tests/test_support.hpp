#pragma once

#include <random>

#include "pbtlab/tensor_core.hpp"

namespace pbtlab::testing {

inline Eigen::MatrixXcd random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

inline Operator random_hermitian(const SubsystemShape& shape, std::mt19937_64& rng) {
  const Index n = shape.dimension();
  const Eigen::MatrixXcd g = random_complex(n, n, rng);
  return Operator(shape, (g + g.adjoint()) / 2.0);
}

inline Operator random_psd(const SubsystemShape& shape, std::mt19937_64& rng, Index rank) {
  const Index n = shape.dimension();
  const Eigen::MatrixXcd g = random_complex(n, rank, rng);
  return Operator(shape, g * g.adjoint());
}

inline Eigen::MatrixXcd diag(std::initializer_list<double> values) {
  Eigen::VectorXcd v(static_cast<Index>(values.size()));
  Index k = 0;
  for (double x : values) v(k++) = x;
  return v.asDiagonal();
}

}  // namespace pbtlab::testing
