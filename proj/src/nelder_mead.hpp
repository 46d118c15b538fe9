#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace pbtlab::detail {

template <std::size_t N>
struct SimplexResult {
  std::array<double, N> x;
  double value;
  int iterations;
  bool converged;
};

// Nelder-Mead minimization (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2). Stops once the spread of vertex values is <= tol.
template <std::size_t N, typename F>
SimplexResult<N> nelder_mead(F&& f, const std::array<double, N>& start, const std::array<double, N>& step,
                             double tol, int max_iter) {
  using Point = std::array<double, N>;
  std::array<Point, N + 1> pts;
  std::array<double, N + 1> vals;
  pts[0] = start;
  for (std::size_t k = 0; k < N; ++k) {
    pts[k + 1] = start;
    pts[k + 1][k] += step[k];
  }
  for (std::size_t k = 0; k <= N; ++k) vals[k] = f(pts[k]);

  auto blend = [](const Point& a, const Point& b, double t) {
    Point out;
    for (std::size_t k = 0; k < N; ++k) out[k] = a[k] + t * (b[k] - a[k]);
    return out;
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    std::array<std::size_t, N + 1> order;
    for (std::size_t k = 0; k <= N; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return vals[i] < vals[j]; });
    {
      auto p2 = pts;
      auto v2 = vals;
      for (std::size_t k = 0; k <= N; ++k) {
        pts[k] = p2[order[k]];
        vals[k] = v2[order[k]];
      }
    }
    if (vals[N] - vals[0] <= tol) return {pts[0], vals[0], it, true};

    Point centroid{};
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t c = 0; c < N; ++c) centroid[c] += pts[k][c] / static_cast<double>(N);

    const Point reflected = blend(centroid, pts[N], -1.0);
    const double fr = f(reflected);
    if (fr < vals[0]) {
      const Point expanded = blend(centroid, pts[N], -2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[N] = expanded;
        vals[N] = fe;
      } else {
        pts[N] = reflected;
        vals[N] = fr;
      }
      continue;
    }
    if (fr < vals[N - 1]) {
      pts[N] = reflected;
      vals[N] = fr;
      continue;
    }
    const bool outside = fr < vals[N];
    const Point contracted = outside ? blend(centroid, reflected, 0.5) : blend(centroid, pts[N], 0.5);
    const double fc = f(contracted);
    if (fc < (outside ? fr : vals[N])) {
      pts[N] = contracted;
      vals[N] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= N; ++k) {
      pts[k] = blend(pts[0], pts[k], 0.5);
      vals[k] = f(pts[k]);
    }
  }
  const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  return {pts[best], vals[best], it, false};
}

}  // namespace pbtlab::detail
