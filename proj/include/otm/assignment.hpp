#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace otm {

/// Square assignment problem solvers over a row-major n x n cost matrix.
/// assignment[i] is the column matched to row i.

/// Exhaustive search; first optimum in lexicographic permutation order wins
/// ties. Intended for n <= 8.
inline std::vector<int> assignment_bruteforce(const std::vector<double>& cost, int n) {
  if (n <= 0 || static_cast<int>(cost.size()) != n * n)
    throw std::invalid_argument("assignment: cost matrix must be n x n");
  if (n > 10) throw std::invalid_argument("assignment_bruteforce: n too large");
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += cost[static_cast<std::size_t>(i * n + perm[i])];
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Kuhn–Munkres with dual potentials, O(n^3). Ties resolve by the stable
/// reduced-cost scan order, which matters only for degenerate equidistant
/// configurations (the optimal cost is unique regardless).
inline std::vector<int> assignment_hungarian(const std::vector<double>& cost, int n) {
  if (n <= 0 || static_cast<int>(cost.size()) != n * n)
    throw std::invalid_argument("assignment: cost matrix must be n x n");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[static_cast<std::size_t>((i0 - 1) * n + (j - 1))] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) assignment[p[j] - 1] = j - 1;
  return assignment;
}

}  // namespace otm
