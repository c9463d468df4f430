#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "otm/graph.hpp"
#include "otm/rng.hpp"

namespace otm::test {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

/// Central finite difference of a scalar graph output w.r.t. one leaf entry.
inline double finite_difference(Graph& g, NodeId out, NodeId leaf, Index entry,
                                double step = 1e-5) {
  Tensor base = g.node(leaf).value;
  Tensor bumped = base;
  bumped.data[entry] = base.data[entry] + step;
  g.set_leaf(leaf, bumped);
  const double fp = g.evaluate(out).value();
  bumped.data[entry] = base.data[entry] - step;
  g.set_leaf(leaf, bumped);
  const double fm = g.evaluate(out).value();
  g.set_leaf(leaf, base);
  return (fp - fm) / (2.0 * step);
}

/// Checks every entry of every requested leaf against central differences.
/// Returns the worst relative error encountered.
inline double max_grad_fd_error(Graph& g, NodeId out, const std::vector<NodeId>& leaves,
                                double step = 1e-5) {
  std::vector<Tensor> grads = g.gradient(out, leaves);
  double worst = 0.0;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    for (Index i = 0; i < grads[k].size(); ++i) {
      const double fd = finite_difference(g, out, leaves[k], i, step);
      worst = std::max(worst, rel_err(grads[k].data[i], fd));
    }
  }
  return worst;
}

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

/// Random tensor whose entries stay at least `margin` away from zero, for
/// kink-free finite differences through leaky_relu.
inline Tensor random_tensor_off_kink(Shape shape, Rng& rng, double margin) {
  Tensor t(std::move(shape));
  for (double& v : t.data) {
    double x = rng.uniform(margin, 1.0);
    v = rng.uniform() < 0.5 ? -x : x;
  }
  return t;
}

}  // namespace otm::test
