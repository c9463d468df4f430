#pragma once

#include <functional>

#include <Eigen/Core>

#include "otm/embedding.hpp"
#include "otm/graph.hpp"
#include "otm/mlp.hpp"
#include "otm/rng.hpp"

namespace otm {

/// Builds the forward pass of a scalar potential on a [n, D] batch node and
/// returns its [n] per-sample values. Network-backed and closed-form
/// potentials share this shape so losses and tests can swap them.
using PotentialBuilder = std::function<NodeId(Graph&, NodeId)>;

inline PotentialBuilder potential_of(const MlpRef& ref) {
  if (ref.net->spec.output_dim != 1)
    throw std::invalid_argument("potential networks must have scalar output");
  return [ref](Graph& g, NodeId y) {
    return g.reshape(ref.forward(g, y), {g.shape(y)[0]});
  };
}

/// psi(y) = 0.5 ||y - center||^2 as a graph potential (parameter-free).
inline PotentialBuilder quadratic_potential(const Eigen::VectorXd& center) {
  std::vector<double> c(center.data(), center.data() + center.size());
  return [c](Graph& g, NodeId y) {
    const Index n = g.shape(y)[0];
    NodeId cn = g.constant(Tensor({static_cast<Index>(c.size())}, c));
    NodeId diff = g.sub(y, g.rep_rows(cn, n));
    return g.scale(g.row_sum(g.square(diff)), 0.5);
  };
}

// ---- loss node builders (shared by the training loop and the wrappers) ----

/// mean psi(y) - mean psi(G(x)); inputs are the [n] per-sample potentials.
inline NodeId psi_loss_node(Graph& g, NodeId psi_on_y, NodeId psi_on_gx) {
  return g.sub(g.mean(psi_on_y), g.mean(psi_on_gx));
}

/// mean over x of [ psi(G(x)) - <Q(x), G(x)> ].
inline NodeId g_loss_node(Graph& g, NodeId psi_on_gx, NodeId qx, NodeId gx) {
  NodeId inner = g.row_sum(g.mul(qx, gx));
  return g.sub(g.mean(psi_on_gx), g.mean(inner));
}

/// mean over pairs of (||grad psi(yhat)|| - 1)^2; yhat is a [n, D] node of
/// interpolates, treated as data.
inline NodeId gradient_penalty_node(Graph& g, const PotentialBuilder& psi, NodeId yhat) {
  NodeId grads = g.gradient_node(g.sum(psi(g, yhat)), yhat);
  NodeId norms = g.sqrt_(g.row_sum(g.square(grads)));
  return g.mean(g.square(g.add_scalar(norms, -1.0)));
}

/// || mean over x of grad psi(G(x)) ||  (norm of the batch-mean gradient).
inline NodeId gradient_optimality_node(Graph& g, const PotentialBuilder& psi, NodeId gx) {
  NodeId grads = g.gradient_node(g.sum(psi(g, gx)), gx);
  const Index n = g.shape(gx)[0];
  NodeId mean_grad = g.scale(g.col_sum(grads), 1.0 / static_cast<double>(n));
  return g.sqrt_(g.norm_sq(mean_grad));
}

// ---- standalone evaluation wrappers ----------------------------------------

namespace detail {
inline void check_batch(const PointCloud& pc, Index dim, const char* what) {
  if (pc.size() == 0) throw std::invalid_argument(std::string(what) + ": empty batch");
  if (pc.dim != dim)
    throw std::invalid_argument(std::string(what) + ": batch dimension " +
                                std::to_string(pc.dim) + " != expected " + std::to_string(dim));
}
}  // namespace detail

/// L_psi = (1/|Y|) sum psi(y) - (1/|X|) sum psi(G(x)). The generator output
/// enters as data: no gradient flows into G from this loss.
inline double psi_loss(const Mlp& psi, const Mlp& gen, const PointCloud& x,
                       const PointCloud& y) {
  detail::check_batch(x, gen.spec.input_dim, "psi_loss");
  detail::check_batch(y, psi.spec.input_dim, "psi_loss");
  if (gen.spec.output_dim != psi.spec.input_dim)
    throw std::invalid_argument("psi_loss: generator output does not match potential input");
  const PointCloud gx = mlp_apply(gen, x);
  Graph g;
  MlpRef ref = register_mlp(g, psi, "psi");
  PotentialBuilder pb = potential_of(ref);
  NodeId yn = g.constant(y.tensor(), "y");
  NodeId gxn = g.constant(gx.tensor(), "gx");
  return g.evaluate(psi_loss_node(g, pb(g, yn), pb(g, gxn))).value();
}

/// L_G = (1/|X|) sum [ psi(G(x)) - <Q(x), G(x)> ]; psi is treated as fixed.
inline double g_loss(const Mlp& psi, const Mlp& gen, const Embedding& q, const PointCloud& x) {
  detail::check_batch(x, gen.spec.input_dim, "g_loss");
  const PointCloud qx = embed(q, x);
  if (qx.dim != psi.spec.input_dim || gen.spec.output_dim != psi.spec.input_dim)
    throw std::invalid_argument("g_loss: dimension mismatch");
  Graph g;
  MlpRef gref = register_mlp(g, gen, "g");
  MlpRef pref = register_mlp(g, psi, "psi");
  NodeId xn = g.constant(x.tensor(), "x");
  NodeId qxn = g.constant(qx.tensor(), "qx");
  NodeId gxn = gref.forward(g, xn);
  NodeId pgx = potential_of(pref)(g, gxn);
  return g.evaluate(g_loss_node(g, pgx, qxn, gxn)).value();
}

/// Interpolates yhat = t * real + (1 - t) * fake with a fresh uniform t per
/// pair and evaluates the penalty.
inline double gradient_penalty(const Mlp& psi, const PointCloud& fake, const PointCloud& real,
                               Rng& rng) {
  if (fake.dim != real.dim || fake.size() != real.size())
    throw std::invalid_argument("gradient_penalty: fake/real mismatch");
  detail::check_batch(fake, psi.spec.input_dim, "gradient_penalty");
  PointCloud yhat(fake.dim);
  yhat.data.resize(fake.data.size());
  for (Index i = 0; i < fake.size(); ++i) {
    const double t = rng.uniform();
    for (Index j = 0; j < fake.dim; ++j)
      yhat.at(i, j) = t * real.at(i, j) + (1.0 - t) * fake.at(i, j);
  }
  Graph g;
  MlpRef ref = register_mlp(g, psi, "psi");
  NodeId yn = g.constant(yhat.tensor(), "yhat");
  return g.evaluate(gradient_penalty_node(g, potential_of(ref), yn)).value();
}

inline double gradient_optimality(const Mlp& psi, const Mlp& gen, const PointCloud& x) {
  detail::check_batch(x, gen.spec.input_dim, "gradient_optimality");
  if (gen.spec.output_dim != psi.spec.input_dim)
    throw std::invalid_argument("gradient_optimality: dimension mismatch");
  const PointCloud gx = mlp_apply(gen, x);
  Graph g;
  MlpRef ref = register_mlp(g, psi, "psi");
  NodeId gxn = g.constant(gx.tensor(), "gx");
  return g.evaluate(gradient_optimality_node(g, potential_of(ref), gxn)).value();
}

}  // namespace otm
