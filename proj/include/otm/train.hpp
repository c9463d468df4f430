#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "otm/adam.hpp"
#include "otm/embedding.hpp"
#include "otm/losses.hpp"
#include "otm/mlp.hpp"

namespace otm {

enum class Regularizer { kNone, kGradientPenalty, kGradientOptimality };

inline std::string regularizer_name(Regularizer r) {
  switch (r) {
    case Regularizer::kNone: return "none";
    case Regularizer::kGradientPenalty: return "gradient_penalty";
    case Regularizer::kGradientOptimality: return "gradient_optimality";
  }
  return "?";
}

inline Regularizer regularizer_from_name(const std::string& s) {
  if (s == "none") return Regularizer::kNone;
  if (s == "gradient_penalty") return Regularizer::kGradientPenalty;
  if (s == "gradient_optimality") return Regularizer::kGradientOptimality;
  throw std::invalid_argument("unknown regularizer '" + s + "'");
}

struct TrainConfig {
  Index batch_size = 400;
  Index outer_iters = 2500;
  int k_psi = 1;
  int k_g = 16;
  double lr_g = 1e-3;
  double lr_psi = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.99;
  Regularizer regularizer = Regularizer::kGradientPenalty;
  double lambda = 0.1;
  std::uint64_t seed = 0;
  bool adam_bias_correction = true;  // fault-injection hook for `verify`

  void validate() const {
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (outer_iters < 0) throw std::invalid_argument("train: outer_iters must be >= 0");
    if (k_psi < 1 || k_g < 1) throw std::invalid_argument("train: K_psi and K_G must be >= 1");
    if (lambda < 0.0) throw std::invalid_argument("train: lambda must be nonnegative");
    if (regularizer == Regularizer::kNone && lambda != 0.0)
      throw std::invalid_argument("train: lambda must be 0 when regularizer is none");
  }
};

struct IterRecord {
  Index iter = 0;
  double loss_psi = 0.0;
  double loss_g = 0.0;
  double reg = 0.0;
};

struct TrainHistory {
  std::vector<IterRecord> records;
};

enum class TrainStatus { kOk, kDiverged };

struct TrainResult {
  TrainStatus status = TrainStatus::kOk;
  Index completed_iters = 0;
  std::string diagnostic;
};

using BatchFn = std::function<PointCloud(Index)>;

/// Alternating SGDA on the saddle objective: each outer iteration runs K_psi
/// potential updates (fresh X and Y batches, regularizer attached to the
/// potential loss) followed by K_G generator updates (fresh X batches).
/// Deterministic given the config seed and deterministic samplers. On a
/// non-finite loss the nets are rolled back to the last completed outer
/// iteration and the result reports the divergence.
inline TrainResult train(const TrainConfig& cfg, const BatchFn& sample_mu,
                         const BatchFn& sample_nu, const Embedding& q, Mlp& gen, Mlp& psi,
                         TrainHistory* history = nullptr,
                         const std::function<void(Index)>& on_iter = {}) {
  cfg.validate();
  q.validate();
  const Index b = cfg.batch_size;
  const Index h = gen.spec.input_dim;
  const Index d = gen.spec.output_dim;
  if (q.input_dim != h || q.output_dim != d || psi.spec.input_dim != d ||
      psi.spec.output_dim != 1)
    throw std::invalid_argument("train: embedding/network dimensions are inconsistent");

  const bool use_gp = cfg.regularizer == Regularizer::kGradientPenalty && cfg.lambda > 0.0;
  const bool use_go = cfg.regularizer == Regularizer::kGradientOptimality && cfg.lambda > 0.0;

  // Generator forward graph (produces the fakes consumed by the psi phase).
  Graph fwd;
  MlpRef fwd_gen = register_mlp(fwd, gen, "g");
  const NodeId fwd_x = fwd.leaf({b, h}, "x");
  const NodeId fwd_out = fwd_gen.forward(fwd, fwd_x);

  // Potential phase graph.
  Graph pg;
  MlpRef pg_psi = register_mlp(pg, psi, "psi");
  PotentialBuilder pg_pot = potential_of(pg_psi);
  const NodeId pg_y = pg.leaf({b, d}, "y");
  const NodeId pg_gx = pg.leaf({b, d}, "gx");
  const NodeId pg_base = psi_loss_node(pg, pg_pot(pg, pg_y), pg_pot(pg, pg_gx));
  NodeId pg_yhat = kNoNode;
  NodeId pg_reg = kNoNode;
  if (use_gp) {
    pg_yhat = pg.leaf({b, d}, "yhat");
    pg_reg = gradient_penalty_node(pg, pg_pot, pg_yhat);
  } else if (use_go) {
    pg_reg = gradient_optimality_node(pg, pg_pot, pg_gx);
  }
  const NodeId pg_total =
      pg_reg == kNoNode ? pg_base : pg.add(pg_base, pg.scale(pg_reg, cfg.lambda));
  const std::vector<NodeId> pg_params = pg_psi.params();
  const std::vector<NodeId> pg_grads = pg.gradient_nodes(pg_total, pg_params);

  // Generator phase graph (potential parameters enter as data).
  Graph gg;
  MlpRef gg_gen = register_mlp(gg, gen, "g");
  MlpRef gg_psi = register_mlp(gg, psi, "psi");
  const NodeId gg_x = gg.leaf({b, h}, "x");
  const NodeId gg_qx = gg.leaf({b, d}, "qx");
  const NodeId gg_gx = gg_gen.forward(gg, gg_x);
  const NodeId gg_loss = g_loss_node(gg, potential_of(gg_psi)(gg, gg_gx), gg_qx, gg_gx);
  const std::vector<NodeId> gg_params = gg_gen.params();
  const std::vector<NodeId> gg_grads = gg.gradient_nodes(gg_loss, gg_params);

  AdamConfig psi_adam_cfg{cfg.lr_psi, cfg.beta1, cfg.beta2, 1e-8, cfg.adam_bias_correction};
  AdamConfig gen_adam_cfg{cfg.lr_g, cfg.beta1, cfg.beta2, 1e-8, cfg.adam_bias_correction};
  Adam psi_adam(psi_adam_cfg, psi.params());
  Adam gen_adam(gen_adam_cfg, gen.params());

  Rng gp_rng(mix_seed(cfg.seed, 0x6770u));  // interpolation draws

  auto snapshot = [&] { return std::make_pair(gen, psi); };
  auto restore = [&](const std::pair<Mlp, Mlp>& snap) {
    gen = snap.first;
    psi = snap.second;
  };
  std::pair<Mlp, Mlp> last_good = snapshot();

  TrainResult result;
  for (Index iter = 0; iter < cfg.outer_iters; ++iter) {
    IterRecord rec;
    rec.iter = iter;
    try {
      for (int k = 0; k < cfg.k_psi; ++k) {
        const PointCloud x = sample_mu(b);
        const PointCloud y = sample_nu(b);
        fwd.set_leaf(fwd_x, x.tensor());
        const Tensor fake = fwd.evaluate(fwd_out);
        pg.set_leaf(pg_y, y.tensor());
        pg.set_leaf(pg_gx, fake);
        if (use_gp) {
          Tensor yhat({b, d});
          for (Index i = 0; i < b; ++i) {
            const double t = gp_rng.uniform();
            for (Index j = 0; j < d; ++j)
              yhat.at(i, j) = t * y.at(i, j) + (1.0 - t) * fake.at(i, j);
          }
          pg.set_leaf(pg_yhat, std::move(yhat));
        }
        rec.loss_psi = pg.evaluate(pg_base).value();
        rec.reg = pg_reg == kNoNode ? 0.0 : pg.evaluate(pg_reg).value();
        std::vector<Tensor> grads;
        grads.reserve(pg_grads.size());
        for (NodeId gid : pg_grads) grads.push_back(pg.evaluate(gid));
        psi_adam.step(psi.params(), grads);
        pg_psi.rebind(pg);
      }
      gg_psi.rebind(gg);
      for (int k = 0; k < cfg.k_g; ++k) {
        const PointCloud x = sample_mu(b);
        const PointCloud qx = embed(q, x);
        gg.set_leaf(gg_x, x.tensor());
        gg.set_leaf(gg_qx, qx.tensor());
        rec.loss_g = gg.evaluate(gg_loss).value();
        std::vector<Tensor> grads;
        grads.reserve(gg_grads.size());
        for (NodeId gid : gg_grads) grads.push_back(gg.evaluate(gid));
        gen_adam.step(gen.params(), grads);
        gg_gen.rebind(gg);
      }
      fwd_gen.rebind(fwd);
    } catch (const std::exception& e) {
      restore(last_good);
      result.status = TrainStatus::kDiverged;
      result.completed_iters = iter;
      result.diagnostic = std::string("training diverged at outer iteration ") +
                          std::to_string(iter) + ": " + e.what();
      return result;
    }
    last_good = snapshot();
    if (history) history->records.push_back(rec);
    if (on_iter) on_iter(iter);
  }
  result.completed_iters = cfg.outer_iters;
  return result;
}

}  // namespace otm
