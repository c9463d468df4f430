#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "otm/graph.hpp"
#include "otm/point_cloud.hpp"
#include "otm/rng.hpp"

namespace otm {

enum class Activation { kLeakyRelu, kTanh };

inline constexpr double kLeakyReluSlope = 0.01;

inline std::string activation_name(Activation a) {
  return a == Activation::kLeakyRelu ? "leaky_relu" : "tanh";
}
inline Activation activation_from_name(const std::string& s) {
  if (s == "leaky_relu") return Activation::kLeakyRelu;
  if (s == "tanh") return Activation::kTanh;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

/// Dense feed-forward spec. hidden_dims may be empty, which degenerates to a
/// single linear layer; the last layer is always linear.
struct MlpSpec {
  Index input_dim = 0;
  std::vector<Index> hidden_dims{128, 128, 128};
  Index output_dim = 0;
  Activation activation = Activation::kLeakyRelu;
  std::uint64_t seed = 0;

  std::vector<Index> dims() const {
    std::vector<Index> d;
    d.push_back(input_dim);
    d.insert(d.end(), hidden_dims.begin(), hidden_dims.end());
    d.push_back(output_dim);
    return d;
  }

  void validate() const {
    if (input_dim <= 0 || output_dim <= 0)
      throw std::invalid_argument("mlp input/output dimensions must be positive");
    for (Index h : hidden_dims)
      if (h <= 0) throw std::invalid_argument("mlp hidden dimensions must be positive");
  }
};

struct Mlp {
  MlpSpec spec;
  std::vector<Tensor> weights;  // layer k: [dims[k+1], dims[k]]
  std::vector<Tensor> biases;   // layer k: [dims[k+1]]

  std::size_t layer_count() const { return weights.size(); }

  std::vector<Tensor*> params() {
    std::vector<Tensor*> p;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      p.push_back(&weights[k]);
      p.push_back(&biases[k]);
    }
    return p;
  }
};

/// Uniform Glorot initialization: weights ~ U[-s, s] with
/// s = sqrt(6 / (fan_in + fan_out)), biases zero, fully seeded.
inline Mlp mlp_init(const MlpSpec& spec) {
  spec.validate();
  Mlp net;
  net.spec = spec;
  const std::vector<Index> dims = spec.dims();
  Rng rng(spec.seed);
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const Index fan_in = dims[k], fan_out = dims[k + 1];
    const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor w({fan_out, fan_in});
    for (double& v : w.data) v = rng.uniform(-s, s);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Tensor({fan_out}));
  }
  return net;
}

/// A network registered in a graph: parameter leaves plus a forward builder.
/// forward() may be called several times (e.g. on real and fake batches);
/// all instances share the same parameter leaves.
struct MlpRef {
  const Mlp* net = nullptr;
  std::vector<NodeId> weights;
  std::vector<NodeId> biases;

  std::vector<NodeId> params() const {
    std::vector<NodeId> p;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      p.push_back(weights[k]);
      p.push_back(biases[k]);
    }
    return p;
  }

  /// Pushes the network's current parameter values into the leaves.
  void rebind(Graph& g) const {
    for (std::size_t k = 0; k < weights.size(); ++k) {
      g.set_leaf(weights[k], net->weights[k]);
      g.set_leaf(biases[k], net->biases[k]);
    }
  }

  /// x: [n, input_dim] -> [n, output_dim].
  NodeId forward(Graph& g, NodeId x) const {
    NodeId h = x;
    const std::size_t layers = weights.size();
    for (std::size_t k = 0; k < layers; ++k) {
      h = g.affine(h, weights[k], biases[k]);
      if (k + 1 < layers) {
        h = net->spec.activation == Activation::kLeakyRelu ? g.leaky_relu(h, kLeakyReluSlope)
                                                           : g.tanh_(h);
      }
    }
    return h;
  }
};

inline MlpRef register_mlp(Graph& g, const Mlp& net, const std::string& name) {
  MlpRef ref;
  ref.net = &net;
  for (std::size_t k = 0; k < net.weights.size(); ++k) {
    ref.weights.push_back(g.leaf(net.weights[k].shape, name + ".w" + std::to_string(k)));
    ref.biases.push_back(g.leaf(net.biases[k].shape, name + ".b" + std::to_string(k)));
  }
  ref.rebind(g);
  return ref;
}

/// Forward pass over a batch through a fresh graph.
inline PointCloud mlp_apply(const Mlp& net, const PointCloud& batch) {
  if (batch.dim != net.spec.input_dim)
    throw std::invalid_argument("mlp_apply: batch dimension " + std::to_string(batch.dim) +
                                " != input_dim " + std::to_string(net.spec.input_dim));
  Graph g;
  MlpRef ref = register_mlp(g, net, "net");
  NodeId x = g.constant(batch.tensor(), "x");
  NodeId y = ref.forward(g, x);
  return PointCloud::from_tensor(g.evaluate(y));
}

/// Per-row input gradients of a scalar-output network: for y [n, d] returns
/// the [n, d] node whose row i is the gradient of net(y_i) w.r.t. y_i. The
/// node remains composable and differentiable w.r.t. the parameter leaves.
inline NodeId input_gradient_node(Graph& g, const MlpRef& ref, NodeId y) {
  if (ref.net->spec.output_dim != 1)
    throw std::invalid_argument("input gradient requires a scalar-output network");
  NodeId out = ref.forward(g, y);
  return g.gradient_node(g.sum(out), y);
}

/// Gradient of a scalar-output network at a single point.
inline Tensor input_gradient(const Mlp& net, const std::vector<double>& point) {
  Graph g;
  MlpRef ref = register_mlp(g, net, "net");
  NodeId y = g.constant(Tensor({1, static_cast<Index>(point.size())}, point), "y");
  NodeId gnode = input_gradient_node(g, ref, y);
  Tensor row = g.evaluate(gnode);
  return Tensor({row.shape[1]}, row.data);
}

}  // namespace otm
