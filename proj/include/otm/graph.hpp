#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "otm/tensor.hpp"

namespace otm {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class Op : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kMul,        // elementwise
  kScale,      // x * payload
  kAddScalar,  // x + payload
  kSMul,       // scalar node * tensor node
  kMatmul,
  kTranspose,
  kLeakyRelu,      // payload = negative slope
  kLeakyReluGrad,  // payload = negative slope; derivative taken as 0 a.e.
  kTanh,
  kSquare,
  kSqrt,
  kRecip,
  kSumAll,
  kRowSum,       // [n,d] -> [n]
  kColSum,       // [n,d] -> [d]
  kRepRows,      // [d] -> [n,d], payload_n
  kRepCols,      // [n] -> [n,d], payload_n
  kBcastScalar,  // [] -> shape
  kReshape,
  kDot,     // [d],[d] -> []
  kNormSq,  // sum of squares -> []
};

inline const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kScale: return "scale";
    case Op::kAddScalar: return "add_scalar";
    case Op::kSMul: return "smul";
    case Op::kMatmul: return "matmul";
    case Op::kTranspose: return "transpose";
    case Op::kLeakyRelu: return "leaky_relu";
    case Op::kLeakyReluGrad: return "leaky_relu_grad";
    case Op::kTanh: return "tanh";
    case Op::kSquare: return "square";
    case Op::kSqrt: return "sqrt";
    case Op::kRecip: return "recip";
    case Op::kSumAll: return "sum";
    case Op::kRowSum: return "row_sum";
    case Op::kColSum: return "col_sum";
    case Op::kRepRows: return "rep_rows";
    case Op::kRepCols: return "rep_cols";
    case Op::kBcastScalar: return "bcast_scalar";
    case Op::kReshape: return "reshape";
    case Op::kDot: return "dot";
    case Op::kNormSq: return "norm_sq";
  }
  return "?";
}

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reverse-mode autodiff tape over dense tensors.
///
/// Nodes are appended in topological order (inputs always precede the node).
/// Backward passes are emitted symbolically as further nodes of the same
/// graph, so a gradient is itself differentiable. Exactly one level of
/// nested differentiation is supported through gradient_node(); the final,
/// non-composable gradient() may be applied on top of it.
///
/// A Graph is confined to a single thread; distinct graphs are independent.
class Graph {
 public:
  struct Node {
    Op op = Op::kLeaf;
    NodeId a = kNoNode;
    NodeId b = kNoNode;
    double payload = 0.0;
    Index payload_n = 0;
    Shape shape;
    Tensor value;
    std::uint64_t epoch = 0;  // non-leaf: valid iff epoch == graph epoch
    bool has_value = false;   // leaves only
    std::int8_t level = 0;    // backward-emission depth
    std::string label;
  };

  Index size() const { return static_cast<Index>(nodes_.size()); }
  const Node& node(NodeId id) const { return nodes_.at(check(id)); }
  const Shape& shape(NodeId id) const { return nodes_.at(check(id)).shape; }

  NodeId leaf(Shape shape, std::string label = {}) {
    Node n;
    n.op = Op::kLeaf;
    n.shape = std::move(shape);
    n.label = std::move(label);
    return push(std::move(n));
  }

  NodeId constant(Tensor v, std::string label = {}) {
    NodeId id = leaf(v.shape, std::move(label));
    set_leaf(id, std::move(v));
    return id;
  }

  void set_leaf(NodeId id, Tensor v) {
    Node& n = nodes_.at(check(id));
    if (n.op != Op::kLeaf) throw GraphError("set_leaf on non-leaf " + describe(id));
    if (v.shape != n.shape)
      throw GraphError("set_leaf shape " + shape_str(v.shape) + " != declared " +
                       shape_str(n.shape) + " for " + describe(id));
    if (!v.all_finite()) throw GraphError("non-finite value assigned to " + describe(id));
    n.value = std::move(v);
    n.has_value = true;
    ++epoch_;
  }

  // ---- node constructors ------------------------------------------------

  NodeId add(NodeId a, NodeId b) { return binary_same(Op::kAdd, a, b); }
  NodeId sub(NodeId a, NodeId b) { return binary_same(Op::kSub, a, b); }
  NodeId mul(NodeId a, NodeId b) { return binary_same(Op::kMul, a, b); }

  NodeId scale(NodeId a, double c) {
    Node n = unary(Op::kScale, a);
    n.payload = c;
    return push(std::move(n));
  }
  NodeId add_scalar(NodeId a, double c) {
    Node n = unary(Op::kAddScalar, a);
    n.payload = c;
    return push(std::move(n));
  }
  NodeId neg(NodeId a) { return scale(a, -1.0); }

  NodeId smul(NodeId s, NodeId a) {
    require(shape(s).empty(), "smul scalar operand", s);
    Node n;
    n.op = Op::kSMul;
    n.a = s;
    n.b = a;
    n.shape = shape(a);
    return push(std::move(n));
  }

  NodeId matmul(NodeId a, NodeId b) {
    require(shape(a).size() == 2 && shape(b).size() == 2, "matmul rank-2 operands", a);
    if (shape(a)[1] != shape(b)[0])
      throw GraphError("matmul inner extents " + shape_str(shape(a)) + " x " +
                       shape_str(shape(b)));
    Node n;
    n.op = Op::kMatmul;
    n.a = a;
    n.b = b;
    n.shape = {shape(a)[0], shape(b)[1]};
    return push(std::move(n));
  }

  NodeId transpose(NodeId a) {
    require(shape(a).size() == 2, "transpose rank-2 operand", a);
    Node n;
    n.op = Op::kTranspose;
    n.a = a;
    n.shape = {shape(a)[1], shape(a)[0]};
    return push(std::move(n));
  }

  NodeId leaky_relu(NodeId a, double slope = 0.01) {
    Node n = unary(Op::kLeakyRelu, a);
    n.payload = slope;
    return push(std::move(n));
  }
  NodeId leaky_relu_grad(NodeId a, double slope = 0.01) {
    Node n = unary(Op::kLeakyReluGrad, a);
    n.payload = slope;
    return push(std::move(n));
  }
  NodeId tanh_(NodeId a) { return push(unary(Op::kTanh, a)); }
  NodeId square(NodeId a) { return push(unary(Op::kSquare, a)); }
  NodeId sqrt_(NodeId a) { return push(unary(Op::kSqrt, a)); }
  NodeId recip(NodeId a) { return push(unary(Op::kRecip, a)); }

  NodeId sum(NodeId a) {
    Node n;
    n.op = Op::kSumAll;
    n.a = a;
    return push(std::move(n));
  }

  NodeId mean(NodeId a) {
    const Index count = numel(shape(a));
    if (count == 0) throw GraphError("mean of empty tensor " + describe(a));
    return scale(sum(a), 1.0 / static_cast<double>(count));
  }

  NodeId row_sum(NodeId a) {
    require(shape(a).size() == 2, "row_sum rank-2 operand", a);
    Node n;
    n.op = Op::kRowSum;
    n.a = a;
    n.shape = {shape(a)[0]};
    return push(std::move(n));
  }

  NodeId col_sum(NodeId a) {
    require(shape(a).size() == 2, "col_sum rank-2 operand", a);
    Node n;
    n.op = Op::kColSum;
    n.a = a;
    n.shape = {shape(a)[1]};
    return push(std::move(n));
  }

  NodeId rep_rows(NodeId a, Index rows) {
    require(shape(a).size() == 1, "rep_rows rank-1 operand", a);
    Node n;
    n.op = Op::kRepRows;
    n.a = a;
    n.payload_n = rows;
    n.shape = {rows, shape(a)[0]};
    return push(std::move(n));
  }

  NodeId rep_cols(NodeId a, Index cols) {
    require(shape(a).size() == 1, "rep_cols rank-1 operand", a);
    Node n;
    n.op = Op::kRepCols;
    n.a = a;
    n.payload_n = cols;
    n.shape = {shape(a)[0], cols};
    return push(std::move(n));
  }

  NodeId bcast_scalar(NodeId a, Shape target) {
    require(shape(a).empty(), "bcast_scalar scalar operand", a);
    Node n;
    n.op = Op::kBcastScalar;
    n.a = a;
    n.shape = std::move(target);
    return push(std::move(n));
  }

  NodeId reshape(NodeId a, Shape target) {
    if (numel(shape(a)) != numel(target))
      throw GraphError("reshape " + shape_str(shape(a)) + " -> " + shape_str(target));
    Node n;
    n.op = Op::kReshape;
    n.a = a;
    n.shape = std::move(target);
    return push(std::move(n));
  }

  NodeId dot(NodeId a, NodeId b) {
    require(shape(a).size() == 1 && shape(a) == shape(b), "dot equal rank-1 operands", a);
    Node n;
    n.op = Op::kDot;
    n.a = a;
    n.b = b;
    return push(std::move(n));
  }

  NodeId norm_sq(NodeId a) {
    Node n;
    n.op = Op::kNormSq;
    n.a = a;
    return push(std::move(n));
  }

  /// x W^T + b broadcast over rows: x [n,in], w [out,in], b [out] -> [n,out].
  NodeId affine(NodeId x, NodeId w, NodeId b) {
    NodeId xw = matmul(x, transpose(w));
    return add(xw, rep_rows(b, shape(x)[0]));
  }

  // ---- evaluation ---------------------------------------------------------

  const Tensor& evaluate(NodeId id) {
    check(id);
    plan_.clear();
    mark_for_eval(id);
    for (NodeId k : plan_) compute(k);
    return nodes_[id].value;
  }

  // ---- differentiation ----------------------------------------------------

  /// Symbolic gradient node of a scalar output w.r.t. one leaf. The result
  /// participates in the graph and may be composed and differentiated once
  /// more; a second nesting level is rejected.
  NodeId gradient_node(NodeId output, NodeId wrt_leaf) {
    std::vector<NodeId> leaves{wrt_leaf};
    return backward(output, leaves, /*max_level=*/1).front();
  }

  /// Gradient values of a scalar output w.r.t. the given leaves. Emits
  /// backward nodes (level capped at 2 so losses built on gradient_node
  /// remain differentiable) and evaluates them.
  std::vector<Tensor> gradient(NodeId output, std::span<const NodeId> wrt_leaves) {
    std::vector<NodeId> leaves(wrt_leaves.begin(), wrt_leaves.end());
    std::vector<NodeId> nodes = backward(output, leaves, /*max_level=*/2);
    std::vector<Tensor> out;
    out.reserve(nodes.size());
    for (NodeId g : nodes) out.push_back(evaluate(g));
    return out;
  }

  std::vector<Tensor> gradient(NodeId output, std::initializer_list<NodeId> leaves) {
    return gradient(output, std::span<const NodeId>(leaves.begin(), leaves.size()));
  }

  /// Emits adjoint nodes for several leaves in one sweep; used by training
  /// loops that build the backward graph once and re-evaluate it.
  std::vector<NodeId> gradient_nodes(NodeId output, std::span<const NodeId> wrt_leaves,
                                     int max_level = 2) {
    std::vector<NodeId> leaves(wrt_leaves.begin(), wrt_leaves.end());
    return backward(output, leaves, max_level);
  }

 private:
  std::vector<Node> nodes_;
  std::uint64_t epoch_ = 1;
  std::vector<NodeId> plan_;
  std::vector<std::uint8_t> visit_;

  NodeId check(NodeId id) const {
    if (id < 0 || id >= size()) throw GraphError("node id out of range");
    return id;
  }

  std::string describe(NodeId id) const {
    const Node& n = nodes_[id];
    std::string s = "node #" + std::to_string(id) + " (" + op_name(n.op);
    if (!n.label.empty()) s += " '" + n.label + "'";
    return s + ")";
  }

  void require(bool cond, const char* what, NodeId id) const {
    if (!cond) throw GraphError(std::string(what) + " violated at " + describe(id));
  }

  Node unary(Op op, NodeId a) {
    Node n;
    n.op = op;
    n.a = a;
    n.shape = shape(a);
    return n;
  }

  NodeId binary_same(Op op, NodeId a, NodeId b) {
    if (shape(a) != shape(b))
      throw GraphError(std::string(op_name(op)) + " shape mismatch " + shape_str(shape(a)) +
                       " vs " + shape_str(shape(b)));
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.shape = shape(a);
    return push(std::move(n));
  }

  NodeId push(Node n) {
    check_inputs(n);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void check_inputs(const Node& n) const {
    if (n.a != kNoNode) check(n.a);
    if (n.b != kNoNode) check(n.b);
  }

  bool valid(const Node& n) const {
    return n.op == Op::kLeaf ? n.has_value : n.epoch == epoch_;
  }

  void mark_for_eval(NodeId root) {
    visit_.assign(nodes_.size(), 0);
    // Iterative post-order: collect invalid nodes, then sort into creation
    // order (creation order is a topological order by construction).
    std::vector<NodeId> stack{root};
    std::vector<NodeId> found;
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      if (visit_[id]) continue;
      visit_[id] = 1;
      const Node& n = nodes_[id];
      if (valid(n)) continue;
      if (n.op == Op::kLeaf) throw GraphError("unassigned leaf " + describe(id));
      found.push_back(id);
      if (n.a != kNoNode) stack.push_back(n.a);
      if (n.b != kNoNode) stack.push_back(n.b);
    }
    std::sort(found.begin(), found.end());
    plan_ = std::move(found);
  }

  void compute(NodeId id) {
    Node& n = nodes_[id];
    if (valid(n)) return;
    const Tensor* A = n.a != kNoNode ? &nodes_[n.a].value : nullptr;
    const Tensor* B = n.b != kNoNode ? &nodes_[n.b].value : nullptr;
    Tensor& out = n.value;
    if (out.shape != n.shape || out.size() != numel(n.shape)) out = Tensor(n.shape);

    const Index count = out.size();
    switch (n.op) {
      case Op::kLeaf:
        throw GraphError("unassigned leaf " + describe(id));
      case Op::kAdd:
        for (Index i = 0; i < count; ++i) out.data[i] = A->data[i] + B->data[i];
        break;
      case Op::kSub:
        for (Index i = 0; i < count; ++i) out.data[i] = A->data[i] - B->data[i];
        break;
      case Op::kMul:
        for (Index i = 0; i < count; ++i) out.data[i] = A->data[i] * B->data[i];
        break;
      case Op::kScale:
        for (Index i = 0; i < count; ++i) out.data[i] = A->data[i] * n.payload;
        break;
      case Op::kAddScalar:
        for (Index i = 0; i < count; ++i) out.data[i] = A->data[i] + n.payload;
        break;
      case Op::kSMul: {
        const double s = A->data[0];
        for (Index i = 0; i < count; ++i) out.data[i] = s * B->data[i];
        break;
      }
      case Op::kMatmul:
        out.mat().noalias() = A->mat() * B->mat();
        break;
      case Op::kTranspose:
        out.mat().noalias() = A->mat().transpose();
        break;
      case Op::kLeakyRelu:
        for (Index i = 0; i < count; ++i) {
          const double v = A->data[i];
          out.data[i] = v > 0.0 ? v : n.payload * v;
        }
        break;
      case Op::kLeakyReluGrad:
        for (Index i = 0; i < count; ++i) out.data[i] = A->data[i] > 0.0 ? 1.0 : n.payload;
        break;
      case Op::kTanh:
        for (Index i = 0; i < count; ++i) out.data[i] = std::tanh(A->data[i]);
        break;
      case Op::kSquare:
        for (Index i = 0; i < count; ++i) out.data[i] = A->data[i] * A->data[i];
        break;
      case Op::kSqrt:
        for (Index i = 0; i < count; ++i) out.data[i] = std::sqrt(A->data[i]);
        break;
      case Op::kRecip:
        for (Index i = 0; i < count; ++i) out.data[i] = 1.0 / A->data[i];
        break;
      case Op::kSumAll:
        out.data[0] = A->flat().sum();
        break;
      case Op::kRowSum: {
        const Index r = A->shape[0], c = A->shape[1];
        for (Index i = 0; i < r; ++i) {
          double s = 0.0;
          for (Index j = 0; j < c; ++j) s += A->data[i * c + j];
          out.data[i] = s;
        }
        break;
      }
      case Op::kColSum: {
        const Index r = A->shape[0], c = A->shape[1];
        std::fill(out.data.begin(), out.data.end(), 0.0);
        for (Index i = 0; i < r; ++i)
          for (Index j = 0; j < c; ++j) out.data[j] += A->data[i * c + j];
        break;
      }
      case Op::kRepRows: {
        const Index r = n.shape[0], c = n.shape[1];
        for (Index i = 0; i < r; ++i)
          for (Index j = 0; j < c; ++j) out.data[i * c + j] = A->data[j];
        break;
      }
      case Op::kRepCols: {
        const Index r = n.shape[0], c = n.shape[1];
        for (Index i = 0; i < r; ++i)
          for (Index j = 0; j < c; ++j) out.data[i * c + j] = A->data[i];
        break;
      }
      case Op::kBcastScalar:
        std::fill(out.data.begin(), out.data.end(), A->data[0]);
        break;
      case Op::kReshape:
        out.data = A->data;
        break;
      case Op::kDot:
        out.data[0] = A->flat().dot(B->flat());
        break;
      case Op::kNormSq:
        out.data[0] = A->flat().squaredNorm();
        break;
    }
    if (!out.all_finite())
      throw GraphError("non-finite value produced by " + describe(id));
    n.epoch = epoch_;
  }

  // Emits the backward graph of `output` w.r.t. `leaves`, returning one
  // adjoint node per requested leaf (a zero constant when disconnected).
  std::vector<NodeId> backward(NodeId output, const std::vector<NodeId>& leaves,
                               int max_level) {
    check(output);
    if (!shape(output).empty())
      throw GraphError("gradient requires a scalar output, got " +
                       shape_str(shape(output)) + " at " + describe(output));
    for (NodeId l : leaves) {
      check(l);
      if (nodes_[l].op != Op::kLeaf)
        throw GraphError("gradient target is not a leaf: " + describe(l));
    }

    const Index n_before = size();
    // Ancestor closure of the output.
    std::vector<std::uint8_t> anc(n_before, 0);
    std::vector<NodeId> stack{output};
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      if (anc[id]) continue;
      anc[id] = 1;
      const Node& n = nodes_[id];
      if (n.a != kNoNode) stack.push_back(n.a);
      if (n.b != kNoNode) stack.push_back(n.b);
    }
    // Nodes through which a requested leaf is reachable.
    std::vector<std::uint8_t> reach(n_before, 0);
    for (NodeId l : leaves) reach[l] = 1;
    for (NodeId id = 0; id < n_before; ++id) {
      const Node& n = nodes_[id];
      if ((n.a != kNoNode && reach[n.a]) || (n.b != kNoNode && reach[n.b])) reach[id] = 1;
    }

    int base_level = 0;
    for (NodeId id = 0; id < n_before; ++id)
      if (anc[id] && reach[id]) base_level = std::max(base_level, int(nodes_[id].level));
    base_level = std::max(base_level, int(nodes_[output].level));
    const int level = base_level + 1;
    if (level > max_level)
      throw GraphError("differentiation nesting level " + std::to_string(level) +
                       " exceeds the supported maximum of " + std::to_string(max_level));

    std::vector<NodeId> adj(n_before, kNoNode);
    const Index mark_from = size();
    adj[output] = constant(Tensor::scalar(1.0));

    auto needed = [&](NodeId t) {
      return t != kNoNode && t < n_before && anc[t] && reach[t];
    };
    auto accumulate = [&](NodeId target, NodeId contribution) {
      adj[target] = adj[target] == kNoNode ? contribution : add(adj[target], contribution);
    };

    for (NodeId id = output; id >= 0; --id) {
      if (!needed(id) || adj[id] == kNoNode) continue;
      emit_vjp(id, adj[id], needed, accumulate);
    }

    std::vector<NodeId> result;
    result.reserve(leaves.size());
    for (NodeId l : leaves)
      result.push_back(adj[l] != kNoNode ? adj[l] : constant(Tensor::zeros(shape(l))));
    for (Index id = mark_from; id < size(); ++id)
      nodes_[id].level = static_cast<std::int8_t>(level);
    return result;
  }

  template <typename Needed, typename Acc>
  void emit_vjp(NodeId id, NodeId g, Needed&& needed, Acc&& acc) {
    const Node n = nodes_[id];  // copy: push() may reallocate nodes_
    const bool na = needed(n.a), nb = needed(n.b);
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kAdd:
        if (na) acc(n.a, g);
        if (nb) acc(n.b, g);
        break;
      case Op::kSub:
        if (na) acc(n.a, g);
        if (nb) acc(n.b, neg(g));
        break;
      case Op::kMul:
        if (na) acc(n.a, mul(g, n.b));
        if (nb) acc(n.b, mul(g, n.a));
        break;
      case Op::kScale:
        if (na) acc(n.a, scale(g, n.payload));
        break;
      case Op::kAddScalar:
        if (na) acc(n.a, g);
        break;
      case Op::kSMul:
        if (na) acc(n.a, sum(mul(g, n.b)));
        if (nb) acc(n.b, smul(n.a, g));
        break;
      case Op::kMatmul:
        if (na) acc(n.a, matmul(g, transpose(n.b)));
        if (nb) acc(n.b, matmul(transpose(n.a), g));
        break;
      case Op::kTranspose:
        if (na) acc(n.a, transpose(g));
        break;
      case Op::kLeakyRelu:
        if (na) acc(n.a, mul(g, leaky_relu_grad(n.a, n.payload)));
        break;
      case Op::kLeakyReluGrad:
        break;  // piecewise constant: zero derivative almost everywhere
      case Op::kTanh:
        if (na) acc(n.a, mul(g, add_scalar(scale(square(id), -1.0), 1.0)));
        break;
      case Op::kSquare:
        if (na) acc(n.a, mul(g, scale(n.a, 2.0)));
        break;
      case Op::kSqrt:
        if (na) acc(n.a, mul(g, scale(recip(id), 0.5)));
        break;
      case Op::kRecip:
        if (na) acc(n.a, neg(mul(g, square(id))));
        break;
      case Op::kSumAll:
        if (na) acc(n.a, bcast_scalar(g, shape(n.a)));
        break;
      case Op::kRowSum:
        if (na) acc(n.a, rep_cols(g, shape(n.a)[1]));
        break;
      case Op::kColSum:
        if (na) acc(n.a, rep_rows(g, shape(n.a)[0]));
        break;
      case Op::kRepRows:
        if (na) acc(n.a, col_sum(g));
        break;
      case Op::kRepCols:
        if (na) acc(n.a, row_sum(g));
        break;
      case Op::kBcastScalar:
        if (na) acc(n.a, sum(g));
        break;
      case Op::kReshape:
        if (na) acc(n.a, reshape(g, shape(n.a)));
        break;
      case Op::kDot:
        if (na) acc(n.a, smul(g, n.b));
        if (nb) acc(n.b, smul(g, n.a));
        break;
      case Op::kNormSq:
        if (na) acc(n.a, smul(g, scale(n.a, 2.0)));
        break;
    }
  }
};

}  // namespace otm
