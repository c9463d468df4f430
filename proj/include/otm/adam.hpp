#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "otm/tensor.hpp"

namespace otm {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  // Switching bias correction off is only useful as a fault-injection probe
  // for the verification suite.
  bool bias_correction = true;

  void validate() const {
    if (lr <= 0.0) throw std::invalid_argument("adam: learning rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
      throw std::invalid_argument("adam: betas must lie in [0, 1)");
    if (epsilon <= 0.0) throw std::invalid_argument("adam: epsilon must be positive");
  }
};

/// Adam with per-tensor moment state. Epsilon is added outside the square
/// root: p -= lr * m_hat / (sqrt(v_hat) + eps).
struct Adam {
  AdamConfig cfg;
  std::int64_t step_count = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;

  Adam() = default;
  explicit Adam(AdamConfig c, const std::vector<Tensor*>& params) : cfg(c) {
    cfg.validate();
    for (const Tensor* p : params) {
      m.push_back(Tensor::zeros(p->shape));
      v.push_back(Tensor::zeros(p->shape));
    }
  }

  void step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads) {
    if (params.size() != m.size() || grads.size() != m.size())
      throw std::invalid_argument("adam: parameter/gradient count mismatch");
    ++step_count;
    const double c1 = cfg.bias_correction ? 1.0 - std::pow(cfg.beta1, double(step_count)) : 1.0;
    const double c2 = cfg.bias_correction ? 1.0 - std::pow(cfg.beta2, double(step_count)) : 1.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      Tensor& p = *params[k];
      const Tensor& g = grads[k];
      if (!g.same_shape(p))
        throw std::invalid_argument("adam: gradient shape " + shape_str(g.shape) +
                                    " != parameter shape " + shape_str(p.shape));
      if (!g.all_finite()) throw std::invalid_argument("adam: non-finite gradient");
      Tensor& mk = m[k];
      Tensor& vk = v[k];
      for (Index i = 0; i < p.size(); ++i) {
        const double gi = g.data[i];
        mk.data[i] = cfg.beta1 * mk.data[i] + (1.0 - cfg.beta1) * gi;
        vk.data[i] = cfg.beta2 * vk.data[i] + (1.0 - cfg.beta2) * gi * gi;
        const double m_hat = mk.data[i] / c1;
        const double v_hat = vk.data[i] / c2;
        p.data[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
      }
    }
  }
};

}  // namespace otm
