#pragma once

#include <functional>
#include <vector>

#include "authorsum/tensor.hpp"

namespace authorsum::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int warmup_steps = 0;  // linear warmup of lr when > 0
};

/// Adam with bias correction. Grads are zeroed after each step; a
/// registered parameter without an allocated gradient is an error.
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, AdamConfig cfg = {});

  void step();
  void zero_grad();
  long step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  AdamConfig cfg_;
  long t_ = 0;
};

// Compares analytic gradients against central finite differences
// (h = 1e-6). Returns max |a-n| / max(1e-8, |a|+|n|) over all parameter
// entries. build_loss must rebuild the forward pass from scratch.
double grad_check(const std::function<Tensor(Graph&)>& build_loss,
                  std::vector<Tensor> params, double h = 1e-6);

}  // namespace authorsum::nn
