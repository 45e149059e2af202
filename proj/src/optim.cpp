#include "authorsum/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace authorsum::nn {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  double lr = cfg_.lr;
  if (cfg_.warmup_steps > 0) {
    lr *= std::min(1.0, static_cast<double>(t_) /
                            static_cast<double>(cfg_.warmup_steps));
  }
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& p = params_[pi];
    if (!p.has_grad()) {
      throw std::runtime_error("adam: missing grad on parameter " +
                               std::to_string(pi));
    }
    double* w = p.data();
    const double* g = p.grad();
    double* m = m_[pi].data();
    double* v = v_[pi].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    p.zero_grad();
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) {
    p.ensure_grad();
    p.zero_grad();
  }
}

double grad_check(const std::function<Tensor(Graph&)>& build_loss,
                  std::vector<Tensor> params, double h) {
  // analytic pass
  for (auto& p : params) {
    p.set_requires_grad(true);
    p.ensure_grad();
    p.zero_grad();
  }
  std::vector<std::vector<double>> analytic;
  {
    Graph g;
    Tensor loss = build_loss(g);
    g.backward(loss);
    for (auto& p : params) analytic.push_back(p.grad_values());
  }

  auto eval = [&]() {
    Graph g;
    return build_loss(g).item();
  };

  double max_rel = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double orig = p.data()[i];
      p.data()[i] = orig + h;
      const double fp = eval();
      p.data()[i] = orig - h;
      const double fm = eval();
      p.data()[i] = orig;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[pi][i];
      const double rel =
          std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace authorsum::nn
