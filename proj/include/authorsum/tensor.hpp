#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "authorsum/rng.hpp"

namespace authorsum::nn {

namespace detail {
struct Storage {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, same length as value
  bool requires_grad = false;
};
}  // namespace detail

/// Dense row-major 64-bit float tensor. Value-semantics handle over shared
/// storage: copies alias the same buffer, which is what the tape needs.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
  static Tensor from(std::vector<std::size_t> shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);
  static Tensor randn(std::vector<std::size_t> shape, Rng& rng, double stddev,
                      bool requires_grad = true);

  bool defined() const { return s_ != nullptr; }
  const std::vector<std::size_t>& shape() const { return s_->shape; }
  std::size_t size() const { return s_->value.size(); }
  std::size_t rows() const;  // 2-D helpers
  std::size_t cols() const;

  double* data() { return s_->value.data(); }
  const double* data() const { return s_->value.data(); }
  std::vector<double>& values() { return s_->value; }
  const std::vector<double>& values() const { return s_->value; }
  double item() const;  // scalar value

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool b) { s_->requires_grad = b; }

  bool has_grad() const { return s_ && !s_->grad.empty(); }
  double* grad() { return s_->grad.data(); }
  const double* grad() const { return s_->grad.data(); }
  std::vector<double>& grad_values() { return s_->grad; }
  void ensure_grad();  // allocate zero-filled grad buffer
  void zero_grad();

  bool same_storage(const Tensor& other) const { return s_ == other.s_; }

  // enrollment support: append one row to a 2-D tensor
  void append_row(const std::vector<double>& row);

 private:
  explicit Tensor(std::shared_ptr<detail::Storage> s) : s_(std::move(s)) {}
  std::shared_ptr<detail::Storage> s_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

/// Reverse-mode tape. Ops are recorded in creation order (which is a
/// topological order); backward() replays them in reverse. Gradients of op
/// outputs are reset per sweep; leaf gradients accumulate across sweeps.
class Graph {
 public:
  Tensor matmul(const Tensor& a, const Tensor& b);  // [m,k]x[k,n]
  Tensor transpose(const Tensor& a);
  Tensor add(const Tensor& a, const Tensor& b);            // same shape
  Tensor add_rowvec(const Tensor& x, const Tensor& bias);  // [r,c] + [c]
  Tensor mul(const Tensor& a, const Tensor& b);            // elementwise
  Tensor scale(const Tensor& a, double c);
  Tensor gelu(const Tensor& a);
  Tensor softmax(const Tensor& a);  // along the last axis
  Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias);
  Tensor embedding(const Tensor& table, const std::vector<int>& ids);
  Tensor dropout(const Tensor& x, double rate, Rng& rng, bool training);
  // mean negative log-softmax of targets over non-ignored positions
  Tensor cross_entropy(const Tensor& logits, const std::vector<int>& targets,
                       int ignore_id);
  Tensor sum(const Tensor& a);
  Tensor slice_cols(const Tensor& a, std::size_t first, std::size_t count);
  Tensor concat_cols(const std::vector<Tensor>& parts);

  // Extension point: register a node with explicit output values and
  // backward rule. The rule reads out.grad() and accumulates into inputs.
  Tensor custom(std::vector<std::size_t> out_shape,
                std::vector<double> out_values, std::vector<Tensor> inputs,
                std::function<void(Tensor&, std::vector<Tensor>&)> backprop);

  void backward(const Tensor& loss);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor out;
    std::vector<Tensor> inputs;
    std::function<void(Tensor&, std::vector<Tensor>&)> backprop;
  };
  Tensor make_output(std::vector<std::size_t> shape, std::vector<double> values,
                     std::vector<Tensor> inputs,
                     std::function<void(Tensor&, std::vector<Tensor>&)> backprop);
  std::vector<Node> nodes_;
};

constexpr double kLayerNormEps = 1e-5;

// raw matmul kernels (row-major, accumulate into out)
void mm_nn(const double* a, const double* b, double* out, std::size_t m,
           std::size_t k, std::size_t n);
void mm_nt(const double* a, const double* b, double* out, std::size_t m,
           std::size_t k, std::size_t n);  // out[m,n] += a[m,k] * b[n,k]^T
void mm_tn(const double* a, const double* b, double* out, std::size_t m,
           std::size_t k, std::size_t n);  // out[m,n] += a[k,m]^T * b[k,n]

}  // namespace authorsum::nn
