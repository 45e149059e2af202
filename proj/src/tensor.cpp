#include "authorsum/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace authorsum::nn {

namespace {
std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) {
    if (e == 0) throw std::invalid_argument("tensor extents must be positive");
    n *= e;
  }
  return n;
}
}  // namespace

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
  auto s = std::make_shared<detail::Storage>();
  const std::size_t n = shape_numel(shape);
  s->shape = std::move(shape);
  s->value.assign(n, 0.0);
  s->requires_grad = requires_grad;
  return Tensor(std::move(s));
}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> values,
                    bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw std::invalid_argument("tensor data length does not match shape " +
                                shape_string(shape));
  }
  auto s = std::make_shared<detail::Storage>();
  s->shape = std::move(shape);
  s->value = std::move(values);
  s->requires_grad = requires_grad;
  return Tensor(std::move(s));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return from({1}, {v}, requires_grad);
}

Tensor Tensor::randn(std::vector<std::size_t> shape, Rng& rng, double stddev,
                     bool requires_grad) {
  Tensor t = zeros(std::move(shape), requires_grad);
  for (double& v : t.values()) v = rng.normal(0.0, stddev);
  return t;
}

std::size_t Tensor::rows() const {
  if (s_->shape.size() != 2) {
    throw std::logic_error("rows(): tensor is not 2-D, shape " +
                           shape_string(s_->shape));
  }
  return s_->shape[0];
}

std::size_t Tensor::cols() const {
  if (s_->shape.size() != 2) {
    throw std::logic_error("cols(): tensor is not 2-D, shape " +
                           shape_string(s_->shape));
  }
  return s_->shape[1];
}

double Tensor::item() const {
  if (size() != 1) {
    throw std::logic_error("item(): tensor is not a scalar, shape " +
                           shape_string(s_->shape));
  }
  return s_->value[0];
}

void Tensor::ensure_grad() {
  if (s_->grad.empty()) s_->grad.assign(s_->value.size(), 0.0);
}

void Tensor::zero_grad() {
  std::fill(s_->grad.begin(), s_->grad.end(), 0.0);
}

void Tensor::append_row(const std::vector<double>& row) {
  if (s_->shape.size() != 2 || row.size() != s_->shape[1]) {
    throw std::invalid_argument("append_row: row length does not match");
  }
  s_->value.insert(s_->value.end(), row.begin(), row.end());
  if (!s_->grad.empty()) s_->grad.resize(s_->value.size(), 0.0);
  s_->shape[0] += 1;
}

void mm_nn(const double* a, const double* b, double* out, std::size_t m,
           std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* oi = out + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ai[p];
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) oi[j] += av * bp[j];
    }
  }
}

void mm_nt(const double* a, const double* b, double* out, std::size_t m,
           std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    double* oi = out + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
      oi[j] += acc;
    }
  }
}

void mm_tn(const double* a, const double* b, double* out, std::size_t m,
           std::size_t k, std::size_t n) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = ap[i];
      double* oi = out + i * n;
      for (std::size_t j = 0; j < n; ++j) oi[j] += av * bp[j];
    }
  }
}

Tensor Graph::make_output(
    std::vector<std::size_t> shape, std::vector<double> values,
    std::vector<Tensor> inputs,
    std::function<void(Tensor&, std::vector<Tensor>&)> backprop) {
  bool req = false;
  for (const auto& in : inputs) req = req || in.requires_grad();
  Tensor out = Tensor::from(std::move(shape), std::move(values), req);
  nodes_.push_back(Node{out, std::move(inputs), std::move(backprop)});
  return out;
}

Tensor Graph::custom(
    std::vector<std::size_t> out_shape, std::vector<double> out_values,
    std::vector<Tensor> inputs,
    std::function<void(Tensor&, std::vector<Tensor>&)> backprop) {
  return make_output(std::move(out_shape), std::move(out_values),
                     std::move(inputs), std::move(backprop));
}

Tensor Graph::matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 || a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: incompatible shapes " +
                                shape_string(a.shape()) + " and " +
                                shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  mm_nn(a.data(), b.data(), out.data(), m, k, n);
  return make_output(
      {m, n}, std::move(out), {a, b}, [m, k, n](Tensor& o, std::vector<Tensor>& in) {
        Tensor& A = in[0];
        Tensor& B = in[1];
        if (A.requires_grad()) {
          A.ensure_grad();
          mm_nt(o.grad(), B.data(), A.grad(), m, n, k);  // dA += dC * B^T
        }
        if (B.requires_grad()) {
          B.ensure_grad();
          mm_tn(A.data(), o.grad(), B.grad(), k, m, n);  // dB += A^T * dC
        }
      });
}

Tensor Graph::transpose(const Tensor& a) {
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = a.data()[i * c + j];
  return make_output({c, r}, std::move(out), {a},
                     [r, c](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& A = in[0];
                       if (!A.requires_grad()) return;
                       A.ensure_grad();
                       for (std::size_t i = 0; i < r; ++i)
                         for (std::size_t j = 0; j < c; ++j)
                           A.grad()[i * c + j] += o.grad()[j * r + i];
                     });
}

Tensor Graph::add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument("add: shape mismatch " +
                                shape_string(a.shape()) + " vs " +
                                shape_string(b.shape()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return make_output(a.shape(), std::move(out), {a, b},
                     [](Tensor& o, std::vector<Tensor>& in) {
                       for (Tensor& t : in) {
                         if (!t.requires_grad()) continue;
                         t.ensure_grad();
                         for (std::size_t i = 0; i < t.size(); ++i)
                           t.grad()[i] += o.grad()[i];
                       }
                     });
}

Tensor Graph::add_rowvec(const Tensor& x, const Tensor& bias) {
  if (bias.shape().size() != 1 || x.shape().size() != 2 ||
      bias.shape()[0] != x.cols()) {
    throw std::invalid_argument("add_rowvec: shape mismatch " +
                                shape_string(x.shape()) + " vs " +
                                shape_string(bias.shape()));
  }
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      out[i * c + j] = x.data()[i * c + j] + bias.data()[j];
  return make_output({r, c}, std::move(out), {x, bias},
                     [r, c](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& X = in[0];
                       Tensor& B = in[1];
                       if (X.requires_grad()) {
                         X.ensure_grad();
                         for (std::size_t i = 0; i < r * c; ++i)
                           X.grad()[i] += o.grad()[i];
                       }
                       if (B.requires_grad()) {
                         B.ensure_grad();
                         for (std::size_t i = 0; i < r; ++i)
                           for (std::size_t j = 0; j < c; ++j)
                             B.grad()[j] += o.grad()[i * c + j];
                       }
                     });
}

Tensor Graph::mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument("mul: shape mismatch " +
                                shape_string(a.shape()) + " vs " +
                                shape_string(b.shape()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_output(a.shape(), std::move(out), {a, b},
                     [](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& A = in[0];
                       Tensor& B = in[1];
                       if (A.requires_grad()) {
                         A.ensure_grad();
                         for (std::size_t i = 0; i < A.size(); ++i)
                           A.grad()[i] += o.grad()[i] * B.data()[i];
                       }
                       if (B.requires_grad()) {
                         B.ensure_grad();
                         for (std::size_t i = 0; i < B.size(); ++i)
                           B.grad()[i] += o.grad()[i] * A.data()[i];
                       }
                     });
}

Tensor Graph::scale(const Tensor& a, double c) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * c;
  return make_output(a.shape(), std::move(out), {a},
                     [c](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& A = in[0];
                       if (!A.requires_grad()) return;
                       A.ensure_grad();
                       for (std::size_t i = 0; i < A.size(); ++i)
                         A.grad()[i] += o.grad()[i] * c;
                     });
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

Tensor Graph::gelu(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = a.data()[i];
    out[i] = 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
  }
  return make_output(a.shape(), std::move(out), {a},
                     [](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& A = in[0];
                       if (!A.requires_grad()) return;
                       A.ensure_grad();
                       for (std::size_t i = 0; i < A.size(); ++i) {
                         const double x = A.data()[i];
                         const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
                         const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
                         A.grad()[i] += o.grad()[i] * (cdf + x * pdf);
                       }
                     });
}

Tensor Graph::softmax(const Tensor& a) {
  if (a.shape().empty()) throw std::invalid_argument("softmax: empty shape");
  const std::size_t d = a.shape().back();
  const std::size_t rows = a.size() / d;
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const double* x = a.data() + i * d;
    double* y = out.data() + i * d;
    double mx = x[0];
    for (std::size_t j = 1; j < d; ++j) mx = std::max(mx, x[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      y[j] = std::exp(x[j] - mx);
      z += y[j];
    }
    for (std::size_t j = 0; j < d; ++j) y[j] /= z;
  }
  return make_output(a.shape(), std::move(out), {a},
                     [d, rows](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& A = in[0];
                       if (!A.requires_grad()) return;
                       A.ensure_grad();
                       for (std::size_t i = 0; i < rows; ++i) {
                         const double* y = o.data() + i * d;
                         const double* dy = o.grad() + i * d;
                         double dot = 0.0;
                         for (std::size_t j = 0; j < d; ++j) dot += dy[j] * y[j];
                         double* dx = A.grad() + i * d;
                         for (std::size_t j = 0; j < d; ++j)
                           dx[j] += y[j] * (dy[j] - dot);
                       }
                     });
}

Tensor Graph::layer_norm(const Tensor& x, const Tensor& gain,
                         const Tensor& bias) {
  if (x.shape().size() != 2 || gain.shape().size() != 1 ||
      bias.shape().size() != 1 || gain.shape()[0] != x.cols() ||
      bias.shape()[0] != x.cols()) {
    throw std::invalid_argument("layer_norm: shape mismatch");
  }
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> out(x.size());
  auto xhat = std::make_shared<std::vector<double>>(x.size());
  auto inv_std = std::make_shared<std::vector<double>>(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double* xi = x.data() + i * c;
    double mean = 0.0;
    for (std::size_t j = 0; j < c; ++j) mean += xi[j];
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double dv = xi[j] - mean;
      var += dv * dv;
    }
    var /= static_cast<double>(c);
    const double is = 1.0 / std::sqrt(var + kLayerNormEps);
    (*inv_std)[i] = is;
    for (std::size_t j = 0; j < c; ++j) {
      const double xh = (xi[j] - mean) * is;
      (*xhat)[i * c + j] = xh;
      out[i * c + j] = gain.data()[j] * xh + bias.data()[j];
    }
  }
  return make_output(
      {r, c}, std::move(out), {x, gain, bias},
      [r, c, xhat, inv_std](Tensor& o, std::vector<Tensor>& in) {
        Tensor& X = in[0];
        Tensor& G = in[1];
        Tensor& B = in[2];
        if (G.requires_grad()) {
          G.ensure_grad();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
              G.grad()[j] += o.grad()[i * c + j] * (*xhat)[i * c + j];
        }
        if (B.requires_grad()) {
          B.ensure_grad();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
              B.grad()[j] += o.grad()[i * c + j];
        }
        if (X.requires_grad()) {
          X.ensure_grad();
          for (std::size_t i = 0; i < r; ++i) {
            const double* dy = o.grad() + i * c;
            const double* xh = xhat->data() + i * c;
            double sum_g = 0.0, sum_gx = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
              const double gdy = dy[j] * G.data()[j];
              sum_g += gdy;
              sum_gx += gdy * xh[j];
            }
            const double n = static_cast<double>(c);
            for (std::size_t j = 0; j < c; ++j) {
              const double gdy = dy[j] * G.data()[j];
              X.grad()[i * c + j] +=
                  (*inv_std)[i] * (gdy - sum_g / n - xh[j] * sum_gx / n);
            }
          }
        }
      });
}

Tensor Graph::embedding(const Tensor& table, const std::vector<int>& ids) {
  if (table.shape().size() != 2) {
    throw std::invalid_argument("embedding: table must be 2-D");
  }
  const std::size_t v = table.rows(), d = table.cols();
  std::vector<double> out(ids.size() * d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int id = ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= v) {
      throw std::out_of_range("embedding: id " + std::to_string(id) +
                              " outside table with " + std::to_string(v) +
                              " rows");
    }
    std::copy_n(table.data() + static_cast<std::size_t>(id) * d, d,
                out.data() + i * d);
  }
  return make_output({ids.size(), d}, std::move(out), {table},
                     [ids, d](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& T = in[0];
                       if (!T.requires_grad()) return;
                       T.ensure_grad();
                       // scatter-add: repeated ids accumulate
                       for (std::size_t i = 0; i < ids.size(); ++i) {
                         double* row =
                             T.grad() + static_cast<std::size_t>(ids[i]) * d;
                         const double* g = o.grad() + i * d;
                         for (std::size_t j = 0; j < d; ++j) row[j] += g[j];
                       }
                     });
}

Tensor Graph::dropout(const Tensor& x, double rate, Rng& rng, bool training) {
  if (rate < 0.0 || rate >= 1.0) {
    throw std::invalid_argument("dropout rate must be in [0,1)");
  }
  if (!training || rate == 0.0) return x;
  const double keep = 1.0 - rate;
  auto mask = std::make_shared<std::vector<double>>(x.size());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    (*mask)[i] = rng.uniform() < rate ? 0.0 : 1.0 / keep;
    out[i] = x.data()[i] * (*mask)[i];
  }
  return make_output(x.shape(), std::move(out), {x},
                     [mask](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& X = in[0];
                       if (!X.requires_grad()) return;
                       X.ensure_grad();
                       for (std::size_t i = 0; i < X.size(); ++i)
                         X.grad()[i] += o.grad()[i] * (*mask)[i];
                     });
}

Tensor Graph::cross_entropy(const Tensor& logits,
                            const std::vector<int>& targets, int ignore_id) {
  if (logits.shape().size() != 2 || targets.size() != logits.rows()) {
    throw std::invalid_argument("cross_entropy: logits " +
                                shape_string(logits.shape()) + " vs " +
                                std::to_string(targets.size()) + " targets");
  }
  const std::size_t t = logits.rows(), v = logits.cols();
  std::size_t valid = 0;
  double loss = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    if (targets[i] == ignore_id) continue;
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= v) {
      throw std::out_of_range("cross_entropy: target out of range");
    }
    ++valid;
    const double* x = logits.data() + i * v;
    double mx = x[0];
    for (std::size_t j = 1; j < v; ++j) mx = std::max(mx, x[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < v; ++j) z += std::exp(x[j] - mx);
    loss += std::log(z) + mx - x[static_cast<std::size_t>(targets[i])];
  }
  if (valid == 0) throw std::runtime_error("no target tokens");
  loss /= static_cast<double>(valid);
  return make_output(
      {1}, {loss}, {logits},
      [targets, ignore_id, t, v, valid](Tensor& o, std::vector<Tensor>& in) {
        Tensor& L = in[0];
        if (!L.requires_grad()) return;
        L.ensure_grad();
        const double g = o.grad()[0] / static_cast<double>(valid);
        for (std::size_t i = 0; i < t; ++i) {
          if (targets[i] == ignore_id) continue;
          const double* x = L.data() + i * v;
          double mx = x[0];
          for (std::size_t j = 1; j < v; ++j) mx = std::max(mx, x[j]);
          double z = 0.0;
          for (std::size_t j = 0; j < v; ++j) z += std::exp(x[j] - mx);
          double* dx = L.grad() + i * v;
          for (std::size_t j = 0; j < v; ++j) {
            double p = std::exp(x[j] - mx) / z;
            if (j == static_cast<std::size_t>(targets[i])) p -= 1.0;
            dx[j] += g * p;
          }
        }
      });
}

Tensor Graph::sum(const Tensor& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i];
  return make_output({1}, {s}, {a}, [](Tensor& o, std::vector<Tensor>& in) {
    Tensor& A = in[0];
    if (!A.requires_grad()) return;
    A.ensure_grad();
    for (std::size_t i = 0; i < A.size(); ++i) A.grad()[i] += o.grad()[0];
  });
}

Tensor Graph::slice_cols(const Tensor& a, std::size_t first, std::size_t count) {
  const std::size_t r = a.rows(), c = a.cols();
  if (first + count > c) throw std::invalid_argument("slice_cols out of range");
  std::vector<double> out(r * count);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(a.data() + i * c + first, count, out.data() + i * count);
  return make_output({r, count}, std::move(out), {a},
                     [r, c, first, count](Tensor& o, std::vector<Tensor>& in) {
                       Tensor& A = in[0];
                       if (!A.requires_grad()) return;
                       A.ensure_grad();
                       for (std::size_t i = 0; i < r; ++i)
                         for (std::size_t j = 0; j < count; ++j)
                           A.grad()[i * c + first + j] += o.grad()[i * count + j];
                     });
}

Tensor Graph::concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no parts");
  const std::size_t r = parts[0].rows();
  std::size_t c = 0;
  for (const auto& p : parts) {
    if (p.rows() != r) throw std::invalid_argument("concat_cols: row mismatch");
    c += p.cols();
  }
  std::vector<double> out(r * c);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(p.data() + i * p.cols(), p.cols(), out.data() + i * c + off);
    off += p.cols();
  }
  return make_output({r, c}, std::move(out), parts,
                     [r, c](Tensor& o, std::vector<Tensor>& in) {
                       std::size_t off = 0;
                       for (Tensor& p : in) {
                         const std::size_t pc = p.cols();
                         if (p.requires_grad()) {
                           p.ensure_grad();
                           for (std::size_t i = 0; i < r; ++i)
                             for (std::size_t j = 0; j < pc; ++j)
                               p.grad()[i * pc + j] += o.grad()[i * c + off + j];
                         }
                         off += pc;
                       }
                     });
}

void Graph::backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw std::invalid_argument("backward requires a scalar loss");
  }
  // op outputs get a clean gradient each sweep; leaves accumulate
  for (auto& n : nodes_) {
    n.out.ensure_grad();
    n.out.zero_grad();
  }
  Tensor seed = loss;  // handles share storage
  seed.ensure_grad();
  seed.grad_values()[0] += 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (it->out.requires_grad()) it->backprop(it->out, it->inputs);
  }
}

}  // namespace authorsum::nn
