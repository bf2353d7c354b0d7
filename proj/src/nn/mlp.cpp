#include "magaisil/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "magaisil/common/error.hpp"

namespace magaisil::nn {

std::string_view to_string(Head h) {
  switch (h) {
    case Head::Softmax: return "softmax";
    case Head::Scalar: return "scalar";
    case Head::Sigmoid: return "sigmoid";
  }
  return "?";
}

Head head_from_string(std::string_view s) {
  if (s == "softmax") return Head::Softmax;
  if (s == "scalar") return Head::Scalar;
  if (s == "sigmoid") return Head::Sigmoid;
  throw ParseError("unknown head '" + std::string(s) + "'");
}

void Gradients::scale(double s) {
  for (double& v : values) v *= s;
}

double Gradients::norm() const {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (other.values.size() != values.size()) throw ContractError("gradient size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
  return *this;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - top);
  const double log_norm = top + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_norm;
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Mlp::Mlp(std::vector<int> layer_sizes, Head head)
    : layer_sizes_(std::move(layer_sizes)), head_(head) {
  if (layer_sizes_.size() < 2) throw ContractError("an MLP needs at least two layer sizes");
  for (int n : layer_sizes_) {
    if (n <= 0) throw ContractError("layer sizes must be positive");
  }
  if (head_ == Head::Sigmoid && layer_sizes_.back() != 1) {
    throw ContractError("sigmoid head needs a single output");
  }
  if (head_ == Head::Scalar && layer_sizes_.back() != 1) {
    throw ContractError("scalar head needs a single output");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(layer_sizes_[l + 1]) * (layer_sizes_[l] + 1);
  }
  params_.assign(total, 0.0);
}

namespace {

// Rows of `m` (rows x cols, row-major) made orthonormal when rows <= cols,
// otherwise its columns.
void orthonormalize(std::vector<double>& m, int rows, int cols) {
  const bool by_rows = rows <= cols;
  const int count = by_rows ? rows : cols;
  const int dim = by_rows ? cols : rows;
  auto at = [&](int vec, int k) -> double& {
    return by_rows ? m[static_cast<std::size_t>(vec) * cols + k]
                   : m[static_cast<std::size_t>(k) * cols + vec];
  };
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < i; ++j) {
      double proj = 0.0;
      for (int k = 0; k < dim; ++k) proj += at(i, k) * at(j, k);
      for (int k = 0; k < dim; ++k) at(i, k) -= proj * at(j, k);
    }
    double n = 0.0;
    for (int k = 0; k < dim; ++k) n += at(i, k) * at(i, k);
    n = std::sqrt(n);
    for (int k = 0; k < dim; ++k) at(i, k) /= n;
  }
}

}  // namespace

Mlp Mlp::orthogonal(std::vector<int> layer_sizes, Head head, double output_gain, Rng& rng) {
  Mlp net(std::move(layer_sizes), head);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const int in = net.layer_sizes_[l];
    const int out = net.layer_sizes_[l + 1];
    std::vector<double> w(static_cast<std::size_t>(in) * out);
    for (double& v : w) v = normal(rng);
    orthonormalize(w, out, in);
    const double gain = l + 1 == net.num_layers() ? output_gain : std::sqrt(2.0);
    std::transform(w.begin(), w.end(), net.params_.begin() + net.offsets_[l],
                   [gain](double v) { return gain * v; });
  }
  return net;
}

std::span<double> Mlp::mutable_params() {
  ++generation_;
  return params_;
}

std::size_t Mlp::bias_offset(std::size_t layer) const {
  return offsets_[layer] +
         static_cast<std::size_t>(layer_sizes_[layer + 1]) * layer_sizes_[layer];
}

double Mlp::weight(std::size_t layer, int row, int col) const {
  return params_[offsets_[layer] + static_cast<std::size_t>(row) * layer_sizes_[layer] + col];
}

double Mlp::bias(std::size_t layer, int row) const { return params_[bias_offset(layer) + row]; }

std::vector<double> Mlp::run(std::span<const double> input, ForwardCache* cache) const {
  if (static_cast<int>(input.size()) != input_size()) {
    throw ContractError("input has " + std::to_string(input.size()) + " entries, network expects " +
                        std::to_string(input_size()));
  }
  std::vector<double> h(input.begin(), input.end());
  if (cache != nullptr) {
    cache->activations.clear();
    cache->activations.push_back(h);
  }
  for (std::size_t l = 0; l < num_layers(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = params_.data() + bias_offset(l);
    std::vector<double> z(out);
    for (int r = 0; r < out; ++r) {
      double acc = b[r];
      const double* row = w + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) acc += row[c] * h[c];
      z[r] = acc;
    }
    if (l + 1 == num_layers()) {
      h = std::move(z);
    } else {
      for (double& v : z) v = std::tanh(v);
      h = std::move(z);
      if (cache != nullptr) cache->activations.push_back(h);
    }
  }
  if (cache != nullptr) cache->logits = h;
  switch (head_) {
    case Head::Softmax: return softmax(h);
    case Head::Sigmoid: return {sigmoid(h[0])};
    case Head::Scalar: return h;
  }
  return h;
}

Forward Mlp::forward(std::span<const double> input) const {
  Forward f;
  f.output = run(input, &f.cache);
  f.cache.output = f.output;
  f.cache.generation = generation_;
  f.cache.param_count = params_.size();
  return f;
}

std::vector<double> Mlp::predict(std::span<const double> input) const { return run(input, nullptr); }

std::vector<double> Mlp::logits(std::span<const double> input) const {
  ForwardCache cache;
  run(input, &cache);
  return cache.logits;
}

Gradients Mlp::zero_gradients() const { return Gradients{std::vector<double>(params_.size(), 0.0)}; }

void Mlp::check_cache(const ForwardCache& cache) const {
  if (cache.param_count != params_.size() || cache.activations.size() != num_layers() ||
      cache.logits.size() != static_cast<std::size_t>(output_size())) {
    throw ContractError("forward cache does not belong to this network");
  }
  if (cache.generation != generation_) {
    throw ContractError("stale forward cache: parameters changed since the forward pass");
  }
}

Gradients Mlp::backward(const ForwardCache& cache, std::span<const double> output_grad) const {
  check_cache(cache);
  if (output_grad.size() != cache.output.size()) throw ContractError("output gradient size mismatch");
  std::vector<double> g(output_grad.begin(), output_grad.end());
  switch (head_) {
    case Head::Softmax: {
      double inner = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) inner += cache.output[i] * output_grad[i];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = cache.output[i] * (output_grad[i] - inner);
      break;
    }
    case Head::Sigmoid:
      g[0] = output_grad[0] * cache.output[0] * (1.0 - cache.output[0]);
      break;
    case Head::Scalar:
      break;
  }
  return backward_from_logits(cache, g);
}

Gradients Mlp::backward_from_logits(const ForwardCache& cache,
                                    std::span<const double> logit_grad) const {
  Gradients grads = zero_gradients();
  accumulate_from_logits(cache, logit_grad, grads);
  return grads;
}

void Mlp::accumulate_from_logits(const ForwardCache& cache, std::span<const double> logit_grad,
                                 Gradients& into) const {
  check_cache(cache);
  if (logit_grad.size() != static_cast<std::size_t>(output_size())) {
    throw ContractError("logit gradient size mismatch");
  }
  if (into.values.size() != params_.size()) throw ContractError("gradient buffer size mismatch");
  std::vector<double> g(logit_grad.begin(), logit_grad.end());
  for (std::size_t l = num_layers(); l-- > 0;) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    const std::vector<double>& h = cache.activations[l];
    double* dw = into.values.data() + offsets_[l];
    double* db = into.values.data() + bias_offset(l);
    for (int r = 0; r < out; ++r) {
      const double gr = g[r];
      if (gr == 0.0) continue;
      db[r] += gr;
      double* row = dw + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) row[c] += gr * h[c];
    }
    if (l == 0) break;
    const double* w = params_.data() + offsets_[l];
    std::vector<double> prev(in, 0.0);
    for (int r = 0; r < out; ++r) {
      const double gr = g[r];
      if (gr == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(r) * in;
      for (int c = 0; c < in; ++c) prev[c] += row[c] * gr;
    }
    for (int c = 0; c < in; ++c) prev[c] *= 1.0 - h[c] * h[c];
    g = std::move(prev);
  }
}

}  // namespace magaisil::nn
