#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "magaisil/common/random.hpp"

namespace magaisil::nn {

enum class Head { Softmax, Scalar, Sigmoid };

std::string_view to_string(Head h);
Head head_from_string(std::string_view s);

// Flat gradient vector laid out exactly like Mlp::params().
struct Gradients {
  std::vector<double> values;

  void scale(double s);
  double norm() const;
  Gradients& operator+=(const Gradients& other);
};

// Activation record of one forward pass; consumed by backward().
struct ForwardCache {
  std::vector<std::vector<double>> activations;  // input, then each tanh hidden layer
  std::vector<double> logits;                    // pre-head outputs
  std::vector<double> output;                    // post-head outputs
  std::uint64_t generation = 0;
  std::size_t param_count = 0;
};

struct Forward {
  std::vector<double> output;
  ForwardCache cache;
};

// Dense tanh network. Layer l maps layer_sizes[l] -> layer_sizes[l+1];
// its weights are stored row-major [out][in], followed by its biases.
class Mlp {
 public:
  Mlp() = default;
  // All parameters zero.
  Mlp(std::vector<int> layer_sizes, Head head);

  // Orthogonal init: hidden layers with gain sqrt(2), output layer with
  // `output_gain`; biases zero.
  static Mlp orthogonal(std::vector<int> layer_sizes, Head head, double output_gain, Rng& rng);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  Head head() const { return head_; }
  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  std::size_t num_layers() const { return layer_sizes_.size() - 1; }

  std::span<const double> params() const { return params_; }
  // Mutable access invalidates outstanding forward caches.
  std::span<double> mutable_params();
  std::uint64_t generation() const { return generation_; }

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const;
  double weight(std::size_t layer, int row, int col) const;
  double bias(std::size_t layer, int row) const;

  Forward forward(std::span<const double> input) const;
  // Output only; skips building the cache.
  std::vector<double> predict(std::span<const double> input) const;
  // Pre-head outputs only.
  std::vector<double> logits(std::span<const double> input) const;

  // Gradient of a scalar loss given dLoss/dOutput (post-head).
  Gradients backward(const ForwardCache& cache, std::span<const double> output_grad) const;
  // Same, starting from dLoss/dLogits; numerically preferable for
  // softmax/sigmoid losses written in logit space.
  Gradients backward_from_logits(const ForwardCache& cache,
                                 std::span<const double> logit_grad) const;
  // Accumulating variant used by batched trainers.
  void accumulate_from_logits(const ForwardCache& cache, std::span<const double> logit_grad,
                              Gradients& into) const;

  Gradients zero_gradients() const;

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.layer_sizes_ == b.layer_sizes_ && a.head_ == b.head_ && a.params_ == b.params_;
  }

 private:
  void check_cache(const ForwardCache& cache) const;
  std::vector<double> run(std::span<const double> input, ForwardCache* cache) const;

  std::vector<int> layer_sizes_;
  Head head_ = Head::Scalar;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
  std::uint64_t generation_ = 0;
};

// Numerically stable head functions.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);
double sigmoid(double z);

}  // namespace magaisil::nn
