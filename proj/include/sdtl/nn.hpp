#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sdtl/rng.hpp"
#include "sdtl/tensor.hpp"

namespace sdtl {

// One affine map y = x W^T + b. Weight is [out x in], bias is [out].
struct LinearLayer {
  Tensor weight;
  Tensor bias;

  std::size_t in_dim() const { return weight.dim(1); }
  std::size_t out_dim() const { return weight.dim(0); }
};

// Encoder f: a stack of linear layers with ReLU after every layer except
// the last, producing a flat feature vector per sample. The layer sizes are
// fixed at construction.
struct EncoderParams {
  std::vector<LinearLayer> layers;

  // Fresh parameters for the architecture dims = {input, hidden..., feature}:
  // weights ~ N(0, 2/in_dim) per layer, biases zero.
  static EncoderParams random(const std::vector<std::size_t>& dims, Rng& rng);

  std::size_t input_dim() const;
  std::size_t feature_dim() const;
  std::vector<std::size_t> dims() const;
  bool same_architecture(const EncoderParams& other) const;
};

// Classification head g: a single linear layer, feature_dim -> num_classes.
// Logits come out raw; softmax lives in the loss.
struct HeadParams {
  LinearLayer layer;

  static HeadParams random(std::size_t feature_dim, std::size_t num_classes, Rng& rng);

  std::size_t feature_dim() const { return layer.in_dim(); }
  std::size_t num_classes() const { return layer.out_dim(); }
};

// Activations recorded during encoder_forward, replayed by encoder_backward.
struct ForwardTrace {
  Tensor input;              // B x in
  std::vector<Tensor> pre;   // per layer, before activation
  std::vector<Tensor> post;  // per layer, after activation (last layer: == pre)
};

struct EncoderGrads {
  std::vector<LinearLayer> layers;  // same shapes as the parameters
};

struct HeadGrads {
  LinearLayer layer;
};

std::pair<Tensor, ForwardTrace> encoder_forward(const EncoderParams& params, const Tensor& batch);

// Forward without the trace, for evaluation paths.
Tensor encoder_features(const EncoderParams& params, const Tensor& batch);

Tensor head_forward(const HeadParams& params, const Tensor& features);

struct EncoderBackwardResult {
  EncoderGrads grads;
  Tensor grad_input;
};

// Exact reverse-mode gradients of the traced composition with respect to
// every weight, bias and the input. ReLU takes zero gradient at and below
// the kink.
EncoderBackwardResult encoder_backward(const EncoderParams& params, const ForwardTrace& trace,
                                       const Tensor& grad_features);

struct HeadBackwardResult {
  HeadGrads grads;
  Tensor grad_features;
};

HeadBackwardResult head_backward(const HeadParams& params, const Tensor& features,
                                 const Tensor& grad_logits);

inline constexpr std::size_t kDefaultHiddenDim = 64;
inline constexpr std::size_t kDefaultFeatureDim = 32;

// {input_dim, 64, 32} -- the desk-scale default architecture.
std::vector<std::size_t> default_encoder_dims(std::size_t input_dim);

}  // namespace sdtl
