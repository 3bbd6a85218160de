#include "sdtl/nn.hpp"

#include <cmath>
#include <utility>

#include "sdtl/error.hpp"

namespace sdtl {

namespace {

// y = x W^T + b for a batch x [B x in].
Tensor affine_forward(const Tensor& x, const LinearLayer& layer) {
  const std::size_t batch = x.rows();
  const std::size_t in = layer.in_dim();
  const std::size_t out = layer.out_dim();
  if (x.cols() != in) {
    throw ShapeError("linear layer: input " + x.shape_str() + " does not match weight " +
                     layer.weight.shape_str());
  }
  std::vector<double> y(batch * out);
  const double* px = x.data().data();
  const double* pw = layer.weight.data().data();
  const double* pb = layer.bias.data().data();
  for (std::size_t i = 0; i < batch; ++i) {
    const double* xi = px + i * in;
    double* yi = y.data() + i * out;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wo = pw + o * in;
      double acc = pb[o];
      for (std::size_t j = 0; j < in; ++j) acc += xi[j] * wo[j];
      yi[o] = acc;
    }
  }
  return Tensor::from_data({batch, out}, std::move(y));
}

Tensor relu(const Tensor& x) {
  std::vector<double> y(x.size());
  const auto d = x.data();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = d[i] > 0.0 ? d[i] : 0.0;
  return Tensor::from_data(x.shape(), std::move(y));
}

// Gradients of one affine layer. grad_pre is dL/dy [B x out], x is the layer
// input [B x in]. Returns (dW [out x in], db [out], dx [B x in]).
void affine_backward(const Tensor& x, const LinearLayer& layer, const Tensor& grad_pre,
                     LinearLayer* grads, Tensor* grad_input) {
  const std::size_t batch = x.rows();
  const std::size_t in = layer.in_dim();
  const std::size_t out = layer.out_dim();
  std::vector<double> dw(out * in, 0.0);
  std::vector<double> db(out, 0.0);
  std::vector<double> dx(batch * in, 0.0);
  const double* px = x.data().data();
  const double* pg = grad_pre.data().data();
  const double* pw = layer.weight.data().data();
  for (std::size_t i = 0; i < batch; ++i) {
    const double* xi = px + i * in;
    const double* gi = pg + i * out;
    double* dxi = dx.data() + i * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double g = gi[o];
      db[o] += g;
      double* dwo = dw.data() + o * in;
      const double* wo = pw + o * in;
      for (std::size_t j = 0; j < in; ++j) {
        dwo[j] += g * xi[j];
        dxi[j] += g * wo[j];
      }
    }
  }
  grads->weight = Tensor::from_data({out, in}, std::move(dw));
  grads->bias = Tensor::from_data({out}, std::move(db));
  *grad_input = Tensor::from_data({batch, in}, std::move(dx));
}

void check_layer(const LinearLayer& layer, std::size_t index) {
  if (layer.weight.ndim() != 2) {
    throw ShapeError("layer " + std::to_string(index) + ": weight must be 2-d, got " +
                     layer.weight.shape_str());
  }
  if (layer.bias.ndim() != 1 || layer.bias.dim(0) != layer.weight.dim(0)) {
    throw ShapeError("layer " + std::to_string(index) + ": bias " + layer.bias.shape_str() +
                     " does not match weight " + layer.weight.shape_str());
  }
}

}  // namespace

EncoderParams EncoderParams::random(const std::vector<std::size_t>& dims, Rng& rng) {
  if (dims.size() < 2) {
    throw ParameterError("encoder: need at least input and feature dimensions");
  }
  for (std::size_t d : dims) {
    if (d == 0) throw ParameterError("encoder: layer dimensions must be positive");
  }
  EncoderParams params;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t in = dims[l];
    const std::size_t out = dims[l + 1];
    LinearLayer layer;
    layer.weight = randn({out, in}, rng, std::sqrt(2.0 / static_cast<double>(in)));
    layer.bias = Tensor::zeros({out});
    params.layers.push_back(std::move(layer));
  }
  return params;
}

std::size_t EncoderParams::input_dim() const {
  if (layers.empty()) throw ParameterError("encoder: no layers");
  return layers.front().in_dim();
}

std::size_t EncoderParams::feature_dim() const {
  if (layers.empty()) throw ParameterError("encoder: no layers");
  return layers.back().out_dim();
}

std::vector<std::size_t> EncoderParams::dims() const {
  std::vector<std::size_t> d;
  if (layers.empty()) return d;
  d.push_back(layers.front().in_dim());
  for (const LinearLayer& layer : layers) d.push_back(layer.out_dim());
  return d;
}

bool EncoderParams::same_architecture(const EncoderParams& other) const {
  return dims() == other.dims();
}

HeadParams HeadParams::random(std::size_t feature_dim, std::size_t num_classes, Rng& rng) {
  if (num_classes < 2) {
    throw ParameterError("head: need at least 2 classes, got " + std::to_string(num_classes));
  }
  if (feature_dim == 0) {
    throw ParameterError("head: feature dimension must be positive");
  }
  HeadParams params;
  params.layer.weight =
      randn({num_classes, feature_dim}, rng, std::sqrt(2.0 / static_cast<double>(feature_dim)));
  params.layer.bias = Tensor::zeros({num_classes});
  return params;
}

std::pair<Tensor, ForwardTrace> encoder_forward(const EncoderParams& params, const Tensor& batch) {
  if (params.layers.empty()) throw ParameterError("encoder_forward: no layers");
  if (batch.ndim() != 2 || batch.cols() != params.input_dim()) {
    throw ShapeError("encoder_forward: batch " + batch.shape_str() +
                     " does not match input dimension " + std::to_string(params.input_dim()));
  }
  ForwardTrace trace;
  trace.input = batch;
  Tensor x = batch;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    check_layer(params.layers[l], l);
    Tensor pre = affine_forward(x, params.layers[l]);
    const bool last = (l + 1 == params.layers.size());
    Tensor post = last ? pre : relu(pre);
    trace.pre.push_back(std::move(pre));
    trace.post.push_back(post);
    x = std::move(post);
  }
  return {x, std::move(trace)};
}

Tensor encoder_features(const EncoderParams& params, const Tensor& batch) {
  return encoder_forward(params, batch).first;
}

Tensor head_forward(const HeadParams& params, const Tensor& features) {
  if (features.ndim() != 2 || features.cols() != params.feature_dim()) {
    throw ShapeError("head_forward: features " + features.shape_str() +
                     " do not match feature dimension " + std::to_string(params.feature_dim()));
  }
  return affine_forward(features, params.layer);
}

EncoderBackwardResult encoder_backward(const EncoderParams& params, const ForwardTrace& trace,
                                       const Tensor& grad_features) {
  const std::size_t n = params.layers.size();
  if (trace.pre.size() != n || trace.post.size() != n) {
    throw ConsistencyError("encoder_backward: trace has " + std::to_string(trace.pre.size()) +
                           " layers, parameters have " + std::to_string(n));
  }
  if (trace.input.ndim() != 2 || trace.input.cols() != params.input_dim()) {
    throw ConsistencyError("encoder_backward: trace input " + trace.input.shape_str() +
                           " does not match encoder input dimension " +
                           std::to_string(params.input_dim()));
  }
  const std::size_t batch = trace.input.rows();
  if (grad_features.ndim() != 2 || grad_features.rows() != batch ||
      grad_features.cols() != params.feature_dim()) {
    throw ConsistencyError("encoder_backward: grad_features " + grad_features.shape_str() +
                           " does not match features [" + std::to_string(batch) + "x" +
                           std::to_string(params.feature_dim()) + "]");
  }
  for (std::size_t l = 0; l < n; ++l) {
    if (trace.pre[l].ndim() != 2 || trace.pre[l].rows() != batch ||
        trace.pre[l].cols() != params.layers[l].out_dim()) {
      throw ConsistencyError("encoder_backward: trace layer " + std::to_string(l) +
                             " has shape " + trace.pre[l].shape_str() +
                             ", parameters expect [" + std::to_string(batch) + "x" +
                             std::to_string(params.layers[l].out_dim()) + "]");
    }
  }

  EncoderBackwardResult result;
  result.grads.layers.resize(n);
  Tensor grad_post = grad_features;
  for (std::size_t l = n; l-- > 0;) {
    Tensor grad_pre;
    if (l + 1 == n) {
      grad_pre = grad_post;  // no activation after the last layer
    } else {
      // ReLU gate: zero gradient where the pre-activation was <= 0.
      std::vector<double> g(grad_post.size());
      const auto gp = grad_post.data();
      const auto pre = trace.pre[l].data();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = pre[i] > 0.0 ? gp[i] : 0.0;
      grad_pre = Tensor::from_data(grad_post.shape(), std::move(g));
    }
    const Tensor& layer_input = (l == 0) ? trace.input : trace.post[l - 1];
    Tensor grad_input;
    affine_backward(layer_input, params.layers[l], grad_pre, &result.grads.layers[l], &grad_input);
    grad_post = std::move(grad_input);
  }
  result.grad_input = std::move(grad_post);
  return result;
}

HeadBackwardResult head_backward(const HeadParams& params, const Tensor& features,
                                 const Tensor& grad_logits) {
  if (features.ndim() != 2 || features.cols() != params.feature_dim()) {
    throw ConsistencyError("head_backward: features " + features.shape_str() +
                           " do not match feature dimension " +
                           std::to_string(params.feature_dim()));
  }
  if (grad_logits.ndim() != 2 || grad_logits.rows() != features.rows() ||
      grad_logits.cols() != params.num_classes()) {
    throw ConsistencyError("head_backward: grad_logits " + grad_logits.shape_str() +
                           " does not match logits [" + std::to_string(features.rows()) + "x" +
                           std::to_string(params.num_classes()) + "]");
  }
  HeadBackwardResult result;
  affine_backward(features, params.layer, grad_logits, &result.grads.layer,
                  &result.grad_features);
  return result;
}

std::vector<std::size_t> default_encoder_dims(std::size_t input_dim) {
  return {input_dim, kDefaultHiddenDim, kDefaultFeatureDim};
}

}  // namespace sdtl
