#pragma once

// Central-difference gradient oracle. Analytic gradients throughout the
// library are validated against these numbers; nothing here shares code
// with the backward passes under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "sdtl/nn.hpp"
#include "sdtl/tensor.hpp"

namespace testsupport {

inline constexpr double kFdEpsilon = 1e-5;

// |a - n| over max(|a|, |n|, 1e-6): the absolute floor keeps near-zero
// gradients from inflating the ratio.
inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
  return std::fabs(analytic - numeric) / denom;
}

// d f / d x at x0 by central differences.
inline double central_difference(const std::function<double(double)>& f, double x0,
                                 double eps = kFdEpsilon) {
  return (f(x0 + eps) - f(x0 - eps)) / (2.0 * eps);
}

// Copy of `t` with one flat entry replaced.
inline sdtl::Tensor with_entry(const sdtl::Tensor& t, std::size_t index, double value) {
  std::vector<double> data(t.data().begin(), t.data().end());
  data.at(index) = value;
  return sdtl::Tensor::from_data(t.shape(), std::move(data));
}

inline sdtl::EncoderParams with_encoder_weight(const sdtl::EncoderParams& params,
                                               std::size_t layer, std::size_t index,
                                               double value) {
  sdtl::EncoderParams copy = params;
  copy.layers[layer].weight = with_entry(copy.layers[layer].weight, index, value);
  return copy;
}

inline sdtl::EncoderParams with_encoder_bias(const sdtl::EncoderParams& params, std::size_t layer,
                                             std::size_t index, double value) {
  sdtl::EncoderParams copy = params;
  copy.layers[layer].bias = with_entry(copy.layers[layer].bias, index, value);
  return copy;
}

inline sdtl::HeadParams with_head_weight(const sdtl::HeadParams& params, std::size_t index,
                                         double value) {
  sdtl::HeadParams copy = params;
  copy.layer.weight = with_entry(copy.layer.weight, index, value);
  return copy;
}

inline sdtl::HeadParams with_head_bias(const sdtl::HeadParams& params, std::size_t index,
                                       double value) {
  sdtl::HeadParams copy = params;
  copy.layer.bias = with_entry(copy.layer.bias, index, value);
  return copy;
}

// True when any hidden-layer pre-activation sits close enough to the ReLU
// kink that a finite-difference probe could flip its sign. Configurations
// flagged here are resampled rather than checked.
inline bool near_relu_kink(const sdtl::ForwardTrace& trace, double margin = 1e-4) {
  if (trace.pre.empty()) return false;
  for (std::size_t l = 0; l + 1 < trace.pre.size(); ++l) {
    for (double v : trace.pre[l].data()) {
      if (std::fabs(v) < margin) return true;
    }
  }
  return false;
}

}  // namespace testsupport
