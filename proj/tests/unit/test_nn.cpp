#include <doctest.h>

#include <cmath>
#include <vector>

#include "sdtl/error.hpp"
#include "sdtl/nn.hpp"
#include "sdtl/rng.hpp"
#include "sdtl/tensor.hpp"
#include "support/finite_diff.hpp"

using sdtl::EncoderParams;
using sdtl::HeadParams;
using sdtl::LinearLayer;
using sdtl::Rng;
using sdtl::Tensor;
namespace ts = testsupport;

namespace {

LinearLayer make_layer(std::size_t out, std::size_t in, std::vector<double> w,
                       std::vector<double> b) {
  return LinearLayer{Tensor::matrix(out, in, std::move(w)), Tensor::from_data({out}, std::move(b))};
}

// Sum of all feature entries: a scalar objective whose gradient w.r.t. the
// features is all-ones, convenient for finite-difference checks.
double feature_sum(const EncoderParams& params, const Tensor& batch) {
  const Tensor feats = sdtl::encoder_features(params, batch);
  double s = 0.0;
  for (std::size_t i = 0; i < feats.size(); ++i) s += feats[i];
  return s;
}

}  // namespace

TEST_CASE("encoder_forward hand cases") {
  SUBCASE("all-zero parameters produce all-zero features") {
    EncoderParams params;
    params.layers.push_back(make_layer(2, 3, std::vector<double>(6, 0.0), {0.0, 0.0}));
    Rng rng(1);
    const Tensor batch = sdtl::randn({4, 3}, rng, 1.0);
    const Tensor feats = sdtl::encoder_features(params, batch);
    for (std::size_t i = 0; i < feats.size(); ++i) CHECK(feats[i] == 0.0);
  }
  SUBCASE("a single identity layer passes the batch through") {
    EncoderParams params;
    params.layers.push_back(make_layer(2, 2, {1.0, 0.0, 0.0, 1.0}, {0.0, 0.0}));
    const Tensor batch = Tensor::matrix(2, 2, {0.5, -1.5, 2.0, 3.0});
    const Tensor feats = sdtl::encoder_features(params, batch);
    // No activation after the last layer, so negatives survive.
    for (std::size_t i = 0; i < feats.size(); ++i) CHECK(feats[i] == batch[i]);
  }
  SUBCASE("hand-evaluated 1-layer case") {
    EncoderParams params;
    params.layers.push_back(make_layer(1, 2, {1.0, -1.0}, {0.0}));
    const Tensor batch = Tensor::matrix(1, 2, {3.0, 1.0});
    const Tensor feats = sdtl::encoder_features(params, batch);
    CHECK(feats.size() == 1);
    CHECK(feats[0] == 2.0);
  }
  SUBCASE("batch width must match the first layer") {
    EncoderParams params;
    params.layers.push_back(make_layer(1, 2, {1.0, -1.0}, {0.0}));
    CHECK_THROWS_AS(sdtl::encoder_features(params, Tensor::zeros({1, 3})), sdtl::ShapeError);
  }
}

TEST_CASE("encoder_forward equals row-wise application") {
  Rng rng(2);
  EncoderParams params = EncoderParams::random({3, 4, 2}, rng);
  const Tensor batch = sdtl::randn({5, 3}, rng, 1.0);
  const Tensor all = sdtl::encoder_features(params, batch);
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    std::vector<double> row;
    for (std::size_t c = 0; c < batch.cols(); ++c) row.push_back(batch(r, c));
    const Tensor single = sdtl::encoder_features(params, Tensor::matrix(1, 3, std::move(row)));
    for (std::size_t c = 0; c < single.cols(); ++c) CHECK(single(0, c) == all(r, c));
  }
}

TEST_CASE("head_forward hand cases") {
  SUBCASE("zero weights leave only the bias") {
    HeadParams head{make_layer(3, 2, std::vector<double>(6, 0.0), {0.5, -1.0, 2.0})};
    const Tensor feats = Tensor::matrix(2, 2, {1.0, 2.0, 3.0, 4.0});
    const Tensor logits = sdtl::head_forward(head, feats);
    for (std::size_t r = 0; r < 2; ++r) {
      CHECK(logits(r, 0) == 0.5);
      CHECK(logits(r, 1) == -1.0);
      CHECK(logits(r, 2) == 2.0);
    }
  }
  SUBCASE("identity weight with zero bias is a pass-through") {
    HeadParams head{make_layer(2, 2, {1.0, 0.0, 0.0, 1.0}, {0.0, 0.0})};
    const Tensor feats = Tensor::matrix(1, 2, {-3.0, 7.0});
    const Tensor logits = sdtl::head_forward(head, feats);
    CHECK(logits(0, 0) == -3.0);
    CHECK(logits(0, 1) == 7.0);
  }
  SUBCASE("hand-evaluated affine map") {
    HeadParams head{make_layer(2, 2, {1.0, 0.0, 0.0, 2.0}, {1.0, 1.0})};
    const Tensor feats = Tensor::matrix(1, 2, {1.0, 1.0});
    const Tensor logits = sdtl::head_forward(head, feats);
    CHECK(logits(0, 0) == 2.0);
    CHECK(logits(0, 1) == 3.0);
  }
}

TEST_CASE("encoder_backward base cases") {
  Rng rng(3);
  EncoderParams params = EncoderParams::random({3, 4, 2}, rng);
  const Tensor batch = sdtl::randn({2, 3}, rng, 1.0);
  auto [feats, trace] = sdtl::encoder_forward(params, batch);

  SUBCASE("zero upstream gradient yields zero gradients everywhere") {
    const auto result = sdtl::encoder_backward(params, trace, Tensor::zeros(feats.shape()));
    for (const LinearLayer& g : result.grads.layers) {
      for (std::size_t i = 0; i < g.weight.size(); ++i) CHECK(g.weight[i] == 0.0);
      for (std::size_t i = 0; i < g.bias.size(); ++i) CHECK(g.bias[i] == 0.0);
    }
    for (std::size_t i = 0; i < result.grad_input.size(); ++i) {
      CHECK(result.grad_input[i] == 0.0);
    }
  }
  SUBCASE("mismatched gradient shape is a consistency error") {
    CHECK_THROWS_AS(sdtl::encoder_backward(params, trace, Tensor::zeros({2, 3})),
                    sdtl::ConsistencyError);
  }
  SUBCASE("trace from a different architecture is a consistency error") {
    Rng rng2(4);
    EncoderParams other = EncoderParams::random({3, 5, 2}, rng2);
    CHECK_THROWS_AS(sdtl::encoder_backward(other, trace, Tensor::zeros(feats.shape())),
                    sdtl::ConsistencyError);
  }
}

TEST_CASE("ReLU blocks gradient at negative pre-activations") {
  // One hidden unit, driven negative by the bias: the input weight must
  // receive zero gradient no matter the upstream signal.
  EncoderParams params;
  params.layers.push_back(make_layer(1, 1, {1.0}, {-5.0}));  // pre = x - 5 < 0 for small x
  params.layers.push_back(make_layer(1, 1, {2.0}, {0.0}));
  const Tensor batch = Tensor::matrix(1, 1, {1.0});
  auto [feats, trace] = sdtl::encoder_forward(params, batch);
  CHECK(feats[0] == 0.0);  // ReLU clamped the hidden unit
  const auto result = sdtl::encoder_backward(params, trace, Tensor::matrix(1, 1, {1.0}));
  CHECK(result.grads.layers[0].weight[0] == 0.0);
  CHECK(result.grads.layers[0].bias[0] == 0.0);
  CHECK(result.grad_input[0] == 0.0);
  // The output layer still sees its (zero-valued) input, so its bias grad
  // is the upstream gradient itself.
  CHECK(result.grads.layers[1].bias[0] == 1.0);
}

TEST_CASE("encoder gradients match central finite differences") {
  Rng rng(5);
  EncoderParams params = EncoderParams::random({3, 4, 2}, rng);
  Tensor batch = sdtl::randn({3, 3}, rng, 1.0);
  auto [feats, trace] = sdtl::encoder_forward(params, batch);
  REQUIRE(!ts::near_relu_kink(trace));

  const Tensor ones = Tensor::from_data(feats.shape(), std::vector<double>(feats.size(), 1.0));
  const auto analytic = sdtl::encoder_backward(params, trace, ones);

  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const Tensor& w = params.layers[l].weight;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double numeric = ts::central_difference(
          [&](double v) { return feature_sum(ts::with_encoder_weight(params, l, i, v), batch); },
          w[i]);
      CHECK(ts::relative_error(analytic.grads.layers[l].weight[i], numeric) < 1e-6);
    }
    const Tensor& b = params.layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double numeric = ts::central_difference(
          [&](double v) { return feature_sum(ts::with_encoder_bias(params, l, i, v), batch); },
          b[i]);
      CHECK(ts::relative_error(analytic.grads.layers[l].bias[i], numeric) < 1e-6);
    }
  }

  // Gradient w.r.t. the input, same oracle.
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double numeric = ts::central_difference(
        [&](double v) { return feature_sum(params, ts::with_entry(batch, i, v)); }, batch[i]);
    CHECK(ts::relative_error(analytic.grad_input[i], numeric) < 1e-6);
  }
}

TEST_CASE("head gradients match central finite differences") {
  Rng rng(6);
  HeadParams head = HeadParams::random(3, 4, rng);
  const Tensor feats = sdtl::randn({2, 3}, rng, 1.0);
  Rng grng(7);
  const Tensor grad_logits = sdtl::randn({2, 4}, grng, 1.0);

  const auto analytic = sdtl::head_backward(head, feats, grad_logits);

  // Scalar objective: <logits, grad_logits>, whose gradient w.r.t. logits
  // is grad_logits itself.
  auto objective = [&](const HeadParams& h, const Tensor& f) {
    const Tensor logits = sdtl::head_forward(h, f);
    double s = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) s += logits[i] * grad_logits[i];
    return s;
  };

  for (std::size_t i = 0; i < head.layer.weight.size(); ++i) {
    const double numeric = ts::central_difference(
        [&](double v) { return objective(ts::with_head_weight(head, i, v), feats); },
        head.layer.weight[i]);
    CHECK(ts::relative_error(analytic.grads.layer.weight[i], numeric) < 1e-6);
  }
  for (std::size_t i = 0; i < head.layer.bias.size(); ++i) {
    const double numeric = ts::central_difference(
        [&](double v) { return objective(ts::with_head_bias(head, i, v), feats); },
        head.layer.bias[i]);
    CHECK(ts::relative_error(analytic.grads.layer.bias[i], numeric) < 1e-6);
  }
  for (std::size_t i = 0; i < feats.size(); ++i) {
    const double numeric = ts::central_difference(
        [&](double v) { return objective(head, ts::with_entry(feats, i, v)); }, feats[i]);
    CHECK(ts::relative_error(analytic.grad_features[i], numeric) < 1e-6);
  }
}

TEST_CASE("head bias gradient is the column sum of grad_logits") {
  Rng rng(8);
  HeadParams head = HeadParams::random(2, 3, rng);
  const Tensor feats = sdtl::randn({4, 2}, rng, 1.0);
  const Tensor grad_logits = sdtl::randn({4, 3}, rng, 1.0);
  const auto result = sdtl::head_backward(head, feats, grad_logits);
  for (std::size_t c = 0; c < 3; ++c) {
    double col_sum = 0.0;
    for (std::size_t r = 0; r < 4; ++r) col_sum += grad_logits(r, c);
    CHECK(result.grads.layer.bias[c] == doctest::Approx(col_sum).epsilon(1e-15));
  }

  SUBCASE("zero grad_logits give zero gradients") {
    const auto zero = sdtl::head_backward(head, feats, Tensor::zeros({4, 3}));
    for (std::size_t i = 0; i < zero.grads.layer.weight.size(); ++i) {
      CHECK(zero.grads.layer.weight[i] == 0.0);
    }
    for (std::size_t i = 0; i < zero.grad_features.size(); ++i) {
      CHECK(zero.grad_features[i] == 0.0);
    }
  }
}

TEST_CASE("random initialization is deterministic with zero biases") {
  Rng rng1(9);
  Rng rng2(9);
  EncoderParams a = EncoderParams::random({4, 8, 3}, rng1);
  EncoderParams b = EncoderParams::random({4, 8, 3}, rng2);
  REQUIRE(a.layers.size() == 2);
  CHECK(a.input_dim() == 4);
  CHECK(a.feature_dim() == 3);
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    for (std::size_t i = 0; i < a.layers[l].weight.size(); ++i) {
      CHECK(a.layers[l].weight[i] == b.layers[l].weight[i]);
    }
    for (std::size_t i = 0; i < a.layers[l].bias.size(); ++i) {
      CHECK(a.layers[l].bias[i] == 0.0);
    }
  }
  CHECK_THROWS_AS(EncoderParams::random({4}, rng1), sdtl::ParameterError);
  CHECK_THROWS_AS(EncoderParams::random({4, 0, 2}, rng1), sdtl::ParameterError);
  CHECK_THROWS_AS(HeadParams::random(3, 1, rng1), sdtl::ParameterError);
}
