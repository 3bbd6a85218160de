#pragma once

#include <cstddef>
#include <vector>

#include "sdtl/tensor.hpp"

namespace sdtl {

// A batch of inputs with integer class labels in [0, K).
struct LabeledBatch {
  Tensor inputs;                    // B x in
  std::vector<std::size_t> labels;  // B entries

  std::size_t size() const { return labels.size(); }
};

// Scalar loss value plus its gradient with respect to the loss's direct
// input (logits for cross-entropy, student features for distillation).
struct LossValue {
  double value = 0.0;
  Tensor grad;
};

// Mean over the batch of -log softmax(logits_i)[label_i], computed through
// log-sum-exp so large logits do not overflow. grad = (softmax - onehot) / B.
LossValue softmax_cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels);

// Mean over the batch of the squared Euclidean distance between student and
// teacher features. Teacher features are constants: the gradient is with
// respect to the student only, grad = 2 (student - teacher) / B.
LossValue self_distillation_loss(const Tensor& student_feats, const Tensor& teacher_feats);

// ce + lambda * sd.
double total_loss(double ce, double sd, double lambda);

}  // namespace sdtl
