#include "sdtl/losses.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sdtl/error.hpp"

namespace sdtl {

LossValue softmax_cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels) {
  if (logits.ndim() != 2) {
    throw ShapeError("softmax_cross_entropy: logits must be 2-d, got " + logits.shape_str());
  }
  const std::size_t batch = logits.rows();
  const std::size_t num_classes = logits.cols();
  if (num_classes < 2) {
    throw ParameterError("softmax_cross_entropy: need at least 2 classes, got " +
                         std::to_string(num_classes));
  }
  if (labels.size() != batch) {
    throw ParameterError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(batch) + " rows");
  }
  for (std::size_t i = 0; i < batch; ++i) {
    if (labels[i] >= num_classes) {
      throw ParameterError("softmax_cross_entropy: label " + std::to_string(labels[i]) +
                           " at row " + std::to_string(i) + " out of range [0, " +
                           std::to_string(num_classes) + ")");
    }
  }

  const double* z = logits.data().data();
  std::vector<double> grad(batch * num_classes);
  const double inv_batch = 1.0 / static_cast<double>(batch);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const double* zi = z + i * num_classes;
    double m = zi[0];
    for (std::size_t j = 1; j < num_classes; ++j) m = zi[j] > m ? zi[j] : m;
    double sum = 0.0;
    for (std::size_t j = 0; j < num_classes; ++j) sum += std::exp(zi[j] - m);
    const double lse = m + std::log(sum);
    loss += (lse - zi[labels[i]]) * inv_batch;
    double* gi = grad.data() + i * num_classes;
    for (std::size_t j = 0; j < num_classes; ++j) {
      double p = std::exp(zi[j] - lse);
      if (j == labels[i]) p -= 1.0;
      gi[j] = p * inv_batch;
    }
  }
  return {loss, Tensor::from_data({batch, num_classes}, std::move(grad))};
}

LossValue self_distillation_loss(const Tensor& student_feats, const Tensor& teacher_feats) {
  if (!student_feats.same_shape(teacher_feats)) {
    throw ShapeError("self_distillation_loss: shapes differ: " + student_feats.shape_str() +
                     " vs " + teacher_feats.shape_str());
  }
  if (student_feats.ndim() != 2) {
    throw ShapeError("self_distillation_loss: features must be 2-d, got " +
                     student_feats.shape_str());
  }
  const std::size_t batch = student_feats.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  const auto s = student_feats.data();
  const auto t = teacher_feats.data();
  std::vector<double> grad(s.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s[i] - t[i];
    loss += d * d * inv_batch;
    grad[i] = 2.0 * d * inv_batch;
  }
  return {loss, Tensor::from_data(student_feats.shape(), std::move(grad))};
}

double total_loss(double ce, double sd, double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw ParameterError("total_loss: lambda must be nonnegative and finite");
  }
  return ce + lambda * sd;
}

}  // namespace sdtl
