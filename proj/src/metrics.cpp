#include "sdtl/metrics.hpp"

#include <cmath>
#include <string>

#include "sdtl/error.hpp"
#include "sdtl/losses.hpp"

namespace sdtl {

double top_k_accuracy(const Tensor& logits, const std::vector<std::size_t>& labels,
                      std::size_t k) {
  if (logits.ndim() != 2) {
    throw ShapeError("top_k_accuracy: logits must be 2-d, got " + logits.shape_str());
  }
  const std::size_t batch = logits.rows();
  const std::size_t num_classes = logits.cols();
  if (k < 1 || k > num_classes) {
    throw ParameterError("top_k_accuracy: k=" + std::to_string(k) + " out of range [1, " +
                         std::to_string(num_classes) + "]");
  }
  if (labels.size() != batch) {
    throw ParameterError("top_k_accuracy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(batch) + " rows");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < batch; ++i) {
    const std::size_t y = labels[i];
    if (y >= num_classes) {
      throw ParameterError("top_k_accuracy: label " + std::to_string(y) + " at row " +
                           std::to_string(i) + " out of range [0, " +
                           std::to_string(num_classes) + ")");
    }
    const double zy = logits(i, y);
    // A non-finite score never counts as a hit (a diverged model must not
    // read as accurate merely because NaN defeats every comparison).
    if (!std::isfinite(zy)) continue;
    // Rank of the true class with lower-index-first tie breaking.
    std::size_t rank = 0;
    for (std::size_t j = 0; j < num_classes; ++j) {
      if (logits(i, j) > zy || (logits(i, j) == zy && j < y)) ++rank;
    }
    if (rank < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch);
}

double representation_drift(const EncoderParams& encoder_a, const EncoderParams& encoder_b,
                            const Tensor& probe) {
  if (!encoder_a.same_architecture(encoder_b)) {
    auto dims_str = [](const EncoderParams& e) {
      std::string s = "[";
      const auto d = e.dims();
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (i > 0) s += "x";
        s += std::to_string(d[i]);
      }
      return s + "]";
    };
    throw ParameterError("representation_drift: encoder architectures differ: " +
                         dims_str(encoder_a) + " vs " + dims_str(encoder_b));
  }
  const Tensor feats_a = encoder_features(encoder_a, probe);
  const Tensor feats_b = encoder_features(encoder_b, probe);
  return self_distillation_loss(feats_a, feats_b).value;
}

}  // namespace sdtl
