#pragma once

#include <cstddef>
#include <vector>

#include "sdtl/nn.hpp"
#include "sdtl/tensor.hpp"

namespace sdtl {

// Fraction of rows whose true label is among the k highest logits. Ties go
// to the lower class index, so the value is a pure function of its inputs.
double top_k_accuracy(const Tensor& logits, const std::vector<std::size_t>& labels,
                      std::size_t k);

// Mean over the probe rows of the squared feature distance between the two
// encoders. Quantifies how far encoder_a has moved from encoder_b.
double representation_drift(const EncoderParams& encoder_a, const EncoderParams& encoder_b,
                            const Tensor& probe);

}  // namespace sdtl
