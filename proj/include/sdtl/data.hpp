#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sdtl/losses.hpp"
#include "sdtl/tensor.hpp"

namespace sdtl {

// Parameters of the synthetic transfer benchmark. Defaults are the pinned
// desk-scale configuration; full pipelines on it run in seconds.
struct BenchmarkSpec {
  std::size_t input_dim = 16;
  std::size_t num_classes = 5;
  std::size_t clusters_per_class = 2;
  std::size_t pretrain_samples = 2000;
  std::size_t train_samples = 500;
  std::size_t test_samples = 500;
  std::size_t probe_samples = 200;
  double cluster_stddev = 0.6;
  std::size_t num_pretext_transforms = 4;
  std::uint64_t seed = 0;

  void validate() const;  // throws ParameterError
};

// The generated benchmark. The downstream task is a class-conditional
// Gaussian mixture; the pretext set draws inputs from the same mixture,
// applies one of R fixed random orthogonal transforms per sample and labels
// the sample with the transform index. The probe set is unlabeled mixture
// data used for drift measurement.
struct TransferBenchmark {
  BenchmarkSpec spec;
  LabeledBatch pretext_set;       // labels = transform indices in [0, R)
  LabeledBatch downstream_train;  // labels in [0, K)
  LabeledBatch downstream_test;
  Tensor probe_set;               // P x input_dim
};

TransferBenchmark make_transfer_benchmark(const BenchmarkSpec& spec);

// CSV export for external inspection: header x0..x{d-1},label.
void write_labeled_csv(std::ostream& out, const LabeledBatch& batch);
// Probe rows carry no label column: header x0..x{d-1}.
void write_probe_csv(std::ostream& out, const Tensor& probe);

}  // namespace sdtl
