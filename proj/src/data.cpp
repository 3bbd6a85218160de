#include "sdtl/data.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include "sdtl/csv.hpp"
#include "sdtl/error.hpp"
#include "sdtl/rng.hpp"

namespace sdtl {

namespace {

// Row-major d x d matrices.
using Matrix = std::vector<double>;

// Orthonormalize the rows of a random Gaussian matrix (modified
// Gram-Schmidt). Entries come from `rng`, so the result is deterministic.
Matrix random_orthogonal(std::size_t d, Rng& rng) {
  Matrix q(d * d);
  for (double& v : q) v = rng.next_gaussian();
  for (std::size_t i = 0; i < d; ++i) {
    double* ri = q.data() + i * d;
    for (std::size_t j = 0; j < i; ++j) {
      const double* rj = q.data() + j * d;
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += ri[k] * rj[k];
      for (std::size_t k = 0; k < d; ++k) ri[k] -= dot * rj[k];
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < d; ++k) norm += ri[k] * ri[k];
    norm = std::sqrt(norm);
    // A Gaussian matrix is singular with probability zero; guard anyway.
    if (norm < 1e-12) throw ParameterError("benchmark: degenerate random transform");
    for (std::size_t k = 0; k < d; ++k) ri[k] /= norm;
  }
  return q;
}

void apply_transform(const Matrix& q, const double* x, double* out, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) {
    const double* row = q.data() + i * d;
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += row[k] * x[k];
    out[i] = acc;
  }
}

struct Mixture {
  // centers[class * clusters + cluster] is a d-vector.
  std::vector<std::vector<double>> centers;
  std::size_t num_classes;
  std::size_t clusters;
  double stddev;
  std::size_t dim;

  // One sample from the given class; the cluster choice and the noise come
  // from `rng`.
  void sample(std::size_t cls, Rng& rng, double* out) const {
    const std::size_t cluster = rng.next_index(clusters);
    const std::vector<double>& c = centers[cls * clusters + cluster];
    for (std::size_t k = 0; k < dim; ++k) out[k] = c[k] + stddev * rng.next_gaussian();
  }
};

}  // namespace

void BenchmarkSpec::validate() const {
  if (input_dim == 0) throw ParameterError("benchmark: input_dim must be positive");
  if (num_classes < 2) throw ParameterError("benchmark: num_classes must be at least 2");
  if (clusters_per_class == 0) {
    throw ParameterError("benchmark: clusters_per_class must be positive");
  }
  if (pretrain_samples == 0 || train_samples == 0 || test_samples == 0 || probe_samples == 0) {
    throw ParameterError("benchmark: all split sizes must be positive");
  }
  if (!(cluster_stddev > 0.0) || !std::isfinite(cluster_stddev)) {
    throw ParameterError("benchmark: cluster_stddev must be positive and finite");
  }
  if (num_pretext_transforms < 2) {
    throw ParameterError("benchmark: num_pretext_transforms must be at least 2");
  }
}

TransferBenchmark make_transfer_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  const std::size_t d = spec.input_dim;

  Mixture mixture;
  mixture.num_classes = spec.num_classes;
  mixture.clusters = spec.clusters_per_class;
  mixture.stddev = spec.cluster_stddev;
  mixture.dim = d;
  {
    Rng rng = Rng::stream(spec.seed, "bench.centers");
    for (std::size_t i = 0; i < spec.num_classes * spec.clusters_per_class; ++i) {
      std::vector<double> c(d);
      for (double& v : c) v = rng.next_gaussian();
      mixture.centers.push_back(std::move(c));
    }
  }

  std::vector<Matrix> transforms;
  {
    Rng rng = Rng::stream(spec.seed, "bench.transforms");
    for (std::size_t r = 0; r < spec.num_pretext_transforms; ++r) {
      transforms.push_back(random_orthogonal(d, rng));
    }
  }

  TransferBenchmark bench;
  bench.spec = spec;

  // Pretext split: mixture sample, then one transform per sample
  // (round-robin, so the pretext classes are balanced); the label is the
  // transform index.
  {
    Rng rng = Rng::stream(spec.seed, "bench.pretext");
    const std::size_t n = spec.pretrain_samples;
    std::vector<double> inputs(n * d);
    std::vector<std::size_t> labels(n);
    std::vector<double> raw(d);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t cls = rng.next_index(spec.num_classes);
      mixture.sample(cls, rng, raw.data());
      const std::size_t r = i % spec.num_pretext_transforms;
      apply_transform(transforms[r], raw.data(), inputs.data() + i * d, d);
      labels[i] = r;
    }
    bench.pretext_set = {Tensor::from_data({n, d}, std::move(inputs)), std::move(labels)};
  }

  // Downstream splits: round-robin class assignment keeps them balanced
  // (per-class counts within 1 of samples/K). Each split draws from its own
  // stream, so train and test are disjoint by construction.
  auto make_downstream = [&](std::size_t n, const char* stream) {
    Rng rng = Rng::stream(spec.seed, stream);
    std::vector<double> inputs(n * d);
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t cls = i % spec.num_classes;
      mixture.sample(cls, rng, inputs.data() + i * d);
      labels[i] = cls;
    }
    return LabeledBatch{Tensor::from_data({n, d}, std::move(inputs)), std::move(labels)};
  };
  bench.downstream_train = make_downstream(spec.train_samples, "bench.train");
  bench.downstream_test = make_downstream(spec.test_samples, "bench.test");

  {
    Rng rng = Rng::stream(spec.seed, "bench.probe");
    const std::size_t n = spec.probe_samples;
    std::vector<double> inputs(n * d);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t cls = rng.next_index(spec.num_classes);
      mixture.sample(cls, rng, inputs.data() + i * d);
    }
    bench.probe_set = Tensor::from_data({n, d}, std::move(inputs));
  }

  return bench;
}

namespace {

void write_header(std::ostream& out, std::size_t d, bool with_label) {
  for (std::size_t k = 0; k < d; ++k) {
    if (k > 0) out << ',';
    out << 'x' << k;
  }
  if (with_label) out << ",label";
  out << '\n';
}

}  // namespace

void write_labeled_csv(std::ostream& out, const LabeledBatch& batch) {
  const std::size_t n = batch.inputs.rows();
  const std::size_t d = batch.inputs.cols();
  if (batch.labels.size() != n) {
    throw ParameterError("write_labeled_csv: " + std::to_string(batch.labels.size()) +
                         " labels for " + std::to_string(n) + " rows");
  }
  write_header(out, d, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      if (k > 0) out << ',';
      out << format_g6(batch.inputs(i, k));
    }
    out << ',' << batch.labels[i] << '\n';
  }
}

void write_probe_csv(std::ostream& out, const Tensor& probe) {
  const std::size_t n = probe.rows();
  const std::size_t d = probe.cols();
  write_header(out, d, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      if (k > 0) out << ',';
      out << format_g6(probe(i, k));
    }
    out << '\n';
  }
}

}  // namespace sdtl
