#include "sdtl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdtl/error.hpp"
#include "sdtl/metrics.hpp"

namespace sdtl {

namespace {

// Fraction of rows whose label wins the argmax, ties broken toward the
// lower index. Counted in integers so epoch aggregation stays exact.
std::size_t top1_correct_count(const Tensor& logits, const std::vector<std::size_t>& labels) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const std::size_t y = labels[r];
    const double z_y = logits(r, y);
    if (!std::isfinite(z_y)) continue;  // a diverged model is never "correct"
    bool beaten = false;
    for (std::size_t j = 0; j < logits.cols() && !beaten; ++j) {
      if (logits(r, j) > z_y || (logits(r, j) == z_y && j < y)) beaten = true;
    }
    if (!beaten) ++correct;
  }
  return correct;
}

// Rows `indices[from, to)` of the training set as a contiguous batch.
LabeledBatch gather_batch(const LabeledBatch& set, const std::vector<std::size_t>& indices,
                          std::size_t from, std::size_t to) {
  const std::size_t dim = set.inputs.cols();
  std::vector<double> rows;
  rows.reserve((to - from) * dim);
  std::vector<std::size_t> labels;
  labels.reserve(to - from);
  for (std::size_t i = from; i < to; ++i) {
    const std::size_t src = indices[i];
    for (std::size_t c = 0; c < dim; ++c) rows.push_back(set.inputs(src, c));
    labels.push_back(set.labels[src]);
  }
  return LabeledBatch{Tensor::from_data({to - from, dim}, std::move(rows)), std::move(labels)};
}

// In-place SGD update p -= lr * g over one layer pair.
LinearLayer sgd_update(const LinearLayer& param, const LinearLayer& grad, double lr) {
  return LinearLayer{add(param.weight, scale(grad.weight, -lr)),
                     add(param.bias, scale(grad.bias, -lr))};
}

// Deterministic Fisher-Yates permutation of {0, ..., n-1}.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.next_index(i);
    std::swap(indices[i - 1], indices[j]);
  }
  return indices;
}

struct StepStats {
  double ce = 0.0;
  double sd = 0.0;
  double total = 0.0;
  std::size_t correct = 0;
};

// The shared core of train_step and train_epoch. Loss values and training
// accuracy are measured on the state *before* the update.
std::pair<TrainState, StepStats> step_impl(const TrainState& state, const LabeledBatch& batch,
                                           const TrainConfig& config) {
  if (batch.size() == 0) throw ParameterError("train_step: empty batch");

  auto [features, trace] = encoder_forward(state.encoder, batch.inputs);
  const Tensor logits = head_forward(state.head, features);
  const LossValue ce = softmax_cross_entropy(logits, batch.labels);

  const Tensor teacher_feats = encoder_features(state.teacher.encoder, batch.inputs);
  const LossValue sd = self_distillation_loss(features, teacher_feats);

  const HeadBackwardResult head_back = head_backward(state.head, features, ce.grad);
  // The distillation term regularizes the encoder only; the head sees pure
  // cross-entropy gradient.
  const Tensor grad_features =
      add(head_back.grad_features, scale(sd.grad, config.lambda));
  const EncoderBackwardResult enc_back = encoder_backward(state.encoder, trace, grad_features);

  TrainState next = state;
  for (std::size_t l = 0; l < next.encoder.layers.size(); ++l) {
    next.encoder.layers[l] =
        sgd_update(state.encoder.layers[l], enc_back.grads.layers[l], config.learning_rate);
  }
  next.head.layer = sgd_update(state.head.layer, head_back.grads.layer, config.learning_rate);

  StepStats stats;
  stats.ce = ce.value;
  stats.sd = sd.value;
  stats.total = total_loss(ce.value, sd.value, config.lambda);
  stats.correct = top1_correct_count(logits, batch.labels);
  return {std::move(next), stats};
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("train config: lambda must be finite and >= 0");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("train config: learning rate must be finite and >= 0");
  }
  if (batch_size == 0) throw ParameterError("train config: batch size must be >= 1");
}

TeacherSnapshot snapshot_teacher(const EncoderParams& encoder, std::size_t epoch_of_origin) {
  return TeacherSnapshot{encoder, epoch_of_origin};
}

TrainState init_train_state(const EncoderParams& pretrained, std::size_t num_classes,
                            const TrainConfig& config) {
  config.validate();
  Rng head_rng = Rng::stream(config.seed, "head_init");
  TrainState state;
  state.encoder = pretrained;
  state.head = HeadParams::random(pretrained.feature_dim(), num_classes, head_rng);
  state.teacher = snapshot_teacher(pretrained, 0);
  state.epoch = 0;
  state.seed = config.seed;
  return state;
}

TrainState train_step(const TrainState& state, const LabeledBatch& batch,
                      const TrainConfig& config) {
  config.validate();
  return step_impl(state, batch, config).first;
}

std::pair<TrainState, EpochReport> train_epoch(const TrainState& state,
                                               const LabeledBatch& train_set,
                                               const TrainConfig& config,
                                               const EvalContext* eval) {
  config.validate();
  const std::size_t n = train_set.size();
  if (n == 0) throw ParameterError("train_epoch: empty training set");
  if (train_set.inputs.rows() != n) {
    throw ConsistencyError("train_epoch: input rows and label count disagree");
  }

  TrainState current = state;
  // Snapshot first: the teacher for this epoch is the student as it stood
  // at the epoch boundary, frozen across all of the epoch's updates.
  current.teacher = snapshot_teacher(current.encoder, current.epoch);

  Rng shuffle_rng = Rng::stream(current.seed, "shuffle", current.epoch);
  const std::vector<std::size_t> order = shuffled_indices(n, shuffle_rng);

  double ce_sum = 0.0;
  double sd_sum = 0.0;
  double total_sum = 0.0;
  std::size_t correct = 0;
  for (std::size_t from = 0; from < n; from += config.batch_size) {
    const std::size_t to = std::min(n, from + config.batch_size);
    const LabeledBatch batch = gather_batch(train_set, order, from, to);
    auto [next, stats] = step_impl(current, batch, config);
    current = std::move(next);
    const double weight = static_cast<double>(to - from);
    ce_sum += stats.ce * weight;
    sd_sum += stats.sd * weight;
    total_sum += stats.total * weight;
    correct += stats.correct;
  }
  current.epoch = state.epoch + 1;

  EpochReport report;
  report.epoch = current.epoch;
  report.mean_ce = ce_sum / static_cast<double>(n);
  report.mean_sd = sd_sum / static_cast<double>(n);
  report.mean_total = total_sum / static_cast<double>(n);
  report.train_acc1 = static_cast<double>(correct) / static_cast<double>(n);
  if (eval != nullptr && eval->test_set != nullptr) {
    const Tensor logits =
        head_forward(current.head, encoder_features(current.encoder, eval->test_set->inputs));
    const std::size_t classes = current.head.num_classes();
    report.test_acc1 = top_k_accuracy(logits, eval->test_set->labels, 1);
    report.test_acc5 = top_k_accuracy(logits, eval->test_set->labels, std::min<std::size_t>(5, classes));
  }
  if (eval != nullptr && eval->probe != nullptr && eval->drift_reference != nullptr) {
    report.drift = representation_drift(*eval->drift_reference, current.encoder, *eval->probe);
  }
  return {std::move(current), report};
}

FitResult fit(const EncoderParams& pretrained, const LabeledBatch& train_set,
              const LabeledBatch& test_set, const Tensor& probe, const TrainConfig& config) {
  config.validate();
  if (train_set.size() == 0) throw ParameterError("fit: empty training set");

  std::size_t num_classes = 0;
  for (std::size_t label : train_set.labels) num_classes = std::max(num_classes, label + 1);

  TrainState state = init_train_state(pretrained, num_classes, config);
  EvalContext eval;
  eval.test_set = &test_set;
  eval.probe = &probe;
  eval.drift_reference = &pretrained;

  FitResult result;
  result.reports.reserve(config.epochs);
  for (std::size_t e = 0; e < config.epochs; ++e) {
    auto [next, report] = train_epoch(state, train_set, config, &eval);
    state = std::move(next);
    result.reports.push_back(report);
  }
  result.encoder = std::move(state.encoder);
  result.head = std::move(state.head);
  return result;
}

EncoderParams pretrain(const LabeledBatch& pretext_set,
                       const std::vector<std::size_t>& encoder_dims, const TrainConfig& config) {
  config.validate();
  const std::size_t n = pretext_set.size();
  if (n == 0) throw ParameterError("pretrain: empty pretext set");

  std::size_t num_classes = 0;
  for (std::size_t label : pretext_set.labels) num_classes = std::max(num_classes, label + 1);

  Rng encoder_rng = Rng::stream(config.seed, "encoder_init");
  EncoderParams encoder = EncoderParams::random(encoder_dims, encoder_rng);
  Rng head_rng = Rng::stream(config.seed, "pretext_head_init");
  HeadParams head = HeadParams::random(encoder.feature_dim(), num_classes, head_rng);

  // Plain cross-entropy SGD on the pretext labels; the head is discarded
  // afterwards and config.lambda plays no role here.
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng = Rng::stream(config.seed, "pretext_shuffle", epoch);
    const std::vector<std::size_t> order = shuffled_indices(n, shuffle_rng);
    for (std::size_t from = 0; from < n; from += config.batch_size) {
      const std::size_t to = std::min(n, from + config.batch_size);
      const LabeledBatch batch = gather_batch(pretext_set, order, from, to);
      auto [features, trace] = encoder_forward(encoder, batch.inputs);
      const Tensor logits = head_forward(head, features);
      const LossValue ce = softmax_cross_entropy(logits, batch.labels);
      const HeadBackwardResult head_back = head_backward(head, features, ce.grad);
      const EncoderBackwardResult enc_back =
          encoder_backward(encoder, trace, head_back.grad_features);
      for (std::size_t l = 0; l < encoder.layers.size(); ++l) {
        encoder.layers[l] =
            sgd_update(encoder.layers[l], enc_back.grads.layers[l], config.learning_rate);
      }
      head.layer = sgd_update(head.layer, head_back.grads.layer, config.learning_rate);
    }
  }
  return encoder;
}

}  // namespace sdtl
