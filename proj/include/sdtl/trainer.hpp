#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sdtl/losses.hpp"
#include "sdtl/nn.hpp"

namespace sdtl {

// Configuration of one training run. Plain SGD, no momentum or weight
// decay. Batch order is reshuffled deterministically per (seed, epoch), and
// every random decision (head init, pretext head init, shuffling) draws
// from its own named stream of `seed`, so changing lambda never perturbs
// the random schedule.
struct TrainConfig {
  double lambda = 0.0;        // weight of the self-distillation term
  double learning_rate = 0.05;  // >= 0; zero makes every update a no-op
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;

  void validate() const;  // throws ParameterError
};

// Frozen deep copy of the encoder taken at an epoch boundary. The student
// is regularized toward this copy for one full epoch.
struct TeacherSnapshot {
  EncoderParams encoder;
  std::size_t epoch_of_origin = 0;
};

// Deep copy; later student updates never touch the snapshot.
TeacherSnapshot snapshot_teacher(const EncoderParams& encoder, std::size_t epoch_of_origin);

// Student parameters plus the teacher in force. During epoch t,
// teacher.epoch_of_origin == t - 1; `epoch` counts completed epochs.
struct TrainState {
  EncoderParams encoder;
  HeadParams head;
  TeacherSnapshot teacher;
  std::size_t epoch = 0;
  std::uint64_t seed = 0;
};

// Per-epoch observability: batch-size-weighted means of the losses over the
// epoch's batches (evaluated before each update), training accuracy from
// the same forward passes, and end-of-epoch test metrics.
struct EpochReport {
  std::size_t epoch = 0;
  double mean_ce = 0.0;
  double mean_sd = 0.0;
  double mean_total = 0.0;
  double train_acc1 = 0.0;
  double test_acc1 = 0.0;
  double test_acc5 = 0.0;
  double drift = 0.0;
};

// End-of-epoch evaluation inputs. Optional: without it the last three
// report fields stay zero.
struct EvalContext {
  const LabeledBatch* test_set = nullptr;
  const Tensor* probe = nullptr;
  const EncoderParams* drift_reference = nullptr;  // usually the pretrained encoder
};

// Fresh state for fine-tuning: the student encoder starts at `pretrained`,
// the head is drawn from the "head_init" stream of config.seed, and the
// initial teacher wraps the pretrained encoder (epoch_of_origin 0).
TrainState init_train_state(const EncoderParams& pretrained, std::size_t num_classes,
                            const TrainConfig& config);

// One SGD step on one batch: cross-entropy through head and encoder plus
// lambda times the distillation gradient into the encoder only. The teacher
// is read, never written.
TrainState train_step(const TrainState& state, const LabeledBatch& batch,
                      const TrainConfig& config);

// One full epoch: snapshot the teacher from the current student first, then
// process every batch in the deterministic shuffled order.
std::pair<TrainState, EpochReport> train_epoch(const TrainState& state,
                                               const LabeledBatch& train_set,
                                               const TrainConfig& config,
                                               const EvalContext* eval = nullptr);

struct FitResult {
  EncoderParams encoder;
  HeadParams head;
  std::vector<EpochReport> reports;
};

// The complete fine-tuning run: fresh head, config.epochs epochs of
// self-distillation guided training, per-epoch test accuracy and drift
// against the pretrained encoder.
FitResult fit(const EncoderParams& pretrained, const LabeledBatch& train_set,
              const LabeledBatch& test_set, const Tensor& probe, const TrainConfig& config);

// Surrogate pretraining: fresh encoder plus a throwaway head trained by
// plain cross-entropy SGD on the pretext task. Returns the encoder only.
// encoder_dims = {input, hidden..., feature}.
EncoderParams pretrain(const LabeledBatch& pretext_set,
                       const std::vector<std::size_t>& encoder_dims, const TrainConfig& config);

}  // namespace sdtl
