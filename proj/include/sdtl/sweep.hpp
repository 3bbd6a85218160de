#pragma once

#include <cstdint>
#include <vector>

#include "sdtl/data.hpp"
#include "sdtl/trainer.hpp"

namespace sdtl {

// One (lambda, seed) cell of the ablation grid: final-epoch test accuracy,
// drift against the pretrained encoder, and final-epoch mean losses.
struct SweepRow {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double acc1 = 0.0;
  double acc5 = 0.0;
  double drift = 0.0;
  double mean_ce = 0.0;
  double mean_sd = 0.0;
  double mean_total = 0.0;
};

// Exactly one row per (lambda, seed) pair, sorted by lambda then seed.
struct SweepReport {
  std::vector<double> lambda_grid;
  std::vector<std::uint64_t> seeds;
  std::vector<SweepRow> rows;
};

// Runs the full ablation: one pretraining per seed (reused across every
// lambda, so the grid isolates lambda's effect) and one fine-tuning run per
// (lambda, seed) cell. The seed fields inside both configs are replaced by
// each entry of `seeds`; the lambda field of finetune_config by each grid
// value. The grid must be non-empty, duplicate-free and contain the
// lambda=0 baseline; both configs must run at least one epoch.
//
// Cells are independent: `jobs` > 1 fans them out over that many threads,
// each cell single-threaded, results assembled by cell index so the report
// is bit-identical regardless of job count.
SweepReport run_sweep(const TransferBenchmark& benchmark, const std::vector<double>& lambda_grid,
                      const std::vector<std::uint64_t>& seeds, const TrainConfig& finetune_config,
                      const TrainConfig& pretrain_config, std::size_t jobs = 1);

}  // namespace sdtl
