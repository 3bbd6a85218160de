#include "sdtl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <utility>

#include "sdtl/error.hpp"

namespace sdtl {

namespace {

// Runs `count` independent tasks on up to `jobs` threads. Task i writes only
// slot i of its output, so the result is identical for any job count. The
// first exception (by task index) is rethrown on the caller's thread.
template <typename Fn>
void run_indexed(std::size_t count, std::size_t jobs, Fn&& task) {
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

SweepReport run_sweep(const TransferBenchmark& benchmark, const std::vector<double>& lambda_grid,
                      const std::vector<std::uint64_t>& seeds, const TrainConfig& finetune_config,
                      const TrainConfig& pretrain_config, std::size_t jobs) {
  if (lambda_grid.empty()) throw ParameterError("sweep: lambda grid must not be empty");
  if (seeds.empty()) throw ParameterError("sweep: seed list must not be empty");
  if (jobs == 0) throw ParameterError("sweep: jobs must be >= 1");
  if (finetune_config.epochs == 0 || pretrain_config.epochs == 0) {
    throw ParameterError("sweep: both training stages need at least one epoch");
  }

  SweepReport report;
  report.lambda_grid = lambda_grid;
  std::sort(report.lambda_grid.begin(), report.lambda_grid.end());
  if (std::adjacent_find(report.lambda_grid.begin(), report.lambda_grid.end()) !=
      report.lambda_grid.end()) {
    throw ParameterError("sweep: lambda grid contains duplicates");
  }
  if (report.lambda_grid.front() != 0.0) {
    throw ParameterError("sweep: lambda grid must include the 0 baseline");
  }
  report.seeds = seeds;
  std::sort(report.seeds.begin(), report.seeds.end());
  if (std::adjacent_find(report.seeds.begin(), report.seeds.end()) != report.seeds.end()) {
    throw ParameterError("sweep: seed list contains duplicates");
  }

  // Validate both configs up front (lambda/seed are overwritten per cell).
  TrainConfig probe_cfg = finetune_config;
  probe_cfg.lambda = 0.0;
  probe_cfg.validate();
  probe_cfg = pretrain_config;
  probe_cfg.lambda = 0.0;
  probe_cfg.validate();

  const std::vector<std::size_t> encoder_dims =
      default_encoder_dims(benchmark.spec.input_dim);

  // Phase 1: one pretrained encoder per seed, shared by every lambda.
  std::vector<EncoderParams> pretrained(report.seeds.size());
  run_indexed(report.seeds.size(), jobs, [&](std::size_t i) {
    TrainConfig cfg = pretrain_config;
    cfg.lambda = 0.0;
    cfg.seed = report.seeds[i];
    pretrained[i] = pretrain(benchmark.pretext_set, encoder_dims, cfg);
  });

  // Phase 2: one fine-tuning run per (lambda, seed) cell, row index fixed by
  // the sorted grid so assembly order never depends on scheduling.
  const std::size_t cells = report.lambda_grid.size() * report.seeds.size();
  report.rows.resize(cells);
  run_indexed(cells, jobs, [&](std::size_t i) {
    const std::size_t li = i / report.seeds.size();
    const std::size_t si = i % report.seeds.size();
    TrainConfig cfg = finetune_config;
    cfg.lambda = report.lambda_grid[li];
    cfg.seed = report.seeds[si];
    const FitResult fit_result = fit(pretrained[si], benchmark.downstream_train,
                                     benchmark.downstream_test, benchmark.probe_set, cfg);
    const EpochReport& last = fit_result.reports.back();
    SweepRow row;
    row.lambda = cfg.lambda;
    row.seed = cfg.seed;
    row.acc1 = last.test_acc1;
    row.acc5 = last.test_acc5;
    row.drift = last.drift;
    row.mean_ce = last.mean_ce;
    row.mean_sd = last.mean_sd;
    row.mean_total = last.mean_total;
    report.rows[i] = row;
  });
  return report;
}

}  // namespace sdtl
