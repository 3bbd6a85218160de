// Command-line workbench for self-distillation guided transfer learning:
// benchmark generation, pretext pretraining, regularized fine-tuning and
// lambda-ablation sweeps, all file-based and bit-reproducible.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdtl/checkpoint.hpp"
#include "sdtl/csv.hpp"
#include "sdtl/data.hpp"
#include "sdtl/error.hpp"
#include "sdtl/sweep.hpp"
#include "sdtl/trainer.hpp"

namespace {

constexpr const char* kToolVersion = "sdtl 1.0.0";

// Defaults for the pretext pretraining stage, shared by `pretrain` and the
// pretraining phase of `sweep`. Twenty epochs solve the default pretext
// task comfortably without over-committing the features to it.
constexpr std::size_t kPretrainEpochsDefault = 20;
constexpr double kPretrainLrDefault = 0.05;

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Shortest decimal form that parses back to the same double ("0.05", not
// "0.050000000000000003"), so manifests are exact and stable.
std::string fmt_double(double v) { return nlohmann::json(v).dump(); }

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sdtl::IoError("cannot open for writing: " + path.string());
  return out;
}

void finish_writing(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw sdtl::IoError("failed while writing: " + path.string());
}

// Flat `key = value` document, one line per entry, written alongside every
// output so any artifact can be regenerated from its manifest alone.
void write_manifest(const std::filesystem::path& path, const KeyValues& entries) {
  std::ofstream out = open_for_writing(path);
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
  finish_writing(out, path);
}

void save_benchmark_spec(const std::filesystem::path& path, const sdtl::BenchmarkSpec& spec) {
  nlohmann::json doc;
  doc["input_dim"] = spec.input_dim;
  doc["num_classes"] = spec.num_classes;
  doc["clusters_per_class"] = spec.clusters_per_class;
  doc["pretrain_samples"] = spec.pretrain_samples;
  doc["train_samples"] = spec.train_samples;
  doc["test_samples"] = spec.test_samples;
  doc["probe_samples"] = spec.probe_samples;
  doc["cluster_stddev"] = spec.cluster_stddev;
  doc["num_pretext_transforms"] = spec.num_pretext_transforms;
  doc["seed"] = spec.seed;
  std::ofstream out = open_for_writing(path);
  out << doc.dump(2) << '\n';
  finish_writing(out, path);
}

std::size_t take_count(const nlohmann::json& doc, const std::string& name) {
  if (!doc.contains(name) || !doc.at(name).is_number_unsigned()) {
    throw sdtl::FormatError("benchmark spec: missing non-negative integer \"" + name + "\"");
  }
  return doc.at(name).get<std::size_t>();
}

double take_double(const nlohmann::json& doc, const std::string& name) {
  if (!doc.contains(name) || !doc.at(name).is_number()) {
    throw sdtl::FormatError("benchmark spec: missing number \"" + name + "\"");
  }
  return doc.at(name).get<double>();
}

// Reads DIR/spec.json back into a validated BenchmarkSpec. The benchmark
// itself is regenerated from the spec (deterministically), not parsed from
// the rounded CSV exports.
sdtl::BenchmarkSpec load_benchmark_spec(const std::filesystem::path& bench_dir) {
  const std::filesystem::path path = bench_dir / "spec.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sdtl::IoError("cannot open benchmark spec: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw sdtl::FormatError("benchmark spec: not valid JSON (" + std::string(e.what()) + ")");
  }
  if (!doc.is_object()) throw sdtl::FormatError("benchmark spec: top level is not an object");

  sdtl::BenchmarkSpec spec;
  spec.input_dim = take_count(doc, "input_dim");
  spec.num_classes = take_count(doc, "num_classes");
  spec.clusters_per_class = take_count(doc, "clusters_per_class");
  spec.pretrain_samples = take_count(doc, "pretrain_samples");
  spec.train_samples = take_count(doc, "train_samples");
  spec.test_samples = take_count(doc, "test_samples");
  spec.probe_samples = take_count(doc, "probe_samples");
  spec.cluster_stddev = take_double(doc, "cluster_stddev");
  spec.num_pretext_transforms = take_count(doc, "num_pretext_transforms");
  spec.seed = take_count(doc, "seed");
  try {
    spec.validate();
  } catch (const sdtl::ParameterError& e) {
    // A bad value in a file is corrupt input, not a usage mistake.
    throw sdtl::FormatError("benchmark spec: " + std::string(e.what()));
  }
  return spec;
}

std::vector<double> parse_lambda_grid(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw sdtl::ParameterError("sweep: cannot parse lambda value \"" + item + "\"");
    }
    if (used != item.size()) {
      throw sdtl::ParameterError("sweep: cannot parse lambda value \"" + item + "\"");
    }
    values.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
      value = std::stoull(item, &used);
    } catch (const std::exception&) {
      throw sdtl::ParameterError("sweep: cannot parse seed value \"" + item + "\"");
    }
    if (used != item.size()) {
      throw sdtl::ParameterError("sweep: cannot parse seed value \"" + item + "\"");
    }
    values.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) text += ',';
    text += fmt_double(values[i]);
  }
  return text;
}

std::string join_seeds(const std::vector<std::uint64_t>& values) {
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) text += ',';
    text += std::to_string(values[i]);
  }
  return text;
}

// Loads the pretrained encoder for fine-tuning and checks it against the
// benchmark's input width. A head stored in the checkpoint is ignored: the
// downstream task gets a fresh one.
sdtl::EncoderParams load_encoder_for(const std::string& model_path,
                                     const sdtl::BenchmarkSpec& spec) {
  sdtl::Checkpoint ckpt = sdtl::load_checkpoint(model_path);
  if (ckpt.encoder.input_dim() != spec.input_dim) {
    throw sdtl::ConsistencyError(
        "model expects input dim " + std::to_string(ckpt.encoder.input_dim()) +
        " but the benchmark provides " + std::to_string(spec.input_dim));
  }
  return std::move(ckpt.encoder);
}

struct GenArgs {
  std::string out_dir;
  sdtl::BenchmarkSpec spec;
};

int run_gen(const GenArgs& args) {
  args.spec.validate();
  const sdtl::TransferBenchmark bench = sdtl::make_transfer_benchmark(args.spec);

  const std::filesystem::path dir(args.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw sdtl::IoError("cannot create output directory: " + dir.string());

  save_benchmark_spec(dir / "spec.json", args.spec);
  {
    std::ofstream out = open_for_writing(dir / "pretext.csv");
    sdtl::write_labeled_csv(out, bench.pretext_set);
    finish_writing(out, dir / "pretext.csv");
  }
  {
    std::ofstream out = open_for_writing(dir / "train.csv");
    sdtl::write_labeled_csv(out, bench.downstream_train);
    finish_writing(out, dir / "train.csv");
  }
  {
    std::ofstream out = open_for_writing(dir / "test.csv");
    sdtl::write_labeled_csv(out, bench.downstream_test);
    finish_writing(out, dir / "test.csv");
  }
  {
    std::ofstream out = open_for_writing(dir / "probe.csv");
    sdtl::write_probe_csv(out, bench.probe_set);
    finish_writing(out, dir / "probe.csv");
  }

  write_manifest(dir / "manifest.txt",
                 {{"tool", kToolVersion},
                  {"subcommand", "gen"},
                  {"out", args.out_dir},
                  {"input_dim", std::to_string(args.spec.input_dim)},
                  {"num_classes", std::to_string(args.spec.num_classes)},
                  {"clusters_per_class", std::to_string(args.spec.clusters_per_class)},
                  {"pretrain_samples", std::to_string(args.spec.pretrain_samples)},
                  {"train_samples", std::to_string(args.spec.train_samples)},
                  {"test_samples", std::to_string(args.spec.test_samples)},
                  {"probe_samples", std::to_string(args.spec.probe_samples)},
                  {"cluster_stddev", fmt_double(args.spec.cluster_stddev)},
                  {"num_pretext_transforms", std::to_string(args.spec.num_pretext_transforms)},
                  {"seed", std::to_string(args.spec.seed)}});
  return 0;
}

struct PretrainArgs {
  std::string bench_dir;
  std::string out_path;
  sdtl::TrainConfig config{0.0, kPretrainLrDefault, kPretrainEpochsDefault, 64, 0};
};

int run_pretrain(const PretrainArgs& args) {
  args.config.validate();
  const sdtl::BenchmarkSpec spec = load_benchmark_spec(args.bench_dir);
  const sdtl::TransferBenchmark bench = sdtl::make_transfer_benchmark(spec);
  const sdtl::EncoderParams encoder = sdtl::pretrain(
      bench.pretext_set, sdtl::default_encoder_dims(spec.input_dim), args.config);
  sdtl::save_checkpoint(args.out_path, encoder);

  write_manifest(args.out_path + ".manifest",
                 {{"tool", kToolVersion},
                  {"subcommand", "pretrain"},
                  {"bench", args.bench_dir},
                  {"out", args.out_path},
                  {"epochs", std::to_string(args.config.epochs)},
                  {"lr", fmt_double(args.config.learning_rate)},
                  {"batch", std::to_string(args.config.batch_size)},
                  {"seed", std::to_string(args.config.seed)}});
  return 0;
}

struct FinetuneArgs {
  std::string bench_dir;
  std::string model_path;
  std::string out_csv;
  std::string out_ckpt;
  sdtl::TrainConfig config;  // library defaults: lambda 0, lr 0.05, 100 epochs
};

int run_finetune(const FinetuneArgs& args) {
  args.config.validate();
  const sdtl::BenchmarkSpec spec = load_benchmark_spec(args.bench_dir);
  const sdtl::TransferBenchmark bench = sdtl::make_transfer_benchmark(spec);
  const sdtl::EncoderParams pretrained = load_encoder_for(args.model_path, spec);

  const sdtl::FitResult result = sdtl::fit(pretrained, bench.downstream_train,
                                           bench.downstream_test, bench.probe_set, args.config);
  {
    std::ofstream out = open_for_writing(args.out_csv);
    sdtl::write_epoch_csv(out, result.reports);
    finish_writing(out, args.out_csv);
  }
  sdtl::save_checkpoint(args.out_ckpt, result.encoder, &result.head);

  const KeyValues manifest = {{"tool", kToolVersion},
                              {"subcommand", "finetune"},
                              {"bench", args.bench_dir},
                              {"model", args.model_path},
                              {"out_csv", args.out_csv},
                              {"out_ckpt", args.out_ckpt},
                              {"lambda", fmt_double(args.config.lambda)},
                              {"epochs", std::to_string(args.config.epochs)},
                              {"lr", fmt_double(args.config.learning_rate)},
                              {"batch", std::to_string(args.config.batch_size)},
                              {"seed", std::to_string(args.config.seed)}};
  write_manifest(args.out_csv + ".manifest", manifest);
  write_manifest(args.out_ckpt + ".manifest", manifest);
  return 0;
}

struct SweepArgs {
  std::string bench_dir;
  std::string out_csv;
  std::string lambdas = "0,0.1,1,10,100,1000";
  std::string seeds = "0,1,2";
  sdtl::TrainConfig finetune;  // lambda/seed replaced per cell
  std::size_t pretrain_epochs = kPretrainEpochsDefault;
  double pretrain_lr = kPretrainLrDefault;
  std::size_t jobs = 1;
};

int run_sweep(const SweepArgs& args) {
  const std::vector<double> grid = parse_lambda_grid(args.lambdas);
  const std::vector<std::uint64_t> seeds = parse_seed_list(args.seeds);
  const sdtl::BenchmarkSpec spec = load_benchmark_spec(args.bench_dir);
  const sdtl::TransferBenchmark bench = sdtl::make_transfer_benchmark(spec);

  sdtl::TrainConfig pretrain_cfg;
  pretrain_cfg.lambda = 0.0;
  pretrain_cfg.learning_rate = args.pretrain_lr;
  pretrain_cfg.epochs = args.pretrain_epochs;
  pretrain_cfg.batch_size = args.finetune.batch_size;

  const sdtl::SweepReport report =
      sdtl::run_sweep(bench, grid, seeds, args.finetune, pretrain_cfg, args.jobs);
  {
    std::ofstream out = open_for_writing(args.out_csv);
    sdtl::write_sweep_csv(out, report);
    finish_writing(out, args.out_csv);
  }

  write_manifest(args.out_csv + ".manifest",
                 {{"tool", kToolVersion},
                  {"subcommand", "sweep"},
                  {"bench", args.bench_dir},
                  {"out", args.out_csv},
                  {"lambdas", join_doubles(report.lambda_grid)},
                  {"seeds", join_seeds(report.seeds)},
                  {"epochs", std::to_string(args.finetune.epochs)},
                  {"lr", fmt_double(args.finetune.learning_rate)},
                  {"batch", std::to_string(args.finetune.batch_size)},
                  {"pretrain_epochs", std::to_string(args.pretrain_epochs)},
                  {"pretrain_lr", fmt_double(args.pretrain_lr)},
                  {"jobs", std::to_string(args.jobs)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-distillation guided transfer learning workbench"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate the synthetic transfer benchmark");
  gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
  gen->add_option("--seed", gen_args.spec.seed, "Benchmark seed");
  gen->add_option("--dim", gen_args.spec.input_dim, "Input dimension");
  gen->add_option("--classes", gen_args.spec.num_classes, "Number of downstream classes");
  gen->add_option("--clusters", gen_args.spec.clusters_per_class, "Gaussian clusters per class");
  gen->add_option("--pretrain", gen_args.spec.pretrain_samples, "Pretext split size");
  gen->add_option("--train", gen_args.spec.train_samples, "Downstream train split size");
  gen->add_option("--test", gen_args.spec.test_samples, "Downstream test split size");
  gen->add_option("--probe", gen_args.spec.probe_samples, "Probe split size");
  gen->add_option("--stddev", gen_args.spec.cluster_stddev, "Cluster standard deviation");
  gen->add_option("--transforms", gen_args.spec.num_pretext_transforms,
                  "Number of pretext transforms");

  PretrainArgs pre_args;
  CLI::App* pre = app.add_subcommand("pretrain", "Pretrain an encoder on the pretext task");
  pre->add_option("--bench", pre_args.bench_dir, "Benchmark directory (from gen)")->required();
  pre->add_option("--out", pre_args.out_path, "Output checkpoint path")->required();
  pre->add_option("--epochs", pre_args.config.epochs, "Pretraining epochs");
  pre->add_option("--lr", pre_args.config.learning_rate, "Learning rate");
  pre->add_option("--batch", pre_args.config.batch_size, "Batch size");
  pre->add_option("--seed", pre_args.config.seed, "Training seed");

  FinetuneArgs fin_args;
  CLI::App* fin = app.add_subcommand(
      "finetune", "Fine-tune a pretrained encoder with self-distillation regularization");
  fin->add_option("--bench", fin_args.bench_dir, "Benchmark directory (from gen)")->required();
  fin->add_option("--model", fin_args.model_path, "Pretrained encoder checkpoint")->required();
  fin->add_option("--out-csv", fin_args.out_csv, "Per-epoch metrics CSV path")->required();
  fin->add_option("--out-ckpt", fin_args.out_ckpt, "Final checkpoint path")->required();
  fin->add_option("--lambda", fin_args.config.lambda, "Self-distillation weight");
  fin->add_option("--epochs", fin_args.config.epochs, "Fine-tuning epochs");
  fin->add_option("--lr", fin_args.config.learning_rate, "Learning rate");
  fin->add_option("--batch", fin_args.config.batch_size, "Batch size");
  fin->add_option("--seed", fin_args.config.seed, "Training seed");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Run the lambda-ablation grid");
  sweep->add_option("--bench", sweep_args.bench_dir, "Benchmark directory (from gen)")->required();
  sweep->add_option("--out", sweep_args.out_csv, "Sweep results CSV path")->required();
  sweep->add_option("--lambdas", sweep_args.lambdas, "Comma-separated lambda grid");
  sweep->add_option("--seeds", sweep_args.seeds, "Comma-separated seed list");
  sweep->add_option("--epochs", sweep_args.finetune.epochs, "Fine-tuning epochs per cell");
  sweep->add_option("--lr", sweep_args.finetune.learning_rate, "Fine-tuning learning rate");
  sweep->add_option("--batch", sweep_args.finetune.batch_size, "Batch size");
  sweep->add_option("--pretrain-epochs", sweep_args.pretrain_epochs, "Pretraining epochs");
  sweep->add_option("--pretrain-lr", sweep_args.pretrain_lr, "Pretraining learning rate");
  sweep->add_option("--jobs", sweep_args.jobs, "Worker threads for independent cells");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (pre->parsed()) return run_pretrain(pre_args);
    if (fin->parsed()) return run_finetune(fin_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
  } catch (const sdtl::ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const sdtl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
