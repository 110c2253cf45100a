// lblab: per-sample learnability experiments from the command line.
//
// Exit codes: 0 success, 2 usage/validation, 3 parse/IO,
// 4 alignment/degenerate statistics.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lblab/lblab.hpp"

namespace {

std::size_t threads_from_env() {
  const char* env = std::getenv("LBLAB_THREADS");
  if (!env || *env == '\0') return 0;  // auto
  const auto v = lblab::parse_int(env);
  if (!v || *v < 1)
    throw lblab::InvalidInputError("LBLAB_THREADS must be a positive integer, got '" +
                                   std::string(env) + "'");
  return static_cast<std::size_t>(*v);
}

void print_train_summary(const lblab::TrainResult& result) {
  std::printf("%-20s %8s %6s %5s %10s %10s  %s\n", "run", "samples", "epochs", "runs",
              "accuracy", "loss", "history");
  for (const auto& c : result.configs) {
    std::printf("%-20s %8zu %6zu %5zu %10.4f %10.4f  %s\n", c.name.c_str(), c.n_samples,
                c.epochs, c.runs, c.mean_final_accuracy, c.mean_final_loss,
                c.history_path.string().c_str());
  }
}

int dispatch(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const lblab::InvalidInputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const lblab::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const lblab::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const lblab::AlignmentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const lblab::DegenerateInputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"per-sample learnability measurement toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lblab::kVersion);

  // train
  std::string manifest_path;
  auto* train = app.add_subcommand(
      "train", "train every run in a manifest and write one history file per run");
  train->add_option("manifest", manifest_path, "experiment manifest (lbman/1)")->required();

  // analyze
  std::string history_path;
  auto* analyze = app.add_subcommand(
      "analyze", "compute learnability scores and ranks from a history file");
  analyze->add_option("history", history_path, "prediction history (lblog/1)")->required();

  // compare
  std::vector<std::string> scores_files;
  std::string mode_name = "both";
  std::size_t bins_score = 200;
  std::size_t bins_rank = 100;
  std::string compare_out = ".";
  auto* compare = app.add_subcommand(
      "compare", "correlate two or more scores files and export 2D histograms");
  compare->add_option("scores", scores_files, "scores/ranks CSV files")
      ->required()
      ->expected(2, -1);
  compare->add_option("--mode", mode_name, "score|rank|both (default both)")
      ->check(CLI::IsMember({"score", "rank", "both"}));
  compare->add_option("--hist-bins-score", bins_score, "bins per axis for score histograms");
  compare->add_option("--hist-bins-rank", bins_rank, "bins per axis for rank histograms");
  compare->add_option("--out", compare_out, "output directory (default .)");

  // demo-cross-optimizer
  std::string preset = "standard";
  std::size_t demo_epochs = 50;
  std::size_t demo_runs = 3;
  auto* demo = app.add_subcommand(
      "demo-cross-optimizer",
      "train one model under sgd/adam/rmsprop and correlate the learnability");
  demo->add_option("--preset", preset, "dataset preset: easy|standard");
  demo->add_option("--epochs", demo_epochs, "epochs per run (default 50)");
  demo->add_option("--runs", demo_runs, "independently seeded runs (default 3)");

  // synth
  lblab::BlobParams blob;
  long long synth_seed = 0;
  std::string synth_out = "blobs.csv";
  auto* synth = app.add_subcommand("synth", "generate a Gaussian-blob dataset as CSV");
  synth->add_option("--classes", blob.classes, "number of classes (default 2)");
  synth->add_option("--dim", blob.dim, "feature dimension (default 2)");
  synth->add_option("--per-class", blob.per_class, "samples per class (default 100)");
  synth->add_option("--spread", blob.spread, "per-dimension stddev (default 0.1)");
  synth->add_option("--label-noise", blob.label_noise, "wrong-label fraction (default 0)");
  synth->add_option("--seed", synth_seed, "generator seed (default 0)");
  synth->add_option("--out", synth_out, "output CSV path (default blobs.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (train->parsed()) {
    return dispatch([&] {
      const auto result = lblab::run_train(manifest_path, threads_from_env());
      print_train_summary(result);
    });
  }
  if (analyze->parsed()) {
    return dispatch([&] {
      const auto result = lblab::run_analyze(history_path);
      std::printf("wrote %s (%zu samples)\n", result.output_path.string().c_str(),
                  result.scores.size());
    });
  }
  if (compare->parsed()) {
    return dispatch([&] {
      const auto mode = mode_name == "score" ? lblab::CompareMode::score
                        : mode_name == "rank" ? lblab::CompareMode::rank
                                              : lblab::CompareMode::both;
      std::vector<std::filesystem::path> paths(scores_files.begin(), scores_files.end());
      const auto result =
          lblab::run_compare(paths, mode, bins_score, bins_rank, compare_out);
      std::fputs(lblab::format_correlation_report(result.labels, result.score_matrix,
                                                  result.rank_matrix)
                     .c_str(),
                 stdout);
      for (const auto& p : result.written)
        std::printf("wrote %s\n", p.string().c_str());
    });
  }
  if (demo->parsed()) {
    return dispatch([&] {
      const auto result = lblab::run_demo_cross_optimizer(preset, demo_epochs, demo_runs,
                                                          threads_from_env());
      std::fputs(lblab::format_correlation_report(result.labels, result.score_matrix,
                                                  result.rank_matrix)
                     .c_str(),
                 stdout);
    });
  }
  if (synth->parsed()) {
    return dispatch([&] {
      blob.seed = static_cast<std::uint64_t>(synth_seed);
      const auto ds = lblab::make_blobs(blob);
      lblab::write_dataset_csv(ds, synth_out);
      std::printf("wrote %s (%zu samples, %d classes, dim %zu)\n", synth_out.c_str(),
                  ds.n_samples(), ds.n_classes, ds.dim());
    });
  }
  return 2;
}
