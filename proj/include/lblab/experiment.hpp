#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "lblab/errors.hpp"
#include "lblab/history_io.hpp"
#include "lblab/io_util.hpp"
#include "lblab/manifest.hpp"
#include "lblab/metrics.hpp"
#include "lblab/scores_io.hpp"
#include "lblab/synth.hpp"
#include "lblab/trainer.hpp"

// Command cores behind the CLI verbs. Everything here is plain library code
// so the flows can be driven from tests without spawning processes.

namespace lblab {

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainedConfigSummary {
  std::string name;
  std::filesystem::path history_path;
  std::size_t n_samples = 0;
  std::size_t epochs = 0;
  std::size_t runs = 0;
  double mean_final_accuracy = 0.0;
  double mean_final_loss = 0.0;
};

struct TrainResult {
  std::vector<TrainedConfigSummary> configs;
};

/// Train every config in the manifest against the shared dataset and write
/// one history file per config into the manifest's output directory.
inline TrainResult run_train(const std::filesystem::path& manifest_path,
                             std::size_t max_threads = 0) {
  const ExperimentManifest manifest = parse_manifest(manifest_path);
  const Dataset dataset = manifest.dataset.load();
  const std::string dataset_desc = manifest.dataset.describe();

  TrainResult result;
  for (const auto& run : manifest.runs) {
    const TrainReport report = train_and_record(dataset, run.config, max_threads);
    const std::string echo =
        "name=" + run.name + ' ' + run.config.echo() + " dataset=" + dataset_desc;
    const auto path = manifest.output_dir / (run.name + ".lblog");
    write_history(path, report.history, echo);

    TrainedConfigSummary s;
    s.name = run.name;
    s.history_path = path;
    s.n_samples = dataset.n_samples();
    s.epochs = run.config.epochs;
    s.runs = run.config.runs;
    const auto n_runs = static_cast<double>(run.config.runs);
    for (std::size_t r = 0; r < run.config.runs; ++r) {
      s.mean_final_accuracy += report.final_train_accuracy[r] / n_runs;
      s.mean_final_loss += report.loss_curves[r].back() / n_runs;
    }
    result.configs.push_back(std::move(s));
  }
  return result;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeResult {
  std::filesystem::path output_path;
  LearnabilityVector scores;
  RankVector ranks;
};

inline std::filesystem::path scores_path_for(const std::filesystem::path& history_path) {
  std::filesystem::path p = history_path;
  if (p.extension() == ".lblog") p.replace_extension();
  p += ".scores.csv";
  return p;
}

/// History file -> scores/ranks CSV next to it (<name>.scores.csv).
inline AnalyzeResult run_analyze(const std::filesystem::path& history_path) {
  const HistoryFile file = read_history(history_path);
  AnalyzeResult result;
  result.scores = compute_learnability(file.history);
  result.scores.provenance = file.config_echo;
  result.ranks = compute_ranks(result.scores);
  result.output_path = scores_path_for(history_path);
  write_scores(result.output_path, result.scores, result.ranks);
  return result;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

enum class CompareMode { score, rank, both };

struct CompareResult {
  std::vector<std::string> labels;
  std::size_t n_samples = 0;
  std::vector<std::vector<double>> score_matrix;  // empty unless mode covers scores
  std::vector<std::vector<double>> rank_matrix;   // empty unless mode covers ranks
  std::vector<std::filesystem::path> written;
};

namespace detail {

inline std::string label_for_scores_file(const std::filesystem::path& path) {
  std::string stem = path.stem().string();  // drops ".csv"
  const std::string suffix = ".scores";
  if (stem.size() > suffix.size() && stem.ends_with(suffix))
    stem.resize(stem.size() - suffix.size());
  std::string out;
  for (const char c : stem) out += valid_name_token(std::string_view(&c, 1)) ? c : '_';
  return out.empty() ? "scores" : out;
}

/// Reorder `v` to the id order of `reference`; every id must match 1:1.
inline LearnabilityVector align_to(const LearnabilityVector& reference,
                                   const LearnabilityVector& v) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) index.emplace(v.sample_ids[i], i);
  if (reference.size() != v.size())
    throw AlignmentError("'" + v.provenance + "' has " + std::to_string(v.size()) +
                         " samples, expected " + std::to_string(reference.size()) +
                         " (from '" + reference.provenance + "')");
  LearnabilityVector out;
  out.provenance = v.provenance;
  out.sample_ids = reference.sample_ids;
  out.scores.resize(v.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const auto it = index.find(reference.sample_ids[i]);
    if (it == index.end())
      throw AlignmentError("sample_id '" + reference.sample_ids[i] + "' (from '" +
                           reference.provenance + "') missing in '" + v.provenance + "'");
    out.scores[i] = v.scores[it->second];
  }
  return out;
}

inline std::string histogram_csv(const Histogram2D& h) {
  std::string out = "x_bin_lo,x_bin_hi,y_bin_lo,y_bin_hi,count\n";
  for (std::size_t ix = 0; ix < h.bins_x(); ++ix)
    for (std::size_t iy = 0; iy < h.bins_y(); ++iy) {
      out += fmt_double(h.x_edges[ix]) + ',' + fmt_double(h.x_edges[ix + 1]) + ',' +
             fmt_double(h.y_edges[iy]) + ',' + fmt_double(h.y_edges[iy + 1]) + ',' +
             std::to_string(h.count(ix, iy)) + '\n';
    }
  return out;
}

inline std::string matrix_csv(const std::vector<std::string>& labels,
                              const std::vector<std::vector<double>>& m) {
  std::string out = "label";
  for (const auto& l : labels) out += ',' + csv::quote_if_needed(l);
  out += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += csv::quote_if_needed(labels[i]);
    for (std::size_t j = 0; j < m.size(); ++j) out += ',' + fmt_double(m[i][j]);
    out += '\n';
  }
  return out;
}

}  // namespace detail

/// Correlate >= 2 scores files (score mode, rank mode, or both), writing the
/// correlation matrices and one 2D histogram per file pair into `out_dir`.
/// Scores are binned over [0,1]^2, ranks over [1,N]^2.
inline CompareResult run_compare(const std::vector<std::filesystem::path>& files,
                                 CompareMode mode, std::size_t bins_score,
                                 std::size_t bins_rank,
                                 const std::filesystem::path& out_dir) {
  if (files.size() < 2)
    throw InvalidInputError("compare: need at least 2 scores files, got " +
                            std::to_string(files.size()));

  std::vector<LearnabilityVector> vectors;
  CompareResult result;
  for (const auto& path : files) {
    ScoresFile f = read_scores(path);
    result.labels.push_back(detail::label_for_scores_file(path));
    vectors.push_back(std::move(f.scores));
  }
  for (std::size_t i = 1; i < vectors.size(); ++i)
    vectors[i] = detail::align_to(vectors[0], vectors[i]);
  result.n_samples = vectors[0].size();

  const bool do_score = mode != CompareMode::rank;
  const bool do_rank = mode != CompareMode::score;
  if (do_score) result.score_matrix = correlation_matrix(vectors, CorrelationMode::score);
  if (do_rank) result.rank_matrix = correlation_matrix(vectors, CorrelationMode::rank);

  auto emit = [&](const std::filesystem::path& name, const std::string& content) {
    const auto path = out_dir / name;
    write_text_atomic(path, content);
    result.written.push_back(path);
  };

  if (do_score)
    emit("correlations_score.csv", detail::matrix_csv(result.labels, result.score_matrix));
  if (do_rank)
    emit("correlations_rank.csv", detail::matrix_csv(result.labels, result.rank_matrix));

  std::vector<std::vector<double>> rank_reals;
  if (do_rank) {
    rank_reals.reserve(vectors.size());
    for (const auto& v : vectors) {
      const auto ranks = rank_of_scores(v.scores);
      rank_reals.emplace_back(ranks.begin(), ranks.end());
    }
  }
  const auto n_real = static_cast<double>(result.n_samples);
  for (std::size_t i = 0; i < vectors.size(); ++i)
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      const std::string pair = result.labels[i] + "__" + result.labels[j];
      if (do_score) {
        const auto h = histogram2d(vectors[i].scores, vectors[j].scores, bins_score,
                                   bins_score, {0.0, 1.0}, {0.0, 1.0});
        emit("hist_score_" + pair + ".csv", detail::histogram_csv(h));
      }
      if (do_rank && result.n_samples >= 2) {
        const auto h = histogram2d(rank_reals[i], rank_reals[j], bins_rank, bins_rank,
                                   {1.0, n_real}, {1.0, n_real});
        emit("hist_rank_" + pair + ".csv", detail::histogram_csv(h));
      }
    }
  return result;
}

// ---------------------------------------------------------------------------
// demo-cross-optimizer
// ---------------------------------------------------------------------------

struct DemoResult {
  std::vector<std::string> labels;  // sgd, adam, rmsprop
  std::vector<std::vector<double>> score_matrix;
  std::vector<std::vector<double>> rank_matrix;
};

/// Train one architecture under SGD, Adam, and RMSprop (their conventional
/// default rates) on a preset dataset and correlate the resulting scores.
inline DemoResult run_demo_cross_optimizer(const std::string& preset, std::size_t epochs,
                                           std::size_t runs, std::size_t max_threads = 0) {
  const Dataset dataset = preset_dataset(preset);
  ModelSpec model;
  model.layer_sizes = {static_cast<int>(dataset.dim()), 16, dataset.n_classes};

  DemoResult result;
  std::vector<LearnabilityVector> vectors;
  for (const OptimizerKind kind :
       {OptimizerKind::sgd, OptimizerKind::adam, OptimizerKind::rmsprop}) {
    RunConfig config;
    config.model = model;
    config.optimizer = OptimizerSpec::defaults(kind);
    config.epochs = epochs;
    config.runs = runs;
    config.batch_size = 32;
    config.base_seed = 7;
    const TrainReport report = train_and_record(dataset, config, max_threads);
    LearnabilityVector lv = compute_learnability(report.history);
    lv.provenance = config.echo();
    vectors.push_back(std::move(lv));
    result.labels.emplace_back(to_string(kind));
  }
  result.score_matrix = correlation_matrix(vectors, CorrelationMode::score);
  result.rank_matrix = correlation_matrix(vectors, CorrelationMode::rank);
  return result;
}

// ---------------------------------------------------------------------------
// report formatting
// ---------------------------------------------------------------------------

/// Correlation table with the rank coefficient parenthesized after the score
/// coefficient. Either matrix may be empty (mode-filtered).
inline std::string format_correlation_report(
    const std::vector<std::string>& labels,
    const std::vector<std::vector<double>>& score_matrix,
    const std::vector<std::vector<double>>& rank_matrix) {
  const std::size_t m = labels.size();
  auto cell = [&](std::size_t i, std::size_t j) {
    char buf[48];
    if (!score_matrix.empty() && !rank_matrix.empty())
      std::snprintf(buf, sizeof(buf), "%.4f (%.4f)", score_matrix[i][j], rank_matrix[i][j]);
    else if (!score_matrix.empty())
      std::snprintf(buf, sizeof(buf), "%.4f", score_matrix[i][j]);
    else
      std::snprintf(buf, sizeof(buf), "(%.4f)", rank_matrix[i][j]);
    return std::string(buf);
  };

  std::size_t width = 0;
  for (const auto& l : labels) width = std::max(width, l.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) width = std::max(width, cell(i, j).size());
  width += 2;

  auto pad = [&](const std::string& s) {
    std::string out = s;
    out.resize(std::max(width, s.size()), ' ');
    return out;
  };

  std::string out;
  if (!score_matrix.empty() && !rank_matrix.empty())
    out += "correlation: score (rank)\n";
  else if (!score_matrix.empty())
    out += "correlation: score\n";
  else
    out += "correlation: (rank)\n";
  out += pad("");
  for (const auto& l : labels) out += pad(l);
  out += '\n';
  for (std::size_t i = 0; i < m; ++i) {
    out += pad(labels[i]);
    for (std::size_t j = 0; j < m; ++j) out += pad(cell(i, j));
    out += '\n';
  }
  return out;
}

}  // namespace lblab
