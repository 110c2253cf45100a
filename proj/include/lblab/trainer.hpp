#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "lblab/dataset.hpp"
#include "lblab/history.hpp"
#include "lblab/io_util.hpp"
#include "lblab/model.hpp"
#include "lblab/optimizer.hpp"
#include "lblab/rng.hpp"

namespace lblab {

/// One experiment: a model trained `runs` times with seeds base_seed,
/// base_seed+1, ..., each for `epochs` epochs, logging the true-label
/// probability of every sample after every epoch.
struct RunConfig {
  ModelSpec model;
  OptimizerSpec optimizer;
  std::size_t epochs = 1;       // T
  std::size_t runs = 5;         // R
  std::size_t batch_size = 32;
  std::uint64_t base_seed = 0;
  bool shuffle_each_epoch = true;

  void validate() const {
    model.validate();
    optimizer.validate();
    if (epochs < 1) throw InvalidInputError("run config: epochs must be >= 1");
    if (runs < 1) throw InvalidInputError("run config: runs must be >= 1");
    if (batch_size < 1) throw InvalidInputError("run config: batch_size must be >= 1");
  }

  /// One-line key=value summary, stable across reruns (no timestamps).
  std::string echo() const {
    std::string s = "layers=";
    for (std::size_t i = 0; i < model.layer_sizes.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(model.layer_sizes[i]);
    }
    s += std::string(" activation=") + to_string(model.activation);
    s += std::string(" init=") + to_string(model.init_scheme);
    s += std::string(" optimizer=") + to_string(optimizer.kind);
    s += " learning_rate=" + fmt_double(optimizer.learning_rate);
    switch (optimizer.kind) {
      case OptimizerKind::sgd:
        s += " momentum=" + fmt_double(optimizer.momentum);
        break;
      case OptimizerKind::adam:
        s += " beta1=" + fmt_double(optimizer.beta1) +
             " beta2=" + fmt_double(optimizer.beta2) +
             " epsilon=" + fmt_double(optimizer.epsilon);
        break;
      case OptimizerKind::rmsprop:
        s += " rho=" + fmt_double(optimizer.rho) +
             " epsilon=" + fmt_double(optimizer.epsilon);
        break;
    }
    s += " epochs=" + std::to_string(epochs);
    s += " runs=" + std::to_string(runs);
    s += " batch_size=" + std::to_string(batch_size);
    s += " base_seed=" + std::to_string(base_seed);
    s += std::string(" shuffle=") + (shuffle_each_epoch ? "true" : "false");
    return s;
  }
};

struct TrainReport {
  PredictionHistory history;
  std::vector<double> final_train_accuracy;      // one per run
  std::vector<std::vector<double>> loss_curves;  // per run, one mean CE per epoch
};

/// Snapshot of a model against the full dataset in canonical sample order.
struct EpochRecord {
  std::vector<double> p_true;  // probability of each sample's true label
  double mean_loss = 0.0;      // mean cross-entropy
  double accuracy = 0.0;       // fraction with argmax == true label
};

/// Read-only recording pass. Never touches the model; shuffling during
/// optimization has no effect on the order recorded here.
inline EpochRecord record_epoch(const Mlp& model, const Dataset& ds) {
  const std::size_t n = ds.n_samples();
  constexpr std::size_t chunk = 256;
  EpochRecord rec;
  rec.p_true.resize(n);
  double loss_total = 0.0;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t rows = std::min(chunk, n - start);
    Matrix batch(rows, ds.dim());
    for (std::size_t b = 0; b < rows; ++b) {
      const auto src = ds.features.row(start + b);
      std::copy(src.begin(), src.end(), batch.row(b).begin());
    }
    const Matrix probs = model.forward(batch);
    for (std::size_t b = 0; b < rows; ++b) {
      const std::size_t i = start + b;
      const auto row = probs.row(b);
      const auto label_idx = static_cast<std::size_t>(ds.labels[i] - 1);
      rec.p_true[i] = row[label_idx];
      loss_total += -std::log(std::max(row[label_idx], 1e-300));
      const std::size_t argmax =
          static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
      if (argmax == label_idx) ++correct;
    }
  }
  rec.mean_loss = loss_total / static_cast<double>(n);
  rec.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return rec;
}

namespace detail {

inline void train_single_run(const Dataset& ds, const RunConfig& config, std::size_t run,
                             PredictionHistory& history, std::vector<double>& loss_curve,
                             double& final_accuracy) {
  const std::uint64_t seed = config.base_seed + run;
  Mlp model = init_model(config.model, seed);
  Rng shuffle_rng(derive_seed(seed, 1));
  OptimizerState state;

  const std::size_t n = ds.n_samples();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Matrix batch;
  std::vector<int> batch_labels;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle_each_epoch) shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t rows = std::min(config.batch_size, n - start);
      batch = Matrix(rows, ds.dim());
      batch_labels.resize(rows);
      for (std::size_t b = 0; b < rows; ++b) {
        const std::size_t i = order[start + b];
        const auto src = ds.features.row(i);
        std::copy(src.begin(), src.end(), batch.row(b).begin());
        batch_labels[b] = ds.labels[i];
      }
      const auto grads = model.backward(batch, batch_labels);
      optimizer_step(model.params(), grads, config.optimizer, state);
    }

    const EpochRecord rec = record_epoch(model, ds);
    for (std::size_t i = 0; i < n; ++i) history.value(run, epoch, i) = rec.p_true[i];
    loss_curve[epoch] = rec.mean_loss;
    if (epoch + 1 == config.epochs) final_accuracy = rec.accuracy;
  }
}

}  // namespace detail

/// Train `config.runs` independently seeded models and collect the per-epoch
/// probability log. Runs execute in parallel up to `max_threads` (0 = one per
/// hardware thread); each run's arithmetic is self-contained, so the report
/// does not depend on the thread count.
inline TrainReport train_and_record(const Dataset& ds, const RunConfig& config,
                                    std::size_t max_threads = 0) {
  ds.validate();
  config.validate();
  if (static_cast<std::size_t>(config.model.input_dim()) != ds.dim())
    throw InvalidInputError("train: model expects " +
                            std::to_string(config.model.input_dim()) +
                            " input features, dataset has " + std::to_string(ds.dim()));
  if (config.model.n_classes() != ds.n_classes)
    throw InvalidInputError("train: model has " + std::to_string(config.model.n_classes()) +
                            " outputs, dataset has " + std::to_string(ds.n_classes) +
                            " classes");

  TrainReport report;
  report.history = PredictionHistory::zeroed(ds.n_samples(), config.epochs, config.runs,
                                             ds.sample_ids);
  report.final_train_accuracy.assign(config.runs, 0.0);
  report.loss_curves.assign(config.runs, std::vector<double>(config.epochs, 0.0));

  std::size_t cap = max_threads;
  if (cap == 0) cap = std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
  const std::size_t n_threads = std::min<std::size_t>(cap, config.runs);

  if (n_threads <= 1) {
    for (std::size_t r = 0; r < config.runs; ++r)
      detail::train_single_run(ds, config, r, report.history, report.loss_curves[r],
                               report.final_train_accuracy[r]);
  } else {
    std::atomic<std::size_t> next_run{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      while (true) {
        const std::size_t r = next_run.fetch_add(1);
        if (r >= config.runs) return;
        try {
          detail::train_single_run(ds, config, r, report.history, report.loss_curves[r],
                                   report.final_train_accuracy[r]);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  report.history.validate();
  return report;
}

}  // namespace lblab
