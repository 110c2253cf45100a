#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "lblab/errors.hpp"

namespace lblab {

/// The raw material of the learnability score: for every independently seeded
/// run r and every epoch t, the probability the model assigned to each
/// sample's true label right after that epoch's updates.
///
/// Storage is a dense (runs x epochs x samples) tensor; every cell must be a
/// probability in [0, 1]. Runs and epochs are 1-based in error messages and
/// in the on-disk format, 0-based in the accessors.
struct PredictionHistory {
  std::size_t n_samples = 0;
  std::size_t n_epochs = 0;
  std::size_t n_runs = 0;
  std::vector<std::string> sample_ids;  // n_samples, unique
  std::vector<double> values;           // n_runs * n_epochs * n_samples

  static PredictionHistory zeroed(std::size_t samples, std::size_t epochs,
                                  std::size_t runs, std::vector<std::string> ids) {
    PredictionHistory h;
    h.n_samples = samples;
    h.n_epochs = epochs;
    h.n_runs = runs;
    h.sample_ids = std::move(ids);
    h.values.assign(samples * epochs * runs, 0.0);
    return h;
  }

  std::size_t index(std::size_t run, std::size_t epoch, std::size_t sample) const {
    return (run * n_epochs + epoch) * n_samples + sample;
  }
  double value(std::size_t run, std::size_t epoch, std::size_t sample) const {
    return values[index(run, epoch, sample)];
  }
  double& value(std::size_t run, std::size_t epoch, std::size_t sample) {
    return values[index(run, epoch, sample)];
  }

  void validate() const {
    if (n_samples == 0 || n_epochs == 0 || n_runs == 0)
      throw InvalidInputError("prediction history: empty (samples=" +
                              std::to_string(n_samples) + ", epochs=" +
                              std::to_string(n_epochs) + ", runs=" +
                              std::to_string(n_runs) + ")");
    if (sample_ids.size() != n_samples)
      throw InvalidInputError("prediction history: " + std::to_string(sample_ids.size()) +
                              " ids for " + std::to_string(n_samples) + " samples");
    if (values.size() != n_samples * n_epochs * n_runs)
      throw InvalidInputError("prediction history: tensor has " +
                              std::to_string(values.size()) + " cells, expected " +
                              std::to_string(n_samples * n_epochs * n_runs));
    std::unordered_set<std::string> seen;
    seen.reserve(sample_ids.size());
    for (const auto& id : sample_ids) {
      if (!seen.insert(id).second)
        throw InvalidInputError("prediction history: duplicate sample id '" + id + "'");
    }
    for (std::size_t r = 0; r < n_runs; ++r)
      for (std::size_t t = 0; t < n_epochs; ++t)
        for (std::size_t i = 0; i < n_samples; ++i) {
          const double v = value(r, t, i);
          if (!(v >= 0.0 && v <= 1.0))  // also catches NaN
            throw InvalidInputError(
                "prediction history: value " + std::to_string(v) + " outside [0,1] at (run " +
                std::to_string(r + 1) + ", epoch " + std::to_string(t + 1) + ", sample '" +
                sample_ids[i] + "')");
        }
  }
};

}  // namespace lblab
