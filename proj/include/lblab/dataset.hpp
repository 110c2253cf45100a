#pragma once

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "lblab/errors.hpp"
#include "lblab/matrix.hpp"

namespace lblab {

/// Ground-truth difficulty tag attached to synthetic samples.
enum class DifficultyTag { clean, noisy, boundary };

inline const char* to_string(DifficultyTag t) {
  switch (t) {
    case DifficultyTag::clean: return "clean";
    case DifficultyTag::noisy: return "noisy";
    case DifficultyTag::boundary: return "boundary";
  }
  return "?";
}

/// A fixed classification dataset. Labels are 1-based in {1..n_classes}.
/// `difficulty_tags` is either empty or has one tag per sample.
struct Dataset {
  Matrix features;                        // n_samples x dim
  std::vector<int> labels;                // n_samples, values in {1..n_classes}
  std::vector<std::string> sample_ids;    // n_samples, unique
  std::vector<DifficultyTag> difficulty_tags;  // empty or n_samples
  int n_classes = 0;

  std::size_t n_samples() const { return features.rows; }
  std::size_t dim() const { return features.cols; }

  void validate() const {
    if (features.rows == 0) throw InvalidInputError("dataset is empty");
    if (labels.size() != features.rows)
      throw InvalidInputError("dataset: label count " + std::to_string(labels.size()) +
                              " != sample count " + std::to_string(features.rows));
    if (sample_ids.size() != features.rows)
      throw InvalidInputError("dataset: id count " + std::to_string(sample_ids.size()) +
                              " != sample count " + std::to_string(features.rows));
    if (!difficulty_tags.empty() && difficulty_tags.size() != features.rows)
      throw InvalidInputError("dataset: tag count " + std::to_string(difficulty_tags.size()) +
                              " != sample count " + std::to_string(features.rows));
    if (n_classes < 2) throw InvalidInputError("dataset: need at least 2 classes");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 1 || labels[i] > n_classes)
        throw InvalidInputError("dataset: label " + std::to_string(labels[i]) +
                                " of sample '" + sample_ids[i] + "' outside {1.." +
                                std::to_string(n_classes) + "}");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(sample_ids.size());
    for (const auto& id : sample_ids) {
      if (id.empty()) throw InvalidInputError("dataset: empty sample id");
      if (!seen.insert(id).second)
        throw InvalidInputError("dataset: duplicate sample id '" + id + "'");
    }
  }
};

}  // namespace lblab
