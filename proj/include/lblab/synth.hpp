#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lblab/dataset.hpp"
#include "lblab/errors.hpp"
#include "lblab/rng.hpp"

namespace lblab {

struct BlobParams {
  int classes = 2;
  int dim = 2;
  int per_class = 100;
  double spread = 0.1;           // per-dimension stddev around the class mean
  double label_noise = 0.0;      // fraction of samples given a wrong label
  std::uint64_t seed = 0;
};

/// Gaussian blob generator with ground-truth difficulty tags.
///
/// Class means sit on a scaled standard simplex (mean_c = e_c / sqrt(2)), so
/// every pair of means is exactly unit distance apart; this needs dim >=
/// classes. Points are drawn isotropic-normal around their class mean.
/// Tags:
///   boundary - the nearest foreign mean is closer than 1.5 * spread,
///   noisy    - the sample is one of round(label_noise * N) whose label was
///              replaced by a uniformly chosen wrong one (overrides boundary),
///   clean    - everything else.
/// Noisy samples are selected by a seeded shuffle, so the count is exact and
/// the whole dataset is a pure function of the parameters.
inline Dataset make_blobs(const BlobParams& p) {
  if (p.classes < 2) throw InvalidInputError("make_blobs: classes must be >= 2");
  if (p.per_class < 1) throw InvalidInputError("make_blobs: per_class must be >= 1");
  if (p.dim < p.classes)
    throw InvalidInputError("make_blobs: dim (" + std::to_string(p.dim) +
                            ") must be >= classes (" + std::to_string(p.classes) +
                            ") to place means on the simplex");
  if (!(p.spread > 0.0)) throw InvalidInputError("make_blobs: spread must be > 0");
  if (!(p.label_noise >= 0.0 && p.label_noise < 1.0))
    throw InvalidInputError("make_blobs: label_noise must be in [0, 1)");

  const std::size_t n_classes = static_cast<std::size_t>(p.classes);
  const std::size_t dim = static_cast<std::size_t>(p.dim);
  const std::size_t n = n_classes * static_cast<std::size_t>(p.per_class);
  const double mean_coord = 1.0 / std::sqrt(2.0);  // pairwise mean distance 1

  Dataset ds;
  ds.n_classes = p.classes;
  ds.features = Matrix(n, dim);
  ds.labels.resize(n);
  ds.sample_ids.resize(n);
  ds.difficulty_tags.assign(n, DifficultyTag::clean);

  Rng rng(p.seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i / static_cast<std::size_t>(p.per_class);
    auto row = ds.features.row(i);
    for (std::size_t d = 0; d < dim; ++d) {
      const double mean = (d == cls) ? mean_coord : 0.0;
      row[d] = rng.normal(mean, p.spread);
    }
    ds.labels[i] = static_cast<int>(cls) + 1;
    ds.sample_ids[i] = "blob-" + std::to_string(i);
  }

  // Boundary tags, judged against the true (pre-noise) label.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = static_cast<std::size_t>(ds.labels[i] - 1);
    auto row = ds.features.row(i);
    double nearest_foreign = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (c == cls) continue;
      double sq = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = row[d] - ((d == c) ? mean_coord : 0.0);
        sq += diff * diff;
      }
      nearest_foreign = std::min(nearest_foreign, std::sqrt(sq));
    }
    if (nearest_foreign < 1.5 * p.spread) ds.difficulty_tags[i] = DifficultyTag::boundary;
  }

  // Label noise: an exact, seed-deterministic subset.
  const auto n_noisy =
      static_cast<std::size_t>(std::llround(p.label_noise * static_cast<double>(n)));
  if (n_noisy > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    std::vector<std::size_t> chosen(order.begin(), order.begin() + n_noisy);
    std::sort(chosen.begin(), chosen.end());
    for (const std::size_t i : chosen) {
      const int true_label = ds.labels[i];
      const auto offset = 1 + static_cast<int>(rng.below(n_classes - 1));
      ds.labels[i] = ((true_label - 1 + offset) % p.classes) + 1;
      ds.difficulty_tags[i] = DifficultyTag::noisy;
    }
  }

  ds.validate();
  return ds;
}

/// Named datasets used by the demo command and the test suites.
///   easy     - two well-separated classes, no label noise
///   standard - four overlapping classes in 8 dims with 8% label noise
inline Dataset preset_dataset(const std::string& name) {
  if (name == "easy") {
    return make_blobs({.classes = 2, .dim = 2, .per_class = 100, .spread = 0.05,
                       .label_noise = 0.0, .seed = 1});
  }
  if (name == "standard") {
    return make_blobs({.classes = 4, .dim = 8, .per_class = 500, .spread = 0.6,
                       .label_noise = 0.08, .seed = 7});
  }
  throw InvalidInputError("unknown dataset preset '" + name +
                          "' (expected 'easy' or 'standard')");
}

}  // namespace lblab
