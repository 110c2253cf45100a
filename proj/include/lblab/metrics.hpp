#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lblab/errors.hpp"
#include "lblab/history.hpp"

namespace lblab {

namespace detail {

/// Compensated (Kahan) accumulator; keeps long averages well below the
/// tolerances the statistics are tested at.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

inline void check_same_ids(const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
  if (a.size() != b.size())
    throw AlignmentError("sample count mismatch: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i])
      throw AlignmentError("sample_id mismatch at index " + std::to_string(i) + ": '" +
                           a[i] + "' vs '" + b[i] + "'");
}

}  // namespace detail

/// Per-sample learnability: the mean, over runs and epochs, of the
/// probability the model assigned to the sample's true label. Always in [0,1].
struct LearnabilityVector {
  std::vector<std::string> sample_ids;
  std::vector<double> scores;
  std::string provenance;  // config echo or source path

  std::size_t size() const { return scores.size(); }

  void validate() const {
    if (scores.empty()) throw InvalidInputError("learnability vector: empty");
    if (sample_ids.size() != scores.size())
      throw InvalidInputError("learnability vector: " + std::to_string(sample_ids.size()) +
                              " ids for " + std::to_string(scores.size()) + " scores");
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (!(scores[i] >= 0.0 && scores[i] <= 1.0))
        throw InvalidInputError("learnability vector: score " + std::to_string(scores[i]) +
                                " outside [0,1] for sample '" + sample_ids[i] + "'");
    std::unordered_set<std::string> seen;
    seen.reserve(sample_ids.size());
    for (const auto& id : sample_ids)
      if (!seen.insert(id).second)
        throw InvalidInputError("learnability vector: duplicate sample id '" + id + "'");
  }
};

/// Per-sample rank; 1 = easiest. Ties share the rank of the last member of
/// the tied block, i.e. ranks[i] = |{ j : scores[j] >= scores[i] }|.
struct RankVector {
  std::vector<std::string> sample_ids;
  std::vector<int> ranks;

  std::size_t size() const { return ranks.size(); }
};

/// Mean of all runs-x-epochs cells for each sample.
inline LearnabilityVector compute_learnability(const PredictionHistory& history) {
  history.validate();
  const std::size_t cells = history.n_runs * history.n_epochs;
  LearnabilityVector lv;
  lv.sample_ids = history.sample_ids;
  lv.scores.resize(history.n_samples);
  for (std::size_t i = 0; i < history.n_samples; ++i) {
    detail::KahanSum sum;
    for (std::size_t r = 0; r < history.n_runs; ++r)
      for (std::size_t t = 0; t < history.n_epochs; ++t)
        sum.add(history.value(r, t, i));
    // Mathematically in [0,1]; clamp only shaves float dust off the mean.
    lv.scores[i] = std::clamp(sum.value() / static_cast<double>(cells), 0.0, 1.0);
  }
  return lv;
}

/// Count-at-or-above ranking. The unique maximum gets rank 1; every member of
/// a tie gets the count of samples scoring at least as high. O(N log N) via a
/// descending sort, but equal to the quadratic counting definition exactly.
inline std::vector<int> rank_of_scores(std::span<const double> scores) {
  if (scores.empty()) throw InvalidInputError("rank_of_scores: empty input");
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (std::isnan(scores[i]))
      throw InvalidInputError("rank_of_scores: NaN score at index " + std::to_string(i));

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  std::vector<int> ranks(n, 0);
  std::size_t block_start = 0;
  while (block_start < n) {
    std::size_t block_end = block_start;
    while (block_end + 1 < n && scores[order[block_end + 1]] == scores[order[block_start]])
      ++block_end;
    const int rank = static_cast<int>(block_end + 1);  // count scoring >= this block
    for (std::size_t k = block_start; k <= block_end; ++k) ranks[order[k]] = rank;
    block_start = block_end + 1;
  }
  return ranks;
}

inline RankVector compute_ranks(const LearnabilityVector& scores) {
  return RankVector{scores.sample_ids, rank_of_scores(scores.scores)};
}

/// Pearson product-moment correlation, two-pass centered form.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw InvalidInputError("pearson: length mismatch (" + std::to_string(x.size()) +
                            " vs " + std::to_string(y.size()) + ")");
  if (x.size() < 2) throw InvalidInputError("pearson: need at least 2 points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw InvalidInputError("pearson: non-finite value at index " + std::to_string(i));

  const auto n = static_cast<double>(x.size());
  detail::KahanSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;

  detail::KahanSum sxx, syy, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx.add(dx * dx);
    syy.add(dy * dy);
    sxy.add(dx * dy);
  }
  if (sxx.value() == 0.0)
    throw DegenerateInputError("pearson: first argument is constant (zero variance)");
  if (syy.value() == 0.0)
    throw DegenerateInputError("pearson: second argument is constant (zero variance)");
  return sxy.value() / std::sqrt(sxx.value() * syy.value());
}

/// Pearson correlation of the two rank vectors induced by the scores.
inline double rank_correlation(const LearnabilityVector& a, const LearnabilityVector& b) {
  detail::check_same_ids(a.sample_ids, b.sample_ids);
  const auto ra = rank_of_scores(a.scores);
  const auto rb = rank_of_scores(b.scores);
  std::vector<double> xa(ra.begin(), ra.end());
  std::vector<double> xb(rb.begin(), rb.end());
  return pearson(xa, xb);
}

enum class CorrelationMode { score, rank };

/// Symmetric correlation matrix with unit diagonal. mode=score correlates the
/// score vectors directly, mode=rank correlates the induced rank vectors.
inline std::vector<std::vector<double>> correlation_matrix(
    std::span<const LearnabilityVector> vectors, CorrelationMode mode) {
  if (vectors.size() < 2)
    throw InvalidInputError("correlation_matrix: need at least 2 vectors, got " +
                            std::to_string(vectors.size()));
  for (std::size_t i = 1; i < vectors.size(); ++i)
    detail::check_same_ids(vectors[0].sample_ids, vectors[i].sample_ids);

  const std::size_t m = vectors.size();
  std::vector<std::vector<double>> mat(m, std::vector<double>(m, 1.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double r = (mode == CorrelationMode::score)
                           ? pearson(vectors[i].scores, vectors[j].scores)
                           : rank_correlation(vectors[i], vectors[j]);
      mat[i][j] = r;
      mat[j][i] = r;
    }
  return mat;
}

/// Uniform-bin 2D histogram. Points landing exactly on the upper range edge
/// fall in the last bin; anything outside either range (or non-finite) is
/// counted in `overflow`, so counts + overflow always equals the input size.
struct Histogram2D {
  std::vector<double> x_edges;        // bins_x + 1, strictly increasing
  std::vector<double> y_edges;        // bins_y + 1, strictly increasing
  std::vector<std::int64_t> counts;   // bins_x * bins_y, row-major [ix][iy]
  std::int64_t overflow = 0;

  std::size_t bins_x() const { return x_edges.empty() ? 0 : x_edges.size() - 1; }
  std::size_t bins_y() const { return y_edges.empty() ? 0 : y_edges.size() - 1; }
  std::int64_t count(std::size_t ix, std::size_t iy) const {
    return counts[ix * bins_y() + iy];
  }
};

inline Histogram2D histogram2d(std::span<const double> x, std::span<const double> y,
                               std::size_t bins_x, std::size_t bins_y,
                               std::pair<double, double> range_x,
                               std::pair<double, double> range_y) {
  if (x.size() != y.size())
    throw InvalidInputError("histogram2d: length mismatch (" + std::to_string(x.size()) +
                            " vs " + std::to_string(y.size()) + ")");
  if (bins_x == 0 || bins_y == 0) throw InvalidInputError("histogram2d: zero bins");
  if (!(range_x.first < range_x.second) || !(range_y.first < range_y.second))
    throw InvalidInputError("histogram2d: range lo must be < hi");

  auto make_edges = [](std::size_t bins, double lo, double hi) {
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k)
      edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
    edges[bins] = hi;
    return edges;
  };
  auto bin_of = [](double v, double lo, double hi, std::size_t bins) -> std::int64_t {
    if (!(v >= lo && v <= hi)) return -1;  // outside (or NaN) -> overflow
    if (v == hi) return static_cast<std::int64_t>(bins - 1);
    const auto b = static_cast<std::int64_t>(
        std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
    return std::clamp<std::int64_t>(b, 0, static_cast<std::int64_t>(bins - 1));
  };

  Histogram2D h;
  h.x_edges = make_edges(bins_x, range_x.first, range_x.second);
  h.y_edges = make_edges(bins_y, range_y.first, range_y.second);
  h.counts.assign(bins_x * bins_y, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto ix = bin_of(x[i], range_x.first, range_x.second, bins_x);
    const auto iy = bin_of(y[i], range_y.first, range_y.second, bins_y);
    if (ix < 0 || iy < 0) {
      ++h.overflow;
    } else {
      ++h.counts[static_cast<std::size_t>(ix) * bins_y + static_cast<std::size_t>(iy)];
    }
  }
  return h;
}

}  // namespace lblab
