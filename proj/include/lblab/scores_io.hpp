#pragma once

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "lblab/csv.hpp"
#include "lblab/errors.hpp"
#include "lblab/io_util.hpp"
#include "lblab/metrics.hpp"

namespace lblab {

// Scores/ranks CSV: header "sample_id,learnability,rank", one row per sample,
// sorted by rank ascending (easiest first), ties in original sample order.
// Learnability is written with round-trip precision so re-reading the file
// recovers the exact doubles (and therefore the exact ties).

struct ScoresFile {
  LearnabilityVector scores;  // in file order
  std::vector<int> ranks;     // as stored in the file
};

inline std::string serialize_scores(const LearnabilityVector& scores,
                                    const RankVector& ranks) {
  scores.validate();
  if (ranks.size() != scores.size())
    throw InvalidInputError("scores file: rank count " + std::to_string(ranks.size()) +
                            " != score count " + std::to_string(scores.size()));
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks.ranks[a] < ranks.ranks[b];
  });
  std::string out = "sample_id,learnability,rank\n";
  for (const std::size_t i : order) {
    out += csv::quote_if_needed(scores.sample_ids[i]);
    out += ',' + fmt_double(scores.scores[i]);
    out += ',' + std::to_string(ranks.ranks[i]);
    out += '\n';
  }
  return out;
}

inline void write_scores(const std::filesystem::path& path,
                         const LearnabilityVector& scores, const RankVector& ranks) {
  write_text_atomic(path, serialize_scores(scores, ranks));
}

inline ScoresFile read_scores(const std::filesystem::path& path) {
  const std::string origin = path.string();
  const auto table = csv::parse(read_text_file(path), origin);
  if (table.header != std::vector<std::string>{"sample_id", "learnability", "rank"})
    throw ParseError(origin + ": expected header 'sample_id,learnability,rank'");
  if (table.rows.empty()) throw ParseError(origin + ": no data rows");

  ScoresFile f;
  f.scores.provenance = origin;
  f.scores.sample_ids.reserve(table.rows.size());
  f.scores.scores.reserve(table.rows.size());
  f.ranks.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.row_lines[r];
    const auto score = parse_double(row[1]);
    if (!score || !(*score >= 0.0 && *score <= 1.0))
      throw ParseError(origin + ": line " + std::to_string(line) +
                       ": learnability must be a real in [0,1], got '" + row[1] + "'");
    const auto rank = parse_int(row[2]);
    if (!rank || *rank < 1)
      throw ParseError(origin + ": line " + std::to_string(line) +
                       ": rank must be a positive integer, got '" + row[2] + "'");
    f.scores.sample_ids.push_back(row[0]);
    f.scores.scores.push_back(*score);
    f.ranks.push_back(static_cast<int>(*rank));
  }
  const auto n = static_cast<long long>(table.rows.size());
  for (std::size_t r = 0; r < f.ranks.size(); ++r)
    if (f.ranks[r] > n)
      throw ParseError(origin + ": rank " + std::to_string(f.ranks[r]) + " exceeds sample count " +
                       std::to_string(n));
  f.scores.validate();
  return f;
}

}  // namespace lblab
