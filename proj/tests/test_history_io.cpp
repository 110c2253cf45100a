#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "lblab/history_io.hpp"
#include "lblab/io_util.hpp"
#include "lblab/metrics.hpp"
#include "lblab/scores_io.hpp"
#include "test_util.hpp"

using lblab::decode_token;
using lblab::encode_token;
using lblab::InvalidInputError;
using lblab::IoError;
using lblab::ParseError;
using lblab::PredictionHistory;
using lblab::read_history;
using lblab::read_scores;
using lblab::read_text_file;
using lblab::Rng;
using lblab::write_history;
using lblab::write_scores;
using lblab::write_text_atomic;

TEST_CASE("history files round-trip losslessly") {
  testutil::TempDir dir("tmp_hist_roundtrip");
  Rng rng(1);
  const auto h = testutil::random_history(rng, 9, 4, 3);
  const auto path = dir.path() / "run.lblog";
  write_history(path, h, "layers=2,3 optimizer=sgd");

  const auto file = read_history(path);
  CHECK(file.history.n_samples == 9);
  CHECK(file.history.n_epochs == 4);
  CHECK(file.history.n_runs == 3);
  CHECK(file.history.sample_ids == h.sample_ids);
  CHECK(file.history.values == h.values);  // bitwise, thanks to %.17g
  CHECK(file.config_echo == "layers=2,3 optimizer=sgd");

  // write -> read -> write reproduces the bytes.
  const auto path2 = dir.path() / "run2.lblog";
  write_history(path2, file.history, file.config_echo);
  CHECK(read_text_file(path) == read_text_file(path2));
}

TEST_CASE("awkward sample ids survive the header encoding") {
  testutil::TempDir dir("tmp_hist_ids");
  auto h = PredictionHistory::zeroed(3, 1, 1, {"plain", "has space", "100%sure\ttab"});
  h.value(0, 0, 0) = 0.25;
  h.value(0, 0, 1) = 0.5;
  h.value(0, 0, 2) = 0.75;
  const auto path = dir.path() / "ids.lblog";
  write_history(path, h, "test");
  CHECK(read_history(path).history.sample_ids == h.sample_ids);
}

TEST_CASE("token percent-encoding round-trips arbitrary bytes") {
  Rng rng(2);
  for (int c = 0; c < 500; ++c) {
    std::string s;
    const auto len = rng.below(24);
    for (std::size_t i = 0; i < len; ++i)
      s += static_cast<char>(rng.below(256));
    const std::string enc = encode_token(s);
    for (const char ch : enc) {
      CHECK(ch != ' ');
      CHECK(ch != '\n');
      CHECK(ch != '\t');
    }
    CHECK(decode_token(enc) == s);
  }
}

TEST_CASE("version mismatch is a parse error naming the version") {
  testutil::TempDir dir("tmp_hist_version");
  const auto path = dir.path() / "v2.lblog";
  write_text_atomic(path, "lblog/2\ndims 1 1 1\nids a\nconfig x\nrec 1 1 0.5\n");
  try {
    read_history(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("lblog/2") != std::string::npos);
  }
}

TEST_CASE("corrupt histories are parse errors") {
  testutil::TempDir dir("tmp_hist_corrupt");
  const auto path = dir.path() / "bad.lblog";

  // Missing file -> IO error.
  CHECK_THROWS_AS(read_history(dir.path() / "absent.lblog"), IoError);

  // Truncated record stream.
  write_text_atomic(path, "lblog/1\ndims 2 2 1\nids a b\nconfig x\nrec 1 1 0.5 0.5\n");
  CHECK_THROWS_AS(read_history(path), ParseError);

  // Wrong probability count in a record.
  write_text_atomic(path, "lblog/1\ndims 2 1 1\nids a b\nconfig x\nrec 1 1 0.5\n");
  CHECK_THROWS_AS(read_history(path), ParseError);

  // Out-of-range value.
  write_text_atomic(path, "lblog/1\ndims 2 1 1\nids a b\nconfig x\nrec 1 1 0.5 1.5\n");
  CHECK_THROWS_AS(read_history(path), ParseError);

  // Non-numeric value.
  write_text_atomic(path, "lblog/1\ndims 2 1 1\nids a b\nconfig x\nrec 1 1 0.5 zz\n");
  CHECK_THROWS_AS(read_history(path), ParseError);

  // Out-of-order records.
  write_text_atomic(path,
                    "lblog/1\ndims 1 2 1\nids a\nconfig x\nrec 1 2 0.5\nrec 1 1 0.5\n");
  CHECK_THROWS_AS(read_history(path), ParseError);

  // Duplicate ids.
  write_text_atomic(path, "lblog/1\ndims 2 1 1\nids a a\nconfig x\nrec 1 1 0.5 0.5\n");
  CHECK_THROWS_AS(read_history(path), ParseError);

  // Unknown record type.
  write_text_atomic(path, "lblog/1\ndims 1 1 1\nids a\nconfig x\nbogus line\n");
  CHECK_THROWS_AS(read_history(path), ParseError);
}

// ---------------------------------------------------------------------------
// scores/ranks CSV
// ---------------------------------------------------------------------------

TEST_CASE("scores files are sorted by rank and round-trip the doubles") {
  testutil::TempDir dir("tmp_scores_roundtrip");
  lblab::LearnabilityVector lv;
  lv.sample_ids = {"a", "b", "c", "d"};
  lv.scores = {0.1, 0.9, 0.5, 0.5};
  lv.provenance = "test";
  const auto rv = lblab::compute_ranks(lv);
  CHECK(rv.ranks == std::vector<int>{4, 1, 3, 3});

  const auto path = dir.path() / "scores.csv";
  write_scores(path, lv, rv);

  const auto file = read_scores(path);
  // File order is rank-ascending with input order breaking the tie.
  CHECK(file.scores.sample_ids == std::vector<std::string>{"b", "c", "d", "a"});
  CHECK(file.ranks == std::vector<int>{1, 3, 3, 4});
  CHECK(file.scores.scores == std::vector<double>{0.9, 0.5, 0.5, 0.1});

  // Ranks recomputed from the re-read scores agree with the stored column.
  CHECK(lblab::rank_of_scores(file.scores.scores) == file.ranks);
}

TEST_CASE("scores files with exotic doubles still round-trip exactly") {
  testutil::TempDir dir("tmp_scores_doubles");
  Rng rng(3);
  lblab::LearnabilityVector lv;
  for (int i = 0; i < 200; ++i) {
    lv.sample_ids.push_back("s" + std::to_string(i));
    lv.scores.push_back(rng.uniform01());
  }
  const auto rv = lblab::compute_ranks(lv);
  const auto path = dir.path() / "scores.csv";
  write_scores(path, lv, rv);
  const auto file = read_scores(path);

  // Align by id and compare bit for bit.
  for (std::size_t i = 0; i < file.scores.size(); ++i) {
    const auto& id = file.scores.sample_ids[i];
    const auto it = std::find(lv.sample_ids.begin(), lv.sample_ids.end(), id);
    REQUIRE(it != lv.sample_ids.end());
    const auto idx = static_cast<std::size_t>(it - lv.sample_ids.begin());
    CHECK(file.scores.scores[i] == lv.scores[idx]);
  }
}

TEST_CASE("malformed scores files are rejected") {
  testutil::TempDir dir("tmp_scores_bad");
  const auto path = dir.path() / "bad.csv";

  write_text_atomic(path, "sample,learn,rank\na,0.5,1\n");
  CHECK_THROWS_AS(read_scores(path), ParseError);

  write_text_atomic(path, "sample_id,learnability,rank\na,1.5,1\n");
  CHECK_THROWS_AS(read_scores(path), ParseError);

  write_text_atomic(path, "sample_id,learnability,rank\na,0.5,0\n");
  CHECK_THROWS_AS(read_scores(path), ParseError);

  write_text_atomic(path, "sample_id,learnability,rank\na,0.5,7\n");
  CHECK_THROWS_AS(read_scores(path), ParseError);

  write_text_atomic(path, "sample_id,learnability,rank\na,0.5,1\na,0.6,1\n");
  CHECK_THROWS_AS(read_scores(path), InvalidInputError);
}
