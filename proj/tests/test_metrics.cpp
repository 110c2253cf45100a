#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lblab/metrics.hpp"
#include "test_util.hpp"

using lblab::AlignmentError;
using lblab::compute_learnability;
using lblab::compute_ranks;
using lblab::CorrelationMode;
using lblab::correlation_matrix;
using lblab::DegenerateInputError;
using lblab::InvalidInputError;
using lblab::LearnabilityVector;
using lblab::pearson;
using lblab::PredictionHistory;
using lblab::rank_correlation;
using lblab::rank_of_scores;
using lblab::Rng;

namespace {

LearnabilityVector make_lv(std::vector<double> scores, std::string tag = "test") {
  LearnabilityVector lv;
  for (std::size_t i = 0; i < scores.size(); ++i)
    lv.sample_ids.push_back("s" + std::to_string(i));
  lv.scores = std::move(scores);
  lv.provenance = std::move(tag);
  return lv;
}

}  // namespace

// ---------------------------------------------------------------------------
// compute_learnability
// ---------------------------------------------------------------------------

TEST_CASE("learnability of a single sample is the plain mean") {
  auto h = PredictionHistory::zeroed(1, 4, 1, {"only"});
  const double vals[] = {0.2, 0.4, 0.6, 0.8};
  for (std::size_t t = 0; t < 4; ++t) h.value(0, t, 0) = vals[t];
  const auto lv = compute_learnability(h);
  CHECK(lv.scores.size() == 1);
  CHECK(lv.scores[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lv.sample_ids[0] == "only");
}

TEST_CASE("all-ones history gives score exactly 1") {
  Rng rng(11);
  auto h = testutil::random_history(rng, 7, 3, 2);
  for (auto& v : h.values) v = 1.0;
  const auto lv = compute_learnability(h);
  for (const double s : lv.scores) CHECK(s == 1.0);
}

TEST_CASE("two-sample hand-summed case") {
  auto h = PredictionHistory::zeroed(2, 2, 2, {"a", "b"});
  // sample a cells {0.1, 0.3, 0.5, 0.7}, sample b cells {1, 1, 0, 0}
  h.value(0, 0, 0) = 0.1;
  h.value(0, 1, 0) = 0.3;
  h.value(1, 0, 0) = 0.5;
  h.value(1, 1, 0) = 0.7;
  h.value(0, 0, 1) = 1.0;
  h.value(0, 1, 1) = 1.0;
  h.value(1, 0, 1) = 0.0;
  h.value(1, 1, 1) = 0.0;

  const auto oracle = testutil::naive_learnability(h);
  CHECK(oracle[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(oracle[1] == doctest::Approx(0.5).epsilon(1e-12));

  const auto lv = compute_learnability(h);
  CHECK(lv.scores[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(lv.scores[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("learnability rejects empty and out-of-range histories") {
  PredictionHistory empty;
  CHECK_THROWS_AS(compute_learnability(empty), InvalidInputError);

  auto h = PredictionHistory::zeroed(2, 2, 1, {"a", "b"});
  h.value(0, 1, 1) = 1.5;
  try {
    compute_learnability(h);
    FAIL("expected InvalidInputError");
  } catch (const InvalidInputError& e) {
    const std::string msg = e.what();
    // Offending cell named with 1-based run/epoch and the sample id.
    CHECK(msg.find("run 1") != std::string::npos);
    CHECK(msg.find("epoch 2") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
}

TEST_CASE("learnability matches explicit summation and stays in [0,1]") {
  Rng rng(20);
  for (int c = 0; c < 1000; ++c) {
    const auto n = 1 + rng.below(12);
    const auto t = 1 + rng.below(6);
    const auto r = 1 + rng.below(4);
    const auto h = testutil::random_history(rng, n, t, r);
    const auto lv = compute_learnability(h);
    const auto oracle = testutil::naive_learnability(h);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(lv.scores[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
      CHECK(lv.scores[i] >= 0.0);
      CHECK(lv.scores[i] <= 1.0);
    }
  }
}

TEST_CASE("learnability over R runs is the mean of single-run vectors") {
  Rng rng(21);
  for (int c = 0; c < 1000; ++c) {
    const auto n = 1 + rng.below(10);
    const auto t = 1 + rng.below(5);
    const auto r = 2 + rng.below(4);
    const auto h = testutil::random_history(rng, n, t, r);
    const auto full = compute_learnability(h);

    std::vector<double> mean(n, 0.0);
    for (std::size_t run = 0; run < r; ++run) {
      auto single = PredictionHistory::zeroed(n, t, 1, h.sample_ids);
      for (std::size_t e = 0; e < t; ++e)
        for (std::size_t i = 0; i < n; ++i) single.value(0, e, i) = h.value(run, e, i);
      const auto lv = compute_learnability(single);
      for (std::size_t i = 0; i < n; ++i) mean[i] += lv.scores[i] / static_cast<double>(r);
    }
    for (std::size_t i = 0; i < n; ++i)
      CHECK(full.scores[i] == doctest::Approx(mean[i]).epsilon(1e-12));
  }
}

// ---------------------------------------------------------------------------
// rank_of_scores / compute_ranks
// ---------------------------------------------------------------------------

TEST_CASE("rank examples: ties share the at-or-above count") {
  const std::vector<double> s{0.9, 0.5, 0.5, 0.1};
  CHECK(testutil::naive_ranks(s) == std::vector<int>{1, 3, 3, 4});
  CHECK(rank_of_scores(s) == std::vector<int>{1, 3, 3, 4});

  CHECK(rank_of_scores(std::vector<double>{0.7}) == std::vector<int>{1});

  const std::vector<double> equal(5, 0.3);
  CHECK(rank_of_scores(equal) == std::vector<int>{5, 5, 5, 5, 5});
}

TEST_CASE("rank errors: empty input and NaN scores") {
  CHECK_THROWS_AS(rank_of_scores(std::vector<double>{}), InvalidInputError);
  const std::vector<double> with_nan{0.2, std::nan(""), 0.4};
  CHECK_THROWS_AS(rank_of_scores(with_nan), InvalidInputError);
}

TEST_CASE("ranks equal the quadratic counting definition exactly") {
  Rng rng(30);
  for (int c = 0; c < 1000; ++c) {
    const auto n = 1 + rng.below(300);
    const bool ties = rng.below(2) == 0;
    const auto s = testutil::random_scores(rng, n, ties);
    CHECK(rank_of_scores(s) == testutil::naive_ranks(s));
  }
}

TEST_CASE("rank monotonicity and tie equality") {
  Rng rng(31);
  for (int c = 0; c < 1000; ++c) {
    const auto n = 2 + rng.below(60);
    const auto s = testutil::random_scores(rng, n, true);
    const auto ranks = rank_of_scores(s);
    CHECK(*std::min_element(ranks.begin(), ranks.end()) >= 1);
    CHECK(*std::max_element(ranks.begin(), ranks.end()) <= static_cast<int>(n));
    // Maximal-score samples get the size of the top tie block (1 when unique).
    const double smax = *std::max_element(s.begin(), s.end());
    const auto top_block = std::count(s.begin(), s.end(), smax);
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i] == smax) CHECK(ranks[i] == top_block);
      for (std::size_t j = 0; j < n; ++j) {
        if (s[i] > s[j]) CHECK(ranks[i] < ranks[j]);
        if (s[i] == s[j]) CHECK(ranks[i] == ranks[j]);
      }
    }
  }
}

TEST_CASE("ranks are invariant under strictly increasing transforms") {
  Rng rng(32);
  for (int c = 0; c < 1000; ++c) {
    const auto n = 1 + rng.below(40);
    const auto s = testutil::random_scores(rng, n, true);
    const auto base = rank_of_scores(s);

    std::vector<double> exps(n), affine(n);
    const double a = 0.5 + rng.uniform01() * 3.0;
    const double b = rng.uniform01() * 10.0 - 5.0;
    for (std::size_t i = 0; i < n; ++i) {
      exps[i] = std::exp(s[i]);
      affine[i] = a * s[i] + b;
    }
    CHECK(rank_of_scores(exps) == base);
    CHECK(rank_of_scores(affine) == base);
  }
}

// ---------------------------------------------------------------------------
// pearson
// ---------------------------------------------------------------------------

TEST_CASE("pearson on exact linear relations") {
  const std::vector<double> x{1, 2, 3};
  CHECK(pearson(x, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(x, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson hand-evaluated case") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1, 3, 2, 4};
  // means 2.5/2.5, cross sum 4, both squared sums 5 -> 4/5
  CHECK(testutil::naive_pearson(x, y) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(pearson(x, y) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("pearson input validation") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), InvalidInputError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  InvalidInputError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{2, 2, 2}), DegenerateInputError);
  CHECK_THROWS_AS(pearson(std::vector<double>{5, 5, 5}, x), DegenerateInputError);
}

TEST_CASE("pearson bounds, self-correlation, and affine invariance") {
  Rng rng(40);
  for (int c = 0; c < 1000; ++c) {
    const auto n = 2 + rng.below(50);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform01() * 20.0 - 10.0;
      y[i] = rng.uniform01() * 20.0 - 10.0;
    }
    // Degenerate draws (constant vectors) are skipped; they throw by contract.
    const bool x_const = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const bool y_const = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (x_const || y_const) continue;

    const double r = pearson(x, y);
    CHECK(std::abs(r) <= 1.0 + 1e-12);
    CHECK(pearson(x, y) == pearson(y, x));
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    const double a = 0.1 + rng.uniform01() * 5.0;
    const double b = rng.uniform01() * 100.0 - 50.0;
    std::vector<double> y2(n);
    for (std::size_t i = 0; i < n; ++i) y2[i] = a * y[i] + b;
    CHECK(pearson(x, y2) == doctest::Approx(r).epsilon(1e-9));
  }
}

// ---------------------------------------------------------------------------
// rank_correlation
// ---------------------------------------------------------------------------

TEST_CASE("rank correlation of identical and reversed score vectors") {
  const auto a = make_lv({0.9, 0.5, 0.1});
  CHECK(rank_correlation(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  const auto b = make_lv({0.1, 0.5, 0.9});
  CHECK(rank_correlation(a, b) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("rank correlation with a tie, against the double-loop oracle") {
  const auto a = make_lv({0.9, 0.5, 0.5, 0.1});
  const auto b = make_lv({0.8, 0.6, 0.4, 0.2});
  const auto ra = testutil::naive_ranks(a.scores);
  const auto rb = testutil::naive_ranks(b.scores);
  CHECK(ra == std::vector<int>{1, 3, 3, 4});
  CHECK(rb == std::vector<int>{1, 2, 3, 4});
  const std::vector<double> da(ra.begin(), ra.end());
  const std::vector<double> db(rb.begin(), rb.end());
  const double expected = testutil::naive_pearson(da, db);
  CHECK(expected == doctest::Approx(4.5 / std::sqrt(23.75)).epsilon(1e-12));
  CHECK(rank_correlation(a, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rank correlation reports the first mismatched id") {
  auto a = make_lv({0.9, 0.5, 0.1});
  auto b = make_lv({0.9, 0.5, 0.1});
  b.sample_ids[1] = "other";
  try {
    rank_correlation(a, b);
    FAIL("expected AlignmentError");
  } catch (const AlignmentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("index 1") != std::string::npos);
    CHECK(msg.find("'s1'") != std::string::npos);
    CHECK(msg.find("'other'") != std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// correlation_matrix
// ---------------------------------------------------------------------------

TEST_CASE("correlation matrix of a vector with itself") {
  const auto a = make_lv({0.9, 0.4, 0.2});
  const std::vector<LearnabilityVector> vs{a, a};
  for (const auto mode : {CorrelationMode::score, CorrelationMode::rank}) {
    const auto m = correlation_matrix(vs, mode);
    REQUIRE(m.size() == 2);
    CHECK(m[0][0] == 1.0);
    CHECK(m[1][1] == 1.0);
    CHECK(m[0][1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m[1][0] == m[0][1]);
  }
}

TEST_CASE("correlation matrix sees through positive scaling") {
  const auto v1 = make_lv({0.1, 0.3, 0.45, 0.2});
  auto v2 = v1;
  for (auto& s : v2.scores) s *= 2.0;
  const auto v3 = make_lv({0.9, 0.1, 0.5, 0.4});
  const std::vector<LearnabilityVector> vs{v1, v2, v3};
  const auto m = correlation_matrix(vs, CorrelationMode::score);
  CHECK(m[0][1] == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(m[i][j] == m[j][i]);
}

TEST_CASE("correlation matrix embeds the tied-rank example") {
  const auto a = make_lv({0.9, 0.5, 0.5, 0.1});
  const auto b = make_lv({0.8, 0.6, 0.4, 0.2});
  const auto m = correlation_matrix(std::vector<LearnabilityVector>{a, b},
                                    CorrelationMode::rank);
  CHECK(m[0][1] == doctest::Approx(4.5 / std::sqrt(23.75)).epsilon(1e-12));
}

TEST_CASE("correlation matrix input validation") {
  const auto a = make_lv({0.9, 0.5, 0.1});
  CHECK_THROWS_AS(correlation_matrix(std::vector<LearnabilityVector>{a},
                                     CorrelationMode::score),
                  InvalidInputError);
  auto b = a;
  b.sample_ids[0] = "zzz";
  CHECK_THROWS_AS(correlation_matrix(std::vector<LearnabilityVector>{a, b},
                                     CorrelationMode::score),
                  AlignmentError);
}

// ---------------------------------------------------------------------------
// permutation equivariance
// ---------------------------------------------------------------------------

TEST_CASE("permuting samples permutes scores and ranks, correlations unchanged") {
  Rng rng(50);
  for (int c = 0; c < 1000; ++c) {
    const auto n = 2 + rng.below(20);
    const auto t = 1 + rng.below(3);
    const auto r = 1 + rng.below(2);
    const auto h = testutil::random_history(rng, n, t, r);
    auto h2 = testutil::random_history(rng, n, t, r);
    h2.sample_ids = h.sample_ids;

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);

    auto permute = [&](const PredictionHistory& src) {
      auto out = PredictionHistory::zeroed(n, t, r, {});
      out.sample_ids.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        out.sample_ids[i] = src.sample_ids[perm[i]];
        for (std::size_t run = 0; run < r; ++run)
          for (std::size_t e = 0; e < t; ++e)
            out.value(run, e, i) = src.value(run, e, perm[i]);
      }
      return out;
    };

    const auto lv = compute_learnability(h);
    const auto lv_p = compute_learnability(permute(h));
    const auto ranks = compute_ranks(lv);
    const auto ranks_p = compute_ranks(lv_p);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(lv_p.scores[i] == lv.scores[perm[i]]);
      CHECK(lv_p.sample_ids[i] == lv.sample_ids[perm[i]]);
      CHECK(ranks_p.ranks[i] == ranks.ranks[perm[i]]);
    }

    const auto lv2 = compute_learnability(h2);
    const auto lv2_p = compute_learnability(permute(h2));
    const bool a_const =
        std::all_of(lv.scores.begin(), lv.scores.end(), [&](double v) { return v == lv.scores[0]; });
    const bool b_const = std::all_of(lv2.scores.begin(), lv2.scores.end(),
                                     [&](double v) { return v == lv2.scores[0]; });
    if (!a_const && !b_const) {
      CHECK(pearson(lv_p.scores, lv2_p.scores) ==
            doctest::Approx(pearson(lv.scores, lv2.scores)).epsilon(1e-12));
      CHECK(rank_correlation(lv_p, lv2_p) ==
            doctest::Approx(rank_correlation(lv, lv2)).epsilon(1e-12));
    }
  }
}
