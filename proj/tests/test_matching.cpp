#include "dbmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

using namespace dbmatch;

namespace {

Database make_db(std::uint32_t rows, std::uint32_t cols, std::uint8_t alphabet,
                 std::vector<std::uint8_t> cells) {
  Database db;
  db.rows = rows;
  db.cols = cols;
  db.alphabet_size = alphabet;
  db.cells = std::move(cells);
  return db;
}

DetectedPattern truth_pattern(const RepetitionPattern& s) {
  DetectedPattern d;
  d.s_hat = s.s;
  d.status = DetectionStatus::kRecovered;
  return d;
}

// Direct column erasure: what reduce() must produce when the pattern is known.
ReducedDatabase erase_columns(const Database& db, const std::vector<bool>& erased) {
  ReducedDatabase out;
  out.rows = db.rows;
  out.cols = db.cols;
  out.alphabet_size = db.alphabet_size;
  out.cells.resize(db.cells.size());
  for (std::uint32_t i = 0; i < db.rows; ++i)
    for (std::uint32_t j = 0; j < db.cols; ++j)
      out.cells[static_cast<std::size_t>(i) * db.cols + j] = erased[j] ? kErased : db.at(i, j);
  return out;
}

// Reference matcher: quadratic scan, no hashing. The hash join must agree with
// this exactly on every field.
MatchResult brute_force_match(const Database& db1, const ReducedDatabase& reduced) {
  MatchResult res;
  res.assignment.assign(reduced.rows, kUnmatched);
  for (std::uint32_t l = 0; l < reduced.rows; ++l) {
    std::uint32_t found = kUnmatched;
    std::uint64_t count = 0;
    for (std::uint32_t i = 0; i < db1.rows; ++i) {
      bool consistent = true;
      for (std::uint32_t j = 0; j < db1.cols && consistent; ++j)
        if (reduced.at(l, j) != kErased && reduced.at(l, j) != db1.at(i, j)) consistent = false;
      if (consistent) {
        ++count;
        found = i;
      }
    }
    if (count == 0)
      ++res.misses;
    else if (count > 1)
      ++res.collisions;
    else
      res.assignment[l] = found;
  }
  return res;
}

}  // namespace

TEST_SUITE("matching") {

TEST_CASE("reduce worked example") {
  // Repeated database [[1,1,1],[2,2,1]] with pattern (2,0,1): first column
  // restored from its replica pair, second erased, third kept.
  const Database rep = make_db(2, 3, 2, {1, 1, 1, 2, 2, 1});
  DetectedPattern pat;
  pat.s_hat = {2, 0, 1};
  pat.status = DetectionStatus::kRecovered;
  const ReducedDatabase red = reduce(rep, pat);
  CHECK(red.rows == 2);
  CHECK(red.cols == 3);
  CHECK(red.cells == std::vector<std::uint8_t>{1, kErased, 1, 2, kErased, 1});
}

TEST_CASE("reduce validates its inputs") {
  const Database rep = make_db(2, 3, 2, {1, 1, 1, 2, 2, 1});
  DetectedPattern bad_width;
  bad_width.s_hat = {1, 0, 1};  // sums to 2, repeated has 3 columns
  bad_width.status = DetectionStatus::kRecovered;
  CHECK_THROWS_AS(reduce(rep, bad_width), PatternMismatch);

  DetectedPattern failed;
  failed.s_hat = {2, 0, 1};
  failed.status = DetectionStatus::kDetectionError;
  CHECK_THROWS_AS(reduce(rep, failed), PatternMismatch);
}

TEST_CASE("reduce undoes repetitions up to erasures") {
  const MarkovParams p = validate_params(0.3, {0.2, 0.3, 0.5});
  const Database db = generate_database(p, 40, 20, 62);
  const RepetitionDistribution dist = validate_repetition({0.3, 0.4, 0.3});
  for (int t = 0; t < 100; ++t) {
    const RepetitionPattern s = sample_pattern(dist, db.cols, derive_seed(8, t));
    const ReducedDatabase red = reduce(apply_repetitions(db, s), truth_pattern(s));
    std::vector<bool> erased(db.cols);
    for (std::uint32_t j = 0; j < db.cols; ++j) erased[j] = s.s[j] == 0;
    CHECK(red == erase_columns(db, erased));
  }
}

TEST_CASE("consistency matching, no erasures, distinct rows") {
  const Database db = make_db(3, 2, 3, {1, 2, 2, 1, 3, 3});
  Permutation theta;
  theta.map = {2, 0, 1};
  const ReducedDatabase red = erase_columns(apply_permutation(db, theta), {false, false});
  const MatchResult res = match_consistency(db, red);
  CHECK(res.collisions == 0);
  CHECK(res.misses == 0);
  for (std::uint32_t i = 0; i < 3; ++i) CHECK(res.assignment[theta.map[i]] == i);
  CHECK(evaluate(res, theta) == 0.0);
  CHECK(evaluate_errors(res, theta) == 0);
}

TEST_CASE("ambiguous rows stay unmatched") {
  // Rows 0 and 1 agree outside the erased last column; rows 2 and 3 are
  // uniquely determined by the retained columns.
  const Database db = make_db(4, 4, 2,
                              {1, 1, 1, 1,
                               1, 1, 1, 2,
                               1, 2, 1, 1,
                               2, 1, 1, 2});
  Permutation id;
  id.map = {0, 1, 2, 3};
  const ReducedDatabase red = erase_columns(db, {false, false, false, true});
  const MatchResult res = match_consistency(db, red);
  CHECK(res.assignment[0] == kUnmatched);
  CHECK(res.assignment[1] == kUnmatched);
  CHECK(res.assignment[2] == 2);
  CHECK(res.assignment[3] == 3);
  CHECK(res.collisions == 2);
  CHECK(res.misses == 0);
  CHECK(evaluate(res, id) == 0.5);
}

TEST_CASE("hash join equals the quadratic reference") {
  SplitMix64 rng(0xabcde);
  for (int t = 0; t < 200; ++t) {
    const std::uint32_t m = 2 + static_cast<std::uint32_t>(rng.next_below(63));
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.next_below(16));
    const int alphabet = 2 + static_cast<int>(rng.next_below(3));
    const double gamma = rng.next_double() * 0.8;
    const MarkovParams p = validate_params(gamma, std::vector<double>(alphabet, 1.0));
    const Database db1 = generate_database(p, m, n, rng.next_u64());
    const Permutation theta = sample_permutation(m, rng.next_u64());
    std::vector<bool> erased(n);
    const double erase_prob = rng.next_double() * 0.6;
    for (std::uint32_t j = 0; j < n; ++j) erased[j] = rng.next_double() < erase_prob;
    const ReducedDatabase red = erase_columns(apply_permutation(db1, theta), erased);

    const MatchResult fast = match_consistency(db1, red);
    const MatchResult ref = brute_force_match(db1, red);
    CHECK(fast.assignment == ref.assignment);
    CHECK(fast.collisions == ref.collisions);
    CHECK(fast.misses == ref.misses);
  }
}

TEST_CASE("consistent candidates share one channel likelihood") {
  // Under the erasure channel every consistent pair has likelihood
  // delta^{#erased} (1-delta)^{#retained}, independent of the candidate, so
  // consistency matching is maximum likelihood with unique-argmax semantics.
  SplitMix64 rng(0x77);
  const double delta = 0.4;
  for (int t = 0; t < 50; ++t) {
    const MarkovParams p = validate_params(0.2, {0.5, 0.5});
    const std::uint32_t m = 16, n = 8;
    const Database db1 = generate_database(p, m, n, rng.next_u64());
    std::vector<bool> erased(n);
    for (std::uint32_t j = 0; j < n; ++j) erased[j] = rng.next_double() < delta;
    const ReducedDatabase red = erase_columns(db1, erased);

    for (std::uint32_t l = 0; l < m; ++l) {
      std::vector<double> likelihoods;
      for (std::uint32_t i = 0; i < m; ++i) {
        double lik = 1.0;
        bool consistent = true;
        for (std::uint32_t j = 0; j < n; ++j) {
          if (red.at(l, j) == kErased)
            lik *= delta;
          else if (red.at(l, j) == db1.at(i, j))
            lik *= 1.0 - delta;
          else
            consistent = false;
        }
        if (consistent) likelihoods.push_back(lik);
      }
      REQUIRE(!likelihoods.empty());  // the true row is always consistent
      for (const double lik : likelihoods) CHECK(lik == likelihoods.front());
    }
  }
}

TEST_CASE("candidate sets only grow as more columns are erased") {
  SplitMix64 rng(0x1357);
  for (int t = 0; t < 40; ++t) {
    const MarkovParams p = validate_params(0.0, {0.5, 0.5});
    const std::uint32_t m = 24, n = 10;
    const Database db1 = generate_database(p, m, n, rng.next_u64());
    std::vector<bool> few(n, false), more(n, false);
    for (std::uint32_t j = 0; j < n; ++j) {
      few[j] = rng.next_double() < 0.3;
      more[j] = few[j] || rng.next_double() < 0.3;
    }
    const ReducedDatabase red_few = erase_columns(db1, few);
    const ReducedDatabase red_more = erase_columns(db1, more);
    for (std::uint32_t l = 0; l < m; ++l) {
      std::uint64_t count_few = 0, count_more = 0;
      for (std::uint32_t i = 0; i < m; ++i) {
        bool c1 = true, c2 = true;
        for (std::uint32_t j = 0; j < n; ++j) {
          if (red_few.at(l, j) != kErased && red_few.at(l, j) != db1.at(i, j)) c1 = false;
          if (red_more.at(l, j) != kErased && red_more.at(l, j) != db1.at(i, j)) c2 = false;
        }
        count_few += c1;
        count_more += c2;
      }
      CHECK(count_more >= count_few);
    }
  }
}

TEST_CASE("matcher input validation") {
  const Database db = make_db(2, 3, 2, {1, 2, 1, 2, 2, 1});
  ReducedDatabase red;
  red.rows = 2;
  red.cols = 2;
  red.alphabet_size = 2;
  red.cells = {1, 2, 2, 1};
  CHECK_THROWS_AS(match_consistency(db, red), WidthMismatch);

  red.cols = 3;
  red.rows = 1;
  red.cells = {1, 2, 1};
  CHECK_THROWS_AS(match_consistency(db, red), SizeMismatch);

  const MarkovParams p = validate_params(0.0, {0.5, 0.5});
  MatcherConfig cfg;
  cfg.method = MatcherConfig::Method::kTypicality;
  cfg.epsilon = 0.0;
  cfg.delta_for_typicality = 0.25;
  red.rows = 2;
  red.cells = {1, 2, 1, 2, 2, 1};
  CHECK_THROWS_AS(match_typicality(db, red, p, cfg), InvalidEpsilon);
}

TEST_CASE("evaluate counts mismatches and unmatched rows") {
  MatchResult res;
  res.assignment = {0, 1, 2, 3, 4, 5, 6, kUnmatched};
  Permutation id;
  id.map = {0, 1, 2, 3, 4, 5, 6, 7};
  CHECK(evaluate(res, id) == doctest::Approx(0.125));
  CHECK(evaluate_errors(res, id) == 1);

  res.assignment = {1, 0, 2, 3, 4, 5, 6, 7};
  CHECK(evaluate(res, id) == doctest::Approx(0.25));

  Permutation wrong;
  wrong.map = {0, 1};
  CHECK_THROWS_AS(evaluate(res, wrong), SizeMismatch);
}

TEST_CASE("huge epsilon reduces typicality to consistency") {
  SplitMix64 rng(0x2468);
  const MarkovParams p = validate_params(0.3, {0.6, 0.4});
  MatcherConfig cfg;
  cfg.method = MatcherConfig::Method::kTypicality;
  cfg.epsilon = 1e6;
  cfg.delta_for_typicality = 0.3;
  for (int t = 0; t < 30; ++t) {
    const std::uint32_t m = 32, n = 12;
    const Database db1 = generate_database(p, m, n, rng.next_u64());
    const Permutation theta = sample_permutation(m, rng.next_u64());
    std::vector<bool> erased(n);
    for (std::uint32_t j = 0; j < n; ++j) erased[j] = rng.next_double() < 0.3;
    const ReducedDatabase red = erase_columns(apply_permutation(db1, theta), erased);

    const MatchResult a = match_typicality(db1, red, p, cfg);
    const MatchResult b = match_consistency(db1, red);
    CHECK(a.assignment == b.assignment);
    CHECK(a.collisions == b.collisions);
    CHECK(a.misses == b.misses);
  }
}

TEST_CASE("typicality never matches an inconsistent pair") {
  // Two rows differing everywhere: matching the wrong one is impossible no
  // matter how generous epsilon is.
  const Database db = make_db(2, 4, 2, {1, 1, 1, 1, 2, 2, 2, 2});
  const ReducedDatabase red = erase_columns(db, {false, true, false, false});
  const MarkovParams p = validate_params(0.0, {0.5, 0.5});
  MatcherConfig cfg;
  cfg.method = MatcherConfig::Method::kTypicality;
  cfg.epsilon = 100.0;
  cfg.delta_for_typicality = 0.25;
  const MatchResult res = match_typicality(db, red, p, cfg);
  CHECK(res.assignment[0] == 0);
  CHECK(res.assignment[1] == 1);
}

TEST_CASE("typicality agrees with consistency on a plentiful instance") {
  // Long rows, tiny table: consistency matches everything; typicality keeps at
  // least 90% of those decisions at epsilon = 0.2.
  const MarkovParams p = validate_params(0.0, {0.5, 0.5});
  MatcherConfig cfg;
  cfg.method = MatcherConfig::Method::kTypicality;
  cfg.epsilon = 0.2;
  cfg.delta_for_typicality = 0.25;
  std::uint64_t agree = 0, total = 0;
  for (int t = 0; t < 30; ++t) {
    const std::uint32_t m = 16, n = 64;
    const Database db1 = generate_database(p, m, n, derive_seed(0x99aa, t));
    const Permutation theta = sample_permutation(m, derive_seed(0xbbcc, t));
    std::vector<bool> erased(n);
    SplitMix64 rng(derive_seed(0xddee, t));
    for (std::uint32_t j = 0; j < n; ++j) erased[j] = rng.next_double() < 0.25;
    const ReducedDatabase red = erase_columns(apply_permutation(db1, theta), erased);

    const MatchResult a = match_typicality(db1, red, p, cfg);
    const MatchResult b = match_consistency(db1, red);
    for (std::uint32_t l = 0; l < m; ++l) {
      agree += a.assignment[l] == b.assignment[l];
      ++total;
    }
  }
  CHECK(double(agree) / double(total) >= 0.9);
}

}  // TEST_SUITE
