#include "dbmatch/repetition.hpp"

#include <array>
#include <cmath>

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

}  // namespace

TEST_SUITE("repetition") {

TEST_CASE("validate_repetition") {
  const RepetitionDistribution d = validate_repetition({0.25, 0.5, 0.25});
  CHECK(d.delta() == 0.25);
  CHECK(d.s_max() == 2);

  CHECK_NOTHROW(validate_repetition({1.0}));          // always delete
  CHECK_NOTHROW(validate_repetition({0.0, 1.0}));     // identity channel
  CHECK_THROWS_AS(validate_repetition({}), InvalidDistribution);
  CHECK_THROWS_AS(validate_repetition({0.5, 0.3}), InvalidDistribution);
  CHECK_THROWS_AS(validate_repetition({-0.1, 1.1}), InvalidDistribution);
}

TEST_CASE("sample_pattern point masses and determinism") {
  const RepetitionDistribution del = validate_repetition({1.0});
  const RepetitionPattern all_zero = sample_pattern(del, 6, 5);
  CHECK(all_zero.s == std::vector<std::uint32_t>(6, 0));
  CHECK(all_zero.total_width() == 0);

  const RepetitionDistribution keep = validate_repetition({0.0, 1.0});
  CHECK(sample_pattern(keep, 6, 5).s == std::vector<std::uint32_t>(6, 1));

  const RepetitionDistribution d = validate_repetition({0.25, 0.5, 0.25});
  CHECK(sample_pattern(d, 100, 5).s == sample_pattern(d, 100, 5).s);
  CHECK(sample_pattern(d, 100, 5).s != sample_pattern(d, 100, 6).s);
}

TEST_CASE("sample_pattern empirical frequencies") {
  const RepetitionDistribution d = validate_repetition({0.25, 0.5, 0.25});
  const std::uint32_t n = 100000;
  const RepetitionPattern pat = sample_pattern(d, n, 31);
  std::array<double, 3> freq{};
  for (const std::uint32_t s : pat.s) freq[s] += 1.0;
  for (int s = 0; s <= 2; ++s)
    CHECK(std::abs(freq[s] / n - d.probs[s]) <= 0.005);
}

TEST_CASE("apply_repetitions worked example") {
  // Columns: first duplicated, second deleted, third kept.
  const Database db = make_db(2, 3, 2, {1, 2, 1, 2, 2, 1});
  RepetitionPattern pat;
  pat.s = {2, 0, 1};
  const Database out = apply_repetitions(db, pat);
  CHECK(out.rows == 2);
  CHECK(out.cols == 3);
  CHECK(out.cells == std::vector<std::uint8_t>{1, 1, 1, 2, 2, 1});
}

TEST_CASE("apply_repetitions edge cases") {
  const Database db = make_db(2, 3, 2, {1, 2, 1, 2, 2, 1});

  RepetitionPattern identity;
  identity.s = {1, 1, 1};
  CHECK(apply_repetitions(db, identity) == db);

  RepetitionPattern all_deleted;
  all_deleted.s = {0, 0, 0};
  const Database empty = apply_repetitions(db, all_deleted);
  CHECK(empty.rows == 2);
  CHECK(empty.cols == 0);
  CHECK(empty.cells.empty());

  RepetitionPattern wrong;
  wrong.s = {1, 1};
  CHECK_THROWS_AS(apply_repetitions(db, wrong), SizeMismatch);

  RepetitionPattern huge;
  huge.s = {2000000000u, 2000000000u, 2000000000u};
  CHECK_THROWS_AS(apply_repetitions(db, huge), DimensionOverflow);
}

TEST_CASE("width conservation over random patterns") {
  const MarkovParams p = validate_params(0.2, {0.5, 0.5});
  const Database db = generate_database(p, 8, 24, 15);
  const RepetitionDistribution d = validate_repetition({0.3, 0.4, 0.2, 0.1});
  for (int t = 0; t < 300; ++t) {
    const RepetitionPattern pat = sample_pattern(d, db.cols, derive_seed(99, t));
    const Database out = apply_repetitions(db, pat);
    CHECK(out.cols == pat.total_width());
    CHECK(out.rows == db.rows);
    // Each surviving block replicates one source column verbatim.
    std::uint32_t off = 0;
    for (std::uint32_t j = 0; j < db.cols; ++j)
      for (std::uint32_t r = 0; r < pat.s[j]; ++r, ++off)
        for (std::uint32_t i = 0; i < db.rows; ++i)
          CHECK(out.at(i, off) == db.at(i, j));
  }
}

TEST_CASE("repetitions commute with row permutation") {
  const MarkovParams p = validate_params(0.5, {0.3, 0.7});
  const Database db = generate_database(p, 32, 12, 8);
  const RepetitionDistribution d = validate_repetition({0.25, 0.5, 0.25});
  for (int t = 0; t < 50; ++t) {
    const Permutation theta = sample_permutation(db.rows, derive_seed(4, t));
    const RepetitionPattern pat = sample_pattern(d, db.cols, derive_seed(5, t));
    const Database a = apply_repetitions(apply_permutation(db, theta), pat);
    const Database b = apply_permutation(apply_repetitions(db, pat), theta);
    CHECK(a == b);
  }
}

TEST_CASE("pattern json round trip") {
  RepetitionPattern pat;
  pat.s = {2, 0, 1};
  CHECK(pattern_to_json(pat) == "[2,0,1]");
  CHECK(pattern_from_json("[2,0,1]") == pat);
  CHECK(pattern_from_json("[]").s.empty());
  CHECK_THROWS_AS(pattern_from_json("{\"s\":1}"), ParseError);
  CHECK_THROWS_AS(pattern_from_json("[1,-2]"), ParseError);
  CHECK_THROWS_AS(pattern_from_json("[1,2.5]"), ParseError);
}

}  // TEST_SUITE
