#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbmatch/database.hpp"

namespace dbmatch {

// Distribution of the per-column repetition count S: probs[s] = P(S = s) for
// s = 0..s_max. S = 0 deletes the column, S = 1 keeps it, S >= 2 emits that
// many contiguous copies. probs[0] is the deletion probability delta.
struct RepetitionDistribution {
  std::vector<double> probs;

  int s_max() const { return static_cast<int>(probs.size()) - 1; }
  double delta() const { return probs[0]; }
};

// Entries must be non-negative and sum to 1 within 1e-9 (then the vector is
// renormalized exactly); anything further off is rejected as a genuinely wrong
// input rather than serialization noise. Throws InvalidDistribution.
RepetitionDistribution validate_repetition(std::vector<double> probs);

// One sampled repetition count per column. total_width() is the channel
// output's column count K = sum_j s[j]; K = 0 (every column deleted) is legal.
struct RepetitionPattern {
  std::vector<std::uint32_t> s;

  std::uint64_t total_width() const;
  bool operator==(const RepetitionPattern&) const = default;
};

// n i.i.d. draws from dist.
RepetitionPattern sample_pattern(const RepetitionDistribution& dist, std::uint32_t n,
                                 std::uint64_t seed);

// Applies the pattern column-wise: column j of db appears s[j] times
// contiguously, in the original column order. Throws SizeMismatch if the
// pattern length differs from db.cols, DimensionOverflow past the budget.
Database apply_repetitions(const Database& db, const RepetitionPattern& pattern,
                           std::uint64_t memory_budget = kDefaultMemoryBudget);

// JSON integer-array serialization of a pattern, e.g. "[2,0,1]".
std::string pattern_to_json(const RepetitionPattern& pattern);
RepetitionPattern pattern_from_json(const std::string& text);

}  // namespace dbmatch
