#pragma once

#include <cstdint>
#include <vector>

#include "dbmatch/database.hpp"
#include "dbmatch/detection.hpp"

namespace dbmatch {

// Erasure marker: symbols are 1-based, so 0 is never a real cell value.
inline constexpr std::uint8_t kErased = 0;

// Channel output after the recovered pattern has been folded back: one column
// per source column, deleted columns replaced by all-kErased columns, replica
// blocks collapsed to their first column. Rows remain in shuffled order.
struct ReducedDatabase {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint8_t alphabet_size = 0;
  std::vector<std::uint8_t> cells;

  std::uint8_t at(std::uint32_t r, std::uint32_t c) const {
    return cells[static_cast<std::size_t>(r) * cols + c];
  }
  bool operator==(const ReducedDatabase&) const = default;
};

// Requires pattern.status == kRecovered and sum(s_hat) == repeated.cols
// (PatternMismatch otherwise). Replicas beyond the first carry no information
// (they are verbatim copies), so dropping them loses nothing.
ReducedDatabase reduce(const Database& repeated, const DetectedPattern& pattern);

inline constexpr std::uint32_t kUnmatched = 0xffffffffu;

struct MatchResult {
  // assignment[l] = source row matched to reduced row l, or kUnmatched.
  std::vector<std::uint32_t> assignment;
  std::uint64_t collisions = 0;  // reduced rows with several surviving candidates
  std::uint64_t misses = 0;      // reduced rows with none
};

struct MatcherConfig {
  enum class Method { kConsistency, kTypicality };
  Method method = Method::kConsistency;
  double epsilon = 0.0;              // typicality slack, must be > 0 for that method
  double delta_for_typicality = 0.0; // erasure probability the scores assume
};

// Exact-agreement matcher: reduced row l is assigned the unique source row
// that coincides with it on every non-erased column. With the noiseless
// erasure channel all consistent candidates share the same likelihood, so this
// is maximum-likelihood with ties declared unmatched. Hash join (128-bit
// digests over the retained projection, candidates verified against the full
// key) keeps it near-linear. Throws WidthMismatch / SizeMismatch.
MatchResult match_consistency(const Database& db1, const ReducedDatabase& reduced);

// Joint-typicality matcher: additionally requires the candidate row, the
// reduced row, and the pair to have empirical log-probabilities within
// config.epsilon of the model rates H_X, H_Y, H_XY per column. Inconsistent
// pairs have probability zero and never match; a huge epsilon therefore
// reproduces match_consistency. Throws InvalidEpsilon if epsilon <= 0.
MatchResult match_typicality(const Database& db1, const ReducedDatabase& reduced,
                             const MarkovParams& params, const MatcherConfig& config);

// Fraction of source rows i whose true output row (truth.map[i]) was not
// assigned back to i; unmatched counts as an error. evaluate_errors is the
// integer numerator, exposed so aggregates can pool counts exactly.
std::uint64_t evaluate_errors(const MatchResult& result, const Permutation& truth);
double evaluate(const MatchResult& result, const Permutation& truth);

}  // namespace dbmatch
