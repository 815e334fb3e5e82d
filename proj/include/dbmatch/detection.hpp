#pragma once

#include <cstdint>
#include <vector>

#include "dbmatch/database.hpp"
#include "dbmatch/repetition.hpp"

namespace dbmatch {

// Per-column tallies of the collapsed (binary) database. Counts are 64-bit so
// stress-scale row counts cannot overflow them.
struct HistogramVector {
  std::vector<std::int64_t> counts;
  std::uint64_t row_count = 0;
};

enum class DetectionStatus {
  kRecovered,       // s_hat is exact whenever the model's assumptions held
  kDetectionError,  // duplicate histogram values (or inconsistent histograms)
};

struct DetectedPattern {
  std::vector<std::uint32_t> s_hat;  // zeros when status is kDetectionError
  DetectionStatus status = DetectionStatus::kDetectionError;
};

// Maps the marked symbol to 1 and everything else to 2, turning any database
// into a binary one whose column sums identify columns. Throws
// SymbolOutOfRange if marked_symbol is not in 1..alphabet_size.
Database collapse(const Database& db, std::uint8_t marked_symbol);

// counts[j] = number of entries equal to 2 in column j of a collapsed
// database. Row order is irrelevant by construction.
HistogramVector column_histograms(const Database& collapsed);

bool has_duplicate_counts(const HistogramVector& h);

// Recovers the repetition pattern by matching histogram values of the channel
// output (h2) against the source (h1): s_hat[j] = multiplicity of h1.counts[j]
// within h2. Requires equal row counts (RowCountMismatch otherwise). Returns
// kDetectionError if h1 has duplicate values, or if h2 is not explainable as
// contiguous, order-preserving blocks of h1's values (which cannot happen for
// genuine channel output).
DetectedPattern detect_pattern(const HistogramVector& h1, const HistogramVector& h2);

}  // namespace dbmatch
