#include "dbmatch/detection.hpp"

#include <unordered_map>
#include <unordered_set>

#include "dbmatch/errors.hpp"

namespace dbmatch {

Database collapse(const Database& db, std::uint8_t marked_symbol) {
  if (marked_symbol < 1 || marked_symbol > db.alphabet_size)
    throw SymbolOutOfRange("marked symbol must lie in 1..alphabet_size");
  Database out;
  out.rows = db.rows;
  out.cols = db.cols;
  out.alphabet_size = 2;
  out.cells.resize(db.cells.size());
  for (std::size_t i = 0; i < db.cells.size(); ++i)
    out.cells[i] = db.cells[i] == marked_symbol ? 1 : 2;
  return out;
}

HistogramVector column_histograms(const Database& collapsed) {
  HistogramVector h;
  h.row_count = collapsed.rows;
  h.counts.assign(collapsed.cols, 0);
  // Row-major sweep keeps the scan sequential; the per-column accumulators fit
  // in cache for any realistic width.
  const std::uint8_t* cell = collapsed.cells.data();
  for (std::uint32_t i = 0; i < collapsed.rows; ++i)
    for (std::uint32_t j = 0; j < collapsed.cols; ++j, ++cell) h.counts[j] += *cell == 2;
  return h;
}

bool has_duplicate_counts(const HistogramVector& h) {
  std::unordered_set<std::int64_t> seen;
  seen.reserve(h.counts.size() * 2);
  for (const std::int64_t c : h.counts)
    if (!seen.insert(c).second) return true;
  return false;
}

DetectedPattern detect_pattern(const HistogramVector& h1, const HistogramVector& h2) {
  if (h1.row_count != h2.row_count)
    throw RowCountMismatch("histograms were taken over different row counts");

  const std::size_t n = h1.counts.size();
  DetectedPattern out;
  out.s_hat.assign(n, 0);
  out.status = DetectionStatus::kDetectionError;

  std::unordered_map<std::int64_t, std::uint32_t> index_of;
  index_of.reserve(n * 2);
  for (std::uint32_t j = 0; j < n; ++j)
    if (!index_of.emplace(h1.counts[j], j).second) return out;  // duplicate source value

  // The channel turns column j into a contiguous block of s_j equal histogram
  // values, blocks ordered by j. Walk h2's runs and check exactly that shape;
  // any violation means the histograms cannot be a (source, output) pair.
  std::vector<std::uint32_t> s_hat(n, 0);
  std::int64_t prev_index = -1;
  std::size_t pos = 0;
  const std::size_t k = h2.counts.size();
  while (pos < k) {
    const std::int64_t value = h2.counts[pos];
    std::size_t run = 1;
    while (pos + run < k && h2.counts[pos + run] == value) ++run;
    const auto it = index_of.find(value);
    if (it == index_of.end()) return out;                        // value foreign to h1
    if (static_cast<std::int64_t>(it->second) <= prev_index) return out;  // order violation or split run
    s_hat[it->second] = static_cast<std::uint32_t>(run);
    prev_index = it->second;
    pos += run;
  }

  out.s_hat = std::move(s_hat);
  out.status = DetectionStatus::kRecovered;
  return out;
}

}  // namespace dbmatch
