#include "dbmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "dbmatch/markov.hpp"
#include "dbmatch/rng.hpp"

namespace dbmatch {

namespace {

struct Key128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  friend bool operator==(const Key128& a, const Key128& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
  friend bool operator<(const Key128& a, const Key128& b) {
    return a.hi != b.hi ? a.hi < b.hi : a.lo < b.lo;
  }
};

// Two independent FNV-1a lanes over the retained projection, mixed at the end.
// Probes verify the full projection, so a digest collision costs time, never
// correctness.
Key128 digest_row(const std::vector<std::uint8_t>& cells, std::size_t row_offset,
                  const std::vector<std::uint32_t>& retained) {
  std::uint64_t lo = 0xcbf29ce484222325ull;
  std::uint64_t hi = 0x84222325cbf29ce4ull;
  for (const std::uint32_t j : retained) {
    const std::uint64_t byte = cells[row_offset + j];
    lo = (lo ^ byte) * 0x00000100000001b3ull;
    hi = (hi ^ byte) * 0xc6a4a7935bd1e995ull;
  }
  return Key128{mix64(lo), mix64(hi)};
}

// Columns are erased wholesale (reduce() never produces a partially erased
// column), so row 0 determines the retained set.
std::vector<std::uint32_t> retained_columns(const ReducedDatabase& reduced) {
  std::vector<std::uint32_t> retained;
  if (reduced.rows == 0) return retained;
  for (std::uint32_t j = 0; j < reduced.cols; ++j)
    if (reduced.at(0, j) != kErased) retained.push_back(j);
  return retained;
}

struct JoinIndex {
  std::vector<std::uint32_t> retained;
  std::vector<std::pair<Key128, std::uint32_t>> keys;  // sorted by (digest, row)
};

JoinIndex build_index(const Database& db1, const ReducedDatabase& reduced) {
  if (db1.cols != reduced.cols)
    throw WidthMismatch("matcher inputs have different column counts");
  if (db1.rows != reduced.rows)
    throw SizeMismatch("matcher inputs have different row counts");
  JoinIndex idx;
  idx.retained = retained_columns(reduced);
  idx.keys.reserve(db1.rows);
  for (std::uint32_t i = 0; i < db1.rows; ++i)
    idx.keys.emplace_back(
        digest_row(db1.cells, static_cast<std::size_t>(i) * db1.cols, idx.retained), i);
  std::sort(idx.keys.begin(), idx.keys.end());
  return idx;
}

bool rows_consistent(const Database& db1, std::uint32_t i, const ReducedDatabase& reduced,
                     std::uint32_t l, const std::vector<std::uint32_t>& retained) {
  for (const std::uint32_t j : retained)
    if (db1.at(i, j) != reduced.at(l, j)) return false;
  return true;
}

// Calls fn(i) for every db1 row consistent with reduced row l; stops early
// once fn returns false.
template <typename Fn>
void for_each_candidate(const Database& db1, const ReducedDatabase& reduced, std::uint32_t l,
                        const JoinIndex& idx, Fn&& fn) {
  const Key128 key =
      digest_row(reduced.cells, static_cast<std::size_t>(l) * reduced.cols, idx.retained);
  const auto lo = std::lower_bound(idx.keys.begin(), idx.keys.end(),
                                   std::make_pair(key, std::uint32_t{0}));
  for (auto it = lo; it != idx.keys.end() && it->first == key; ++it) {
    if (!rows_consistent(db1, it->second, reduced, l, idx.retained)) continue;
    if (!fn(it->second)) break;
  }
}

void classify(MatchResult& res, std::uint32_t l, std::uint64_t count, std::uint32_t found) {
  if (count == 0)
    ++res.misses;
  else if (count > 1)
    ++res.collisions;
  else
    res.assignment[l] = found;
}

double xlog2(double p) { return p > 0.0 ? std::log2(p) : 0.0; }

}  // namespace

ReducedDatabase reduce(const Database& repeated, const DetectedPattern& pattern) {
  if (pattern.status != DetectionStatus::kRecovered)
    throw PatternMismatch("cannot reduce a database with a failed pattern detection");
  std::uint64_t width = 0;
  for (const std::uint32_t s : pattern.s_hat) width += s;
  if (width != repeated.cols)
    throw PatternMismatch("pattern width does not match the repeated database");

  ReducedDatabase out;
  out.rows = repeated.rows;
  out.cols = static_cast<std::uint32_t>(pattern.s_hat.size());
  out.alphabet_size = repeated.alphabet_size;
  out.cells.assign(static_cast<std::size_t>(out.rows) * out.cols, kErased);
  for (std::uint32_t i = 0; i < out.rows; ++i) {
    std::uint32_t c = 0;
    for (std::uint32_t j = 0; j < out.cols; ++j) {
      const std::uint32_t s = pattern.s_hat[j];
      if (s == 0) continue;  // deleted column stays kErased
      // Replicas are verbatim copies; the first carries everything.
      out.cells[static_cast<std::size_t>(i) * out.cols + j] = repeated.at(i, c);
      c += s;
    }
  }
  return out;
}

MatchResult match_consistency(const Database& db1, const ReducedDatabase& reduced) {
  const JoinIndex idx = build_index(db1, reduced);
  MatchResult res;
  res.assignment.assign(reduced.rows, kUnmatched);
  for (std::uint32_t l = 0; l < reduced.rows; ++l) {
    std::uint64_t count = 0;
    std::uint32_t found = kUnmatched;
    for_each_candidate(db1, reduced, l, idx, [&](std::uint32_t i) {
      ++count;
      found = i;
      return count < 2;  // two candidates already decide "collision"
    });
    classify(res, l, count, found);
  }
  return res;
}

MatchResult match_typicality(const Database& db1, const ReducedDatabase& reduced,
                             const MarkovParams& params, const MatcherConfig& config) {
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
    throw InvalidEpsilon("typicality slack must be a positive finite number");
  const JoinIndex idx = build_index(db1, reduced);
  if (db1.cols == 0) throw WidthMismatch("typicality scores need at least one column");

  const double inf = std::numeric_limits<double>::infinity();
  const double delta = config.delta_for_typicality;
  const std::size_t k = params.u.size();

  // Rate targets. Per retained column the output chain costs one conditional
  // entropy term; averaging over the geometric gap law gives exactly the
  // matching capacity, and the erasure pattern itself costs h2(delta).
  const double h_x = conditional_entropy_rate(params, 0);
  const std::vector<double> pattern_law = {delta, 1.0 - delta};
  const double h2_delta = shannon_entropy_bits(pattern_law);
  const double h_y = h2_delta + matching_capacity(params, delta, 1e-12).capacity_bits;
  const double h_xy = h_x + h2_delta;

  std::vector<double> log2_pi(k);
  for (std::size_t a = 0; a < k; ++a) log2_pi[a] = std::log2(params.u[a]);
  // Per-gap log transition tables, built lazily; valid parameters keep every
  // entry of P^gap strictly positive.
  std::map<int, std::vector<double>> gap_tables;
  const auto log_table = [&](int gap) -> const std::vector<double>& {
    auto it = gap_tables.find(gap);
    if (it == gap_tables.end()) {
      const TransitionMatrix pg = transition_power(params, gap);
      std::vector<double> logs(k * k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          logs[a * k + b] = std::log2(pg(static_cast<int>(a), static_cast<int>(b)));
      it = gap_tables.emplace(gap, std::move(logs)).first;
    }
    return it->second;
  };

  const auto symbol_index = [&](std::uint8_t sym) -> std::size_t {
    if (sym == kErased || sym > k)
      throw SymbolOutOfRange("matcher row symbol outside the model alphabet");
    return static_cast<std::size_t>(sym) - 1;
  };

  const double inv_n = 1.0 / static_cast<double>(db1.cols);

  // -log2 p(x row) under the chain, exact including the initial symbol.
  const std::vector<double>& step = log_table(1);
  std::vector<double> score_x(db1.rows);
  for (std::uint32_t i = 0; i < db1.rows; ++i) {
    std::size_t prev = symbol_index(db1.at(i, 0));
    double s = -log2_pi[prev];
    for (std::uint32_t j = 1; j < db1.cols; ++j) {
      const std::size_t cur = symbol_index(db1.at(i, j));
      s -= step[prev * k + cur];
      prev = cur;
    }
    score_x[i] = s;
  }

  // -log2 of the erasure pattern probability, shared by every reduced row.
  const double n_erased = static_cast<double>(reduced.cols - idx.retained.size());
  const double n_kept = static_cast<double>(idx.retained.size());
  double chan = inf;
  if (!(n_erased > 0.0 && delta == 0.0) && !(n_kept > 0.0 && delta == 1.0))
    chan = -n_erased * xlog2(delta) - n_kept * xlog2(1.0 - delta);

  MatchResult res;
  res.assignment.assign(reduced.rows, kUnmatched);
  for (std::uint32_t l = 0; l < reduced.rows; ++l) {
    // -log2 p(reduced row): pattern cost plus the subsampled chain over the
    // retained columns, with gap-dependent transitions.
    double score_y = chan;
    if (!idx.retained.empty()) {
      std::size_t prev = symbol_index(reduced.at(l, idx.retained[0]));
      score_y -= log2_pi[prev];
      for (std::size_t t = 1; t < idx.retained.size(); ++t) {
        const std::size_t cur = symbol_index(reduced.at(l, idx.retained[t]));
        const int gap = static_cast<int>(idx.retained[t] - idx.retained[t - 1]);
        score_y -= log_table(gap)[prev * k + cur];
        prev = cur;
      }
    }
    if (!(std::abs(score_y * inv_n - h_y) < config.epsilon)) {
      ++res.misses;  // the reduced row itself is atypical, no candidate survives
      continue;
    }
    std::uint64_t count = 0;
    std::uint32_t found = kUnmatched;
    for_each_candidate(db1, reduced, l, idx, [&](std::uint32_t i) {
      // For consistent pairs p(x, y) = p(x) * pattern probability.
      const bool x_ok = std::abs(score_x[i] * inv_n - h_x) < config.epsilon;
      const bool xy_ok = std::abs((score_x[i] + chan) * inv_n - h_xy) < config.epsilon;
      if (x_ok && xy_ok) {
        ++count;
        found = i;
      }
      return count < 2;
    });
    classify(res, l, count, found);
  }
  return res;
}

std::uint64_t evaluate_errors(const MatchResult& result, const Permutation& truth) {
  if (truth.map.size() != result.assignment.size())
    throw SizeMismatch("assignment and truth describe different row counts");
  std::uint64_t errors = 0;
  for (std::uint32_t i = 0; i < truth.map.size(); ++i)
    errors += result.assignment[truth.map[i]] != i;
  return errors;
}

double evaluate(const MatchResult& result, const Permutation& truth) {
  const std::uint64_t m = truth.map.size();
  if (m == 0) return 0.0;
  return static_cast<double>(evaluate_errors(result, truth)) / static_cast<double>(m);
}

}  // namespace dbmatch
