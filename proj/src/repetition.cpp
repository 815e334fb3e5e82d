#include "dbmatch/repetition.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "dbmatch/errors.hpp"
#include "dbmatch/rng.hpp"

namespace dbmatch {

RepetitionDistribution validate_repetition(std::vector<double> probs) {
  if (probs.empty()) throw InvalidDistribution("repetition distribution must not be empty");
  double sum = 0.0;
  for (const double v : probs) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InvalidDistribution("repetition probabilities must be non-negative and finite");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "repetition probabilities sum to " << sum << ", expected 1";
    throw InvalidDistribution(msg.str());
  }
  for (double& v : probs) v /= sum;
  RepetitionDistribution d;
  d.probs = std::move(probs);
  return d;
}

std::uint64_t RepetitionPattern::total_width() const {
  return std::accumulate(s.begin(), s.end(), std::uint64_t{0});
}

RepetitionPattern sample_pattern(const RepetitionDistribution& dist, std::uint32_t n,
                                 std::uint64_t seed) {
  std::vector<double> cdf(dist.probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  RepetitionPattern pat;
  pat.s.resize(n);
  SplitMix64 rng(seed);
  for (std::uint32_t j = 0; j < n; ++j) {
    const double x = rng.next_double();
    std::uint32_t s = 0;
    while (s + 1 < cdf.size() && x >= cdf[s]) ++s;
    pat.s[j] = s;
  }
  return pat;
}

Database apply_repetitions(const Database& db, const RepetitionPattern& pattern,
                           std::uint64_t memory_budget) {
  if (pattern.s.size() != db.cols)
    throw SizeMismatch("repetition pattern length does not match the column count");
  const std::uint64_t width = pattern.total_width();
  const std::uint64_t bytes = width * db.rows;
  if (width > 0xffffffffull || bytes > memory_budget)
    throw DimensionOverflow("repeated database exceeds the memory budget");

  Database out;
  out.rows = db.rows;
  out.cols = static_cast<std::uint32_t>(width);
  out.alphabet_size = db.alphabet_size;
  out.cells.resize(bytes);
  for (std::uint32_t i = 0; i < db.rows; ++i) {
    const std::uint8_t* src = db.cells.data() + static_cast<std::size_t>(i) * db.cols;
    std::uint8_t* dst = out.cells.data() + static_cast<std::size_t>(i) * out.cols;
    for (std::uint32_t j = 0; j < db.cols; ++j)
      for (std::uint32_t r = 0; r < pattern.s[j]; ++r) *dst++ = src[j];
  }
  return out;
}

std::string pattern_to_json(const RepetitionPattern& pattern) {
  return nlohmann::json(pattern.s).dump();
}

RepetitionPattern pattern_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("pattern is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("pattern must be a JSON array of integers");
  RepetitionPattern pat;
  pat.s.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_unsigned()) throw ParseError("pattern entries must be non-negative integers");
    pat.s.push_back(v.get<std::uint32_t>());
  }
  return pat;
}

}  // namespace dbmatch
