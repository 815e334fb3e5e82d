#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dbmatch/detection.hpp"
#include "dbmatch/markov.hpp"
#include "dbmatch/matching.hpp"
#include "dbmatch/repetition.hpp"

namespace dbmatch {

// Stage tags for per-trial seed derivation. Every trial uses
//   trial_seed = derive_seed(master_seed, trial_index)
//   stage_seed = derive_seed(trial_seed, stage_tag)
// so seeds depend only on (master_seed, trial, stage): two sweep cells with
// identical parameters replay identical randomness, and no seed is ever shared
// between stages or trials.
inline constexpr std::uint64_t kStageDatabase = 1;
inline constexpr std::uint64_t kStagePermutation = 2;
inline constexpr std::uint64_t kStagePattern = 3;

// Where the matcher's repetition pattern comes from. kHistogram runs the full
// detection step (the default pipeline); kOracle hands the matcher the true
// pattern, isolating matching performance from histogram collisions, which
// dominate at desk-scale m. Configurable via the optional "pattern_source"
// config key.
enum class PatternSource { kHistogram, kOracle };

struct OutputPaths {
  std::string summary_csv = "summary.csv";
  std::string trials_jsonl = "trials.jsonl";
};

struct ExperimentConfig {
  MarkovParams markov;
  RepetitionDistribution repetition;
  std::uint32_t n = 0;
  // Exactly one of the two is non-empty: growth_rates derives
  // m = round(2^(n*R)) per cell, m_list names the sizes directly.
  std::vector<double> growth_rates;
  std::vector<std::uint64_t> m_list;
  std::uint32_t trials = 0;
  std::uint64_t master_seed = 0;
  MatcherConfig matcher;
  std::uint8_t marked_symbol = 1;
  PatternSource pattern_source = PatternSource::kHistogram;
  OutputPaths outputs;
  std::uint64_t memory_budget = kDefaultMemoryBudget;

  // The m for each sweep cell, in output order.
  std::vector<std::uint64_t> cell_sizes() const;
};

// Parses and validates a config. Structural JSON problems throw ParseError;
// semantic ones throw ValidationError whose message starts with the offending
// field path (e.g. "markov.gamma: ..."). Unknown keys are rejected so typos
// cannot silently change an experiment.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);  // IoError if unreadable

struct TrialRecord {
  std::uint32_t trial_index = 0;
  std::uint64_t m = 0;
  std::uint64_t seed_database = 0;
  std::uint64_t seed_permutation = 0;
  std::uint64_t seed_pattern = 0;
  std::vector<std::uint32_t> true_s;
  bool detection_duplicate = false;  // source histogram had duplicate counts
  DetectionStatus detection = DetectionStatus::kRecovered;
  std::uint64_t row_errors = 0;  // numerator of row_error_rate, for exact pooling
  double row_error_rate = 0.0;   // 1.0 whenever detection failed
  std::uint64_t collisions = 0;
  std::uint64_t misses = 0;
  double wall_time_ms = 0.0;  // the only field exempt from determinism
};

// Runs one full pipeline pass: generate, permute, repeat, detect (or oracle),
// reduce, match, score. Deterministic given (config, m, trial_index) except
// for wall_time_ms. In histogram mode a recovered pattern is asserted equal to
// the hidden truth (PatternMismatch on violation; detection is error-free
// whenever the source histogram is duplicate-free).
TrialRecord run_trial(const ExperimentConfig& config, std::uint64_t m, std::uint32_t trial_index);

struct CellSummary {
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  double r_realized = 0.0;  // log2(m) / n
  double delta = 0.0;
  double gamma = 0.0;
  double capacity_bits = 0.0;
  std::uint32_t trials = 0;
  double detection_error_rate = 0.0;  // mean of detection_duplicate
  double row_error_rate_mean = 0.0;   // pooled over trials * m rows
  double row_error_rate_ci_lo = 0.0;  // 95% Wilson interval of the pooled rate
  double row_error_rate_ci_hi = 0.0;
};

struct ExperimentResult {
  std::vector<CellSummary> cells;
  std::vector<std::vector<TrialRecord>> trials;  // parallel to cells
};

// Runs trials for every sweep cell, up to `workers` trials concurrently.
// Output is byte-identical across runs and worker counts (wall_time_ms aside):
// each trial writes a preassigned slot and aggregation folds in index order.
ExperimentResult run_experiment(const ExperimentConfig& config, int workers = 1);

// Exact file formats, exposed as strings so determinism can be asserted
// without touching the filesystem. Rates carry 6 decimal digits, capacities 12.
std::string summary_csv_text(const ExperimentResult& result);
std::string trials_jsonl_text(const ExperimentResult& result);

// Writes both files into out_dir (created if missing), at the file names in
// config.outputs. Throws IoError on failure.
void write_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                   const std::string& out_dir);

// 95% Wilson score interval for a proportion; {0, 1} when total = 0.
struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t total);

// Fraction of fresh databases whose collapsed column histogram has duplicate
// counts, per (n, m) cell: the empirical collision probability that governs
// when detection is exact. Seeds derive from (seed, n, m, trial) only.
struct CollisionCell {
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  std::uint32_t trials = 0;
  double mu_hat = 0.0;
};
std::vector<CollisionCell> collision_probe(const MarkovParams& markov,
                                           const std::vector<std::uint32_t>& n_list,
                                           const std::vector<std::uint64_t>& m_list,
                                           std::uint32_t trials, std::uint64_t seed,
                                           std::uint8_t marked_symbol = 1);

// Capacity per delta with the series/closed-form cross-check verdict.
struct CapacityRow {
  double delta = 0.0;
  CapacityResult result;
  bool cross_check_ok = false;
};
std::vector<CapacityRow> capacity_table(const MarkovParams& markov,
                                        const std::vector<double>& delta_list,
                                        double tolerance = 1e-10);

}  // namespace dbmatch
