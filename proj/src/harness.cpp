#include "dbmatch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "json.hpp"

namespace dbmatch {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail_field(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) fail_field(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
  }
}

const json& require_key(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) fail_field(path, "missing required key");
  return obj.at(key);
}

const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail_field(path, "must be a JSON object");
  return v;
}

double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail_field(path, "must be a number");
  return v.get<double>();
}

std::uint64_t require_uint(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail_field(path, "must be a non-negative integer");
}

std::vector<double> require_number_array(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail_field(path, "must be a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(require_number(v.at(i), path + "[" + std::to_string(i) + "]"));
  return out;
}

// Worst-case live bytes of one trial: db1, its shuffle, the repeated copy and
// both collapsed views (factor s_max wide), plus the reduction.
std::uint64_t trial_bytes(std::uint64_t m, std::uint64_t n, int s_max) {
  const std::uint64_t factor = 4 + 2 * static_cast<std::uint64_t>(std::max(s_max, 0));
  if (n != 0 && m > ~0ull / (n * factor)) return ~0ull;
  return m * n * factor;
}

void validate_cells(const ExperimentConfig& cfg, const std::string& path_prefix) {
  const std::vector<std::uint64_t> sizes = cfg.cell_sizes();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::string path = path_prefix + "[" + std::to_string(i) + "]";
    if (sizes[i] < 1) fail_field(path, "derived database size m must be at least 1");
    if (sizes[i] > 0xffffffffull) fail_field(path, "database size m exceeds the 2^32 row limit");
    if (trial_bytes(sizes[i], cfg.n, cfg.repetition.s_max()) > cfg.memory_budget)
      fail_field(path, "sweep cell exceeds the memory budget");
  }
}

MatcherConfig parse_matcher(const json& v) {
  const json& obj = require_object(v, "matcher");
  check_keys(obj, "matcher", {"method", "epsilon"});
  MatcherConfig mc;
  const json& method = require_key(obj, "method", "matcher.method");
  if (!method.is_string()) fail_field("matcher.method", "must be a string");
  const std::string name = method.get<std::string>();
  if (name == "consistency" || name == "Consistency") {
    mc.method = MatcherConfig::Method::kConsistency;
  } else if (name == "typicality" || name == "Typicality") {
    mc.method = MatcherConfig::Method::kTypicality;
  } else {
    fail_field("matcher.method", "must be \"consistency\" or \"typicality\"");
  }
  if (obj.contains("epsilon")) {
    mc.epsilon = require_number(obj.at("epsilon"), "matcher.epsilon");
    if (!(mc.epsilon > 0.0) || !std::isfinite(mc.epsilon))
      fail_field("matcher.epsilon", "must be a positive finite number");
  } else if (mc.method == MatcherConfig::Method::kTypicality) {
    fail_field("matcher.epsilon", "required when method is \"typicality\"");
  }
  return mc;
}

// Runs fn(0..count-1), claiming indices from a shared counter so the slot an
// index writes to never depends on scheduling.
void parallel_for(std::uint32_t count, int workers, const std::function<void(std::uint32_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::uint32_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const auto work = [&] {
    for (;;) {
      const std::uint32_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawned = std::min<int>(workers, static_cast<int>(count)) - 1;
  pool.reserve(spawned);
  for (int w = 0; w < spawned; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string format_summary_row(const CellSummary& c) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%u,%llu,%.6f,%.6f,%.6f,%.12f,%u,%.6f,%.6f,%.6f,%.6f\n", c.n,
                static_cast<unsigned long long>(c.m), c.r_realized, c.delta, c.gamma,
                c.capacity_bits, c.trials, c.detection_error_rate, c.row_error_rate_mean,
                c.row_error_rate_ci_lo, c.row_error_rate_ci_hi);
  return buf;
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::cell_sizes() const {
  if (!m_list.empty()) return m_list;
  std::vector<std::uint64_t> out;
  out.reserve(growth_rates.size());
  for (const double r : growth_rates) {
    const double exponent = static_cast<double>(n) * r;
    if (exponent > 62.0) {
      out.push_back(~0ull);  // sentinel far past every limit; validation rejects it
      continue;
    }
    out.push_back(static_cast<std::uint64_t>(std::llround(std::exp2(exponent))));
  }
  return out;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("config must be a JSON object");
  check_keys(root, "",
             {"markov", "repetition", "n", "growth_rates", "m_list", "trials", "master_seed",
              "matcher", "marked_symbol", "pattern_source", "outputs"});

  ExperimentConfig cfg;

  const json& markov = require_object(require_key(root, "markov", "markov"), "markov");
  check_keys(markov, "markov", {"gamma", "u"});
  const double gamma = require_number(require_key(markov, "gamma", "markov.gamma"), "markov.gamma");
  const std::vector<double> u =
      require_number_array(require_key(markov, "u", "markov.u"), "markov.u");
  try {
    cfg.markov = validate_params(gamma, u);
  } catch (const GammaOutOfRange& e) {
    fail_field("markov.gamma", e.what());
  } catch (const InvalidDistribution& e) {
    fail_field("markov.u", e.what());
  }

  const json& repetition =
      require_object(require_key(root, "repetition", "repetition"), "repetition");
  check_keys(repetition, "repetition", {"probs"});
  try {
    cfg.repetition = validate_repetition(
        require_number_array(require_key(repetition, "probs", "repetition.probs"),
                             "repetition.probs"));
  } catch (const InvalidDistribution& e) {
    fail_field("repetition.probs", e.what());
  }

  const std::uint64_t n = require_uint(require_key(root, "n", "n"), "n");
  if (n < 1 || n > 0xffffffffull) fail_field("n", "must be an integer in [1, 2^32)");
  cfg.n = static_cast<std::uint32_t>(n);

  const bool has_rates = root.contains("growth_rates");
  const bool has_sizes = root.contains("m_list");
  if (has_rates == has_sizes)
    fail_field("growth_rates", "exactly one of growth_rates and m_list must be given");
  if (has_rates) {
    cfg.growth_rates = require_number_array(root.at("growth_rates"), "growth_rates");
    for (std::size_t i = 0; i < cfg.growth_rates.size(); ++i)
      if (!std::isfinite(cfg.growth_rates[i]))
        fail_field("growth_rates[" + std::to_string(i) + "]", "must be finite");
  } else {
    const json& sizes = root.at("m_list");
    if (!sizes.is_array() || sizes.empty()) fail_field("m_list", "must be a non-empty array");
    for (std::size_t i = 0; i < sizes.size(); ++i)
      cfg.m_list.push_back(require_uint(sizes.at(i), "m_list[" + std::to_string(i) + "]"));
  }

  const std::uint64_t trials = require_uint(require_key(root, "trials", "trials"), "trials");
  if (trials < 1 || trials > 0xffffffffull) fail_field("trials", "must be an integer in [1, 2^32)");
  cfg.trials = static_cast<std::uint32_t>(trials);

  cfg.master_seed = require_uint(require_key(root, "master_seed", "master_seed"), "master_seed");

  cfg.matcher = parse_matcher(require_key(root, "matcher", "matcher"));

  if (root.contains("marked_symbol")) {
    const std::uint64_t marked = require_uint(root.at("marked_symbol"), "marked_symbol");
    if (marked < 1 || marked > static_cast<std::uint64_t>(cfg.markov.alphabet_size))
      fail_field("marked_symbol", "must name a symbol in 1..alphabet_size");
    cfg.marked_symbol = static_cast<std::uint8_t>(marked);
  }

  if (root.contains("pattern_source")) {
    const json& src = root.at("pattern_source");
    if (!src.is_string()) fail_field("pattern_source", "must be a string");
    const std::string name = src.get<std::string>();
    if (name == "histogram")
      cfg.pattern_source = PatternSource::kHistogram;
    else if (name == "oracle")
      cfg.pattern_source = PatternSource::kOracle;
    else
      fail_field("pattern_source", "must be \"histogram\" or \"oracle\"");
  }

  if (root.contains("outputs")) {
    const json& outputs = require_object(root.at("outputs"), "outputs");
    check_keys(outputs, "outputs", {"summary_csv", "trials_jsonl"});
    if (outputs.contains("summary_csv")) {
      if (!outputs.at("summary_csv").is_string() || outputs.at("summary_csv").empty())
        fail_field("outputs.summary_csv", "must be a non-empty string");
      cfg.outputs.summary_csv = outputs.at("summary_csv").get<std::string>();
    }
    if (outputs.contains("trials_jsonl")) {
      if (!outputs.at("trials_jsonl").is_string() || outputs.at("trials_jsonl").empty())
        fail_field("outputs.trials_jsonl", "must be a non-empty string");
      cfg.outputs.trials_jsonl = outputs.at("trials_jsonl").get<std::string>();
    }
  }

  validate_cells(cfg, has_rates ? "growth_rates" : "m_list");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read config file: " + path);
  return parse_config(text);
}

TrialRecord run_trial(const ExperimentConfig& config, std::uint64_t m, std::uint32_t trial_index) {
  if (m < 1 || m > 0xffffffffull)
    throw ValidationError("m: trial database size must be in [1, 2^32)");
  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.m = m;
  const std::uint64_t trial_seed = derive_seed(config.master_seed, trial_index);
  rec.seed_database = derive_seed(trial_seed, kStageDatabase);
  rec.seed_permutation = derive_seed(trial_seed, kStagePermutation);
  rec.seed_pattern = derive_seed(trial_seed, kStagePattern);

  const auto start = std::chrono::steady_clock::now();
  try {
    const std::uint32_t rows = static_cast<std::uint32_t>(m);
    const Database db1 =
        generate_database(config.markov, rows, config.n, rec.seed_database, config.memory_budget);
    const Permutation theta = sample_permutation(rows, rec.seed_permutation);
    const RepetitionPattern s = sample_pattern(config.repetition, config.n, rec.seed_pattern);
    rec.true_s = s.s;
    const Database repeated =
        apply_repetitions(apply_permutation(db1, theta), s, config.memory_budget);

    DetectedPattern detected;
    if (config.pattern_source == PatternSource::kHistogram) {
      const HistogramVector h1 = column_histograms(collapse(db1, config.marked_symbol));
      const HistogramVector h2 = column_histograms(collapse(repeated, config.marked_symbol));
      rec.detection_duplicate = has_duplicate_counts(h1);
      detected = detect_pattern(h1, h2);
      rec.detection = detected.status;
      if (detected.status == DetectionStatus::kDetectionError) {
        // The scheme stops here and every row counts as failed.
        rec.row_errors = m;
        rec.row_error_rate = 1.0;
        rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        return rec;
      }
      if (detected.s_hat != s.s)
        throw PatternMismatch(
            "recovered pattern disagrees with the hidden truth in a duplicate-free trial");
    } else {
      detected.s_hat = s.s;
      detected.status = DetectionStatus::kRecovered;
      rec.detection = detected.status;
    }

    const ReducedDatabase red = reduce(repeated, detected);
    MatchResult match;
    if (config.matcher.method == MatcherConfig::Method::kConsistency) {
      match = match_consistency(db1, red);
    } else {
      MatcherConfig mc = config.matcher;
      mc.delta_for_typicality = config.repetition.delta();
      match = match_typicality(db1, red, config.markov, mc);
    }
    rec.collisions = match.collisions;
    rec.misses = match.misses;
    rec.row_errors = evaluate_errors(match, theta);
    rec.row_error_rate = static_cast<double>(rec.row_errors) / static_cast<double>(m);
  } catch (const Error& e) {
    throw Error("trial " + std::to_string(trial_index) + ": " + e.what());
  }
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int workers) {
  if (config.trials < 1) throw ValidationError("trials: must be at least 1");
  if (config.n < 1) throw ValidationError("n: must be at least 1");
  const std::vector<std::uint64_t> sizes = config.cell_sizes();
  if (sizes.empty())
    throw ValidationError("growth_rates: config defines no sweep cells");
  validate_cells(config, config.m_list.empty() ? "growth_rates" : "m_list");

  const double delta = config.repetition.delta();
  const double capacity = matching_capacity(config.markov, delta, 1e-10).capacity_bits;

  ExperimentResult out;
  for (const std::uint64_t m : sizes) {
    std::vector<TrialRecord> records(config.trials);
    parallel_for(config.trials, workers,
                 [&](std::uint32_t t) { records[t] = run_trial(config, m, t); });

    std::uint64_t pooled_errors = 0;
    std::uint64_t duplicates = 0;
    for (const TrialRecord& r : records) {
      pooled_errors += r.row_errors;
      duplicates += r.detection_duplicate ? 1 : 0;
    }
    const std::uint64_t pooled_rows = static_cast<std::uint64_t>(config.trials) * m;
    const WilsonInterval ci = wilson_interval(pooled_errors, pooled_rows);

    CellSummary cell;
    cell.n = config.n;
    cell.m = m;
    cell.r_realized = std::log2(static_cast<double>(m)) / static_cast<double>(config.n);
    cell.delta = delta;
    cell.gamma = config.markov.gamma;
    cell.capacity_bits = capacity;
    cell.trials = config.trials;
    cell.detection_error_rate =
        static_cast<double>(duplicates) / static_cast<double>(config.trials);
    cell.row_error_rate_mean =
        static_cast<double>(pooled_errors) / static_cast<double>(pooled_rows);
    cell.row_error_rate_ci_lo = ci.lo;
    cell.row_error_rate_ci_hi = ci.hi;
    out.cells.push_back(cell);
    out.trials.push_back(std::move(records));
  }
  return out;
}

std::string summary_csv_text(const ExperimentResult& result) {
  std::string out =
      "n,m,R_realized,delta,gamma,capacity_bits,trials,detection_error_rate,"
      "row_error_rate_mean,row_error_rate_ci_lo,row_error_rate_ci_hi\n";
  for (const CellSummary& cell : result.cells) out += format_summary_row(cell);
  return out;
}

std::string trials_jsonl_text(const ExperimentResult& result) {
  std::string out;
  for (const std::vector<TrialRecord>& cell : result.trials) {
    for (const TrialRecord& r : cell) {
      ordered_json rec;
      rec["trial"] = r.trial_index;
      rec["m"] = r.m;
      ordered_json seeds;
      seeds["database"] = r.seed_database;
      seeds["permutation"] = r.seed_permutation;
      seeds["pattern"] = r.seed_pattern;
      rec["seeds"] = std::move(seeds);
      rec["true_s"] = r.true_s;
      rec["detection"] =
          r.detection == DetectionStatus::kRecovered ? "recovered" : "detection_error";
      rec["detection_duplicate"] = r.detection_duplicate;
      rec["row_error_rate"] = r.row_error_rate;
      rec["collisions"] = r.collisions;
      rec["misses"] = r.misses;
      rec["wall_time_ms"] = r.wall_time_ms;
      out += rec.dump();
      out += '\n';
    }
  }
  return out;
}

void write_outputs(const ExperimentResult& result, const ExperimentConfig& config,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
  const auto write_file = [&](const std::string& name, const std::string& text) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw IoError("cannot write " + path.string());
  };
  write_file(config.outputs.summary_csv, summary_csv_text(result));
  write_file(config.outputs.trials_jsonl, trials_jsonl_text(result));
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t total) {
  WilsonInterval w;
  if (total == 0) return w;
  const double z = 1.959963984540054;  // two-sided 95%
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // At the boundary counts the analytic interval meets p exactly; rounding in
  // center - half can miss by an ulp, so pin the endpoints.
  w.lo = successes == 0 ? 0.0 : std::max(0.0, center - half);
  w.hi = successes == total ? 1.0 : std::min(1.0, center + half);
  return w;
}

std::vector<CollisionCell> collision_probe(const MarkovParams& markov,
                                           const std::vector<std::uint32_t>& n_list,
                                           const std::vector<std::uint64_t>& m_list,
                                           std::uint32_t trials, std::uint64_t seed,
                                           std::uint8_t marked_symbol) {
  if (n_list.empty() || m_list.empty())
    throw ValidationError("collision probe requires non-empty n and m lists");
  if (trials < 1) throw ValidationError("collision probe requires at least one trial");
  std::vector<CollisionCell> out;
  for (const std::uint32_t n : n_list) {
    if (n < 1) throw ValidationError("collision probe requires n >= 1");
    const std::uint64_t n_seed = derive_seed(seed, n);
    for (const std::uint64_t m : m_list) {
      if (m < 1 || m > 0xffffffffull)
        throw ValidationError("collision probe requires m in [1, 2^32)");
      const std::uint64_t cell_seed = derive_seed(n_seed, m);
      std::uint32_t duplicates = 0;
      for (std::uint32_t t = 0; t < trials; ++t) {
        const Database db = generate_database(markov, static_cast<std::uint32_t>(m), n,
                                              derive_seed(cell_seed, t));
        if (has_duplicate_counts(column_histograms(collapse(db, marked_symbol)))) ++duplicates;
      }
      CollisionCell cell;
      cell.n = n;
      cell.m = m;
      cell.trials = trials;
      cell.mu_hat = static_cast<double>(duplicates) / static_cast<double>(trials);
      out.push_back(cell);
    }
  }
  return out;
}

std::vector<CapacityRow> capacity_table(const MarkovParams& markov,
                                        const std::vector<double>& delta_list, double tolerance) {
  std::vector<CapacityRow> out;
  out.reserve(delta_list.size());
  for (const double delta : delta_list) {
    CapacityRow row;
    row.delta = delta;
    row.result = matching_capacity(markov, delta, tolerance);
    row.cross_check_ok = std::abs(row.result.capacity_bits - row.result.closed_form_bits) <=
                         row.result.tail_bound_bits + 1e-9;
    out.push_back(row);
  }
  return out;
}

}  // namespace dbmatch
