#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dbmatch/harness.hpp"

namespace {

using namespace dbmatch;

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    out.push_back(text.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const std::string& tok : split_csv(text)) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": '" + tok + "' is not a number");
    }
    if (used != tok.size())
      throw ValidationError(std::string(what) + ": '" + tok + "' is not a number");
    out.push_back(value);
  }
  return out;
}

std::vector<std::uint64_t> parse_uints(const std::string& text, const char* what) {
  std::vector<std::uint64_t> out;
  for (const std::string& tok : split_csv(text)) {
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(tok, &used);
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": '" + tok + "' is not a non-negative integer");
    }
    if (used != tok.size() || tok.find('-') != std::string::npos)
      throw ValidationError(std::string(what) + ": '" + tok + "' is not a non-negative integer");
    out.push_back(value);
  }
  return out;
}

int run_capacity(const std::string& u_csv, double gamma, const std::string& delta_csv,
                 double tol) {
  const MarkovParams params = validate_params(gamma, parse_doubles(u_csv, "--u"));
  const std::vector<double> deltas = parse_doubles(delta_csv, "--delta-list");
  const std::vector<CapacityRow> rows = capacity_table(params, deltas, tol);
  std::printf("delta,capacity_bits,closed_form_bits,terms_used,tail_bound_bits,cross_check\n");
  for (const CapacityRow& row : rows)
    std::printf("%.6f,%.12f,%.12f,%d,%.3e,%s\n", row.delta, row.result.capacity_bits,
                row.result.closed_form_bits, row.result.terms_used, row.result.tail_bound_bits,
                row.cross_check_ok ? "ok" : "mismatch");
  return 0;
}

int run_simulate(const std::string& config_path, int workers, const std::string& out_dir) {
  ExperimentConfig config;
  try {
    config = load_config(config_path);
  } catch (const IoError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  const ExperimentResult result = run_experiment(config, workers);
  write_outputs(result, config, out_dir);
  std::fputs(summary_csv_text(result).c_str(), stdout);
  std::fprintf(stderr, "wrote %s and %s under %s\n", config.outputs.summary_csv.c_str(),
               config.outputs.trials_jsonl.c_str(), out_dir.c_str());
  return 0;
}

int run_collision_probe(const std::string& u_csv, double gamma, const std::string& n_csv,
                        const std::string& m_csv, std::uint32_t trials, std::uint64_t seed,
                        std::uint32_t marked) {
  const MarkovParams params = validate_params(gamma, parse_doubles(u_csv, "--u"));
  std::vector<std::uint32_t> n_list;
  for (const std::uint64_t n : parse_uints(n_csv, "--n-list")) {
    if (n < 1 || n > 0xffffffffull) throw ValidationError("--n-list: entries must be in [1, 2^32)");
    n_list.push_back(static_cast<std::uint32_t>(n));
  }
  const std::vector<std::uint64_t> m_list = parse_uints(m_csv, "--m-list");
  if (marked < 1 || marked > 255) throw ValidationError("--marked-symbol: must be in 1..255");
  const auto cells = collision_probe(params, n_list, m_list, trials, seed,
                                     static_cast<std::uint8_t>(marked));
  std::printf("n,m,trials,mu_hat\n");
  for (const CollisionCell& cell : cells)
    std::printf("%u,%llu,%u,%.6f\n", cell.n, static_cast<unsigned long long>(cell.m), cell.trials,
                cell.mu_hat);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Database matching under random column repetitions: capacity tables and "
               "seeded Monte Carlo experiments"};
  app.require_subcommand(1);

  double gamma = 0.0;
  std::string u_csv;
  std::string delta_csv;
  double tol = 1e-10;
  CLI::App* capacity = app.add_subcommand(
      "capacity", "Print the matching capacity for each deletion probability");
  capacity->add_option("--gamma", gamma, "Markov correlation parameter")->required();
  capacity->add_option("--u", u_csv, "stationary distribution, comma-separated")->required();
  capacity->add_option("--delta-list", delta_csv, "deletion probabilities, comma-separated")
      ->required();
  capacity->add_option("--tol", tol, "series truncation tolerance (default 1e-10)");

  std::string config_path;
  int workers = 1;
  std::string out_dir = ".";
  const auto add_simulate_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config JSON")->required();
    cmd->add_option("--workers", workers, "concurrent trials (default 1)")
        ->check(CLI::Range(1, 1024));
    cmd->add_option("--out-dir", out_dir, "directory for summary.csv and trials.jsonl");
  };
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run a configured Monte Carlo matching experiment");
  add_simulate_flags(simulate);
  CLI::App* sweep = app.add_subcommand("sweep", "Alias of simulate for multi-cell configs");
  add_simulate_flags(sweep);

  std::string n_csv;
  std::string m_csv;
  std::uint32_t trials = 0;
  std::uint64_t seed = 0;
  std::uint32_t marked = 1;
  CLI::App* probe = app.add_subcommand(
      "collision-probe", "Estimate the histogram duplicate probability per (n, m)");
  probe->add_option("--gamma", gamma, "Markov correlation parameter")->required();
  probe->add_option("--u", u_csv, "stationary distribution, comma-separated")->required();
  probe->add_option("--n-list", n_csv, "column counts, comma-separated")->required();
  probe->add_option("--m-list", m_csv, "row counts, comma-separated")->required();
  probe->add_option("--trials", trials, "trials per cell")->required();
  probe->add_option("--seed", seed, "base seed")->required();
  probe->add_option("--marked-symbol", marked, "symbol the collapse marks (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits clean, anything else is a usage error
  }

  try {
    if (capacity->parsed()) return run_capacity(u_csv, gamma, delta_csv, tol);
    if (simulate->parsed()) return run_simulate(config_path, workers, out_dir);
    if (sweep->parsed()) return run_simulate(config_path, workers, out_dir);
    if (probe->parsed()) return run_collision_probe(u_csv, gamma, n_csv, m_csv, trials, seed,
                                                    marked);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvalidDistribution& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const GammaOutOfRange& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvalidDelta& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const InvalidEpsilon& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
