// Python bindings for the dbmatch core. The surface mirrors the C++ API:
// validated parameter construction, capacity evaluation, the
// generate/permute/repeat/detect/reduce/match pipeline, and the experiment
// harness. Cell matrices cross the boundary as numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "dbmatch/harness.hpp"

namespace py = pybind11;
using namespace dbmatch;

namespace {

py::array_t<std::uint8_t> cells_to_numpy(std::uint32_t rows, std::uint32_t cols,
                                         const std::vector<std::uint8_t>& cells) {
  py::array_t<std::uint8_t> out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  if (!cells.empty()) std::memcpy(out.mutable_data(), cells.data(), cells.size());
  return out;
}

// Shared shape/content checks for arrays entering Database / ReducedDatabase.
// allow_erased admits 0 cells (the erasure marker) on top of 1..alphabet_size.
std::vector<std::uint8_t> cells_from_numpy(const py::array_t<std::uint8_t, py::array::c_style>& a,
                                           int alphabet_size, bool allow_erased,
                                           std::uint32_t* rows, std::uint32_t* cols) {
  if (a.ndim() != 2) throw ValidationError("array: expected a 2-d uint8 array");
  if (alphabet_size < 2 || alphabet_size > 256)
    throw InvalidDistribution("alphabet_size: must be in [2, 256]");
  *rows = static_cast<std::uint32_t>(a.shape(0));
  *cols = static_cast<std::uint32_t>(a.shape(1));
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(*rows) * *cols);
  if (!cells.empty()) std::memcpy(cells.data(), a.data(), cells.size());
  for (const std::uint8_t v : cells) {
    const bool ok = (allow_erased && v == kErased) ||
                    (v >= 1 && static_cast<int>(v) <= alphabet_size);
    if (!ok)
      throw SymbolOutOfRange("array: cell value " + std::to_string(int(v)) +
                             " outside 1.." + std::to_string(alphabet_size) +
                             (allow_erased ? " (0 allowed as erasure)" : ""));
  }
  return cells;
}

Permutation permutation_from_list(std::vector<std::uint32_t> map) {
  std::vector<bool> seen(map.size(), false);
  for (const std::uint32_t v : map) {
    if (v >= map.size() || seen[v])
      throw ValidationError("permutation: map is not a bijection on 0..m-1");
    seen[v] = true;
  }
  Permutation perm;
  perm.map = std::move(map);
  return perm;
}

template <typename T>
std::string vec_preview(const std::vector<T>& v) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < v.size() && i < 8; ++i) {
    if (i) out << ", ";
    out << v[i];
  }
  if (v.size() > 8) out << ", ...";
  out << "]";
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Database matching under random column repetitions: Markov-row database "
            "generation, the repetition channel, histogram pattern detection, row "
            "matchers, capacity evaluation, and the simulation harness.";

  // Exception hierarchy: every library error derives from dbmatch.Error.
  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidDistribution>(m, "InvalidDistribution", base);
  py::register_exception<GammaOutOfRange>(m, "GammaOutOfRange", base);
  py::register_exception<InvalidDelta>(m, "InvalidDelta", base);
  py::register_exception<SizeMismatch>(m, "SizeMismatch", base);
  py::register_exception<WidthMismatch>(m, "WidthMismatch", base);
  py::register_exception<RowCountMismatch>(m, "RowCountMismatch", base);
  py::register_exception<PatternMismatch>(m, "PatternMismatch", base);
  py::register_exception<SymbolOutOfRange>(m, "SymbolOutOfRange", base);
  py::register_exception<InvalidEpsilon>(m, "InvalidEpsilon", base);
  py::register_exception<DimensionOverflow>(m, "DimensionOverflow", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<IoError>(m, "IoError", base);

  m.attr("ERASED") = int(kErased);
  m.attr("UNMATCHED") = py::int_(kUnmatched);
  m.attr("DEFAULT_MEMORY_BUDGET") = py::int_(kDefaultMemoryBudget);
  m.attr("STAGE_DATABASE") = py::int_(kStageDatabase);
  m.attr("STAGE_PERMUTATION") = py::int_(kStagePermutation);
  m.attr("STAGE_PATTERN") = py::int_(kStagePattern);

  m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("stream"),
        "Deterministic child seed for (seed, stream); used for per-trial and "
        "per-stage randomness.");

  // Row model and capacity.
  py::class_<MarkovParams>(m, "MarkovParams")
      .def_readonly("alphabet_size", &MarkovParams::alphabet_size)
      .def_readonly("gamma", &MarkovParams::gamma)
      .def_readonly("u", &MarkovParams::u)
      .def("__repr__", [](const MarkovParams& p) {
        std::ostringstream out;
        out << "MarkovParams(alphabet_size=" << p.alphabet_size << ", gamma=" << p.gamma
            << ", u=" << vec_preview(p.u) << ")";
        return out.str();
      });

  m.def("validate_params", &validate_params, py::arg("gamma"), py::arg("u"),
        "Validated row-model parameters; u is renormalized to sum exactly 1.");
  m.def("gamma_lower_bound",
        [](const std::vector<double>& u) { return gamma_lower_bound(u); }, py::arg("u"),
        "Infimum of valid gamma for the stationary law u.");
  m.def("shannon_entropy_bits",
        [](const std::vector<double>& p) { return shannon_entropy_bits(p); }, py::arg("p"),
        "Shannon entropy in bits with 0 log 0 = 0.");
  m.def("conditional_entropy_rate", &conditional_entropy_rate, py::arg("params"), py::arg("gap"),
        "Entropy in bits of a symbol given the symbol gap+1 steps earlier.");
  m.def(
      "transition_power",
      [](const MarkovParams& params, int power) {
        const TransitionMatrix t = transition_power(params, power);
        py::array_t<double> out(
            {static_cast<py::ssize_t>(t.size), static_cast<py::ssize_t>(t.size)});
        std::memcpy(out.mutable_data(), t.entries.data(), t.entries.size() * sizeof(double));
        return out;
      },
      py::arg("params"), py::arg("power"),
      "P^power as a dense numpy matrix (closed form, power >= 1).");

  py::class_<CapacityResult>(m, "CapacityResult")
      .def_readonly("capacity_bits", &CapacityResult::capacity_bits)
      .def_readonly("terms_used", &CapacityResult::terms_used)
      .def_readonly("tail_bound_bits", &CapacityResult::tail_bound_bits)
      .def_readonly("closed_form_bits", &CapacityResult::closed_form_bits)
      .def("__repr__", [](const CapacityResult& r) {
        std::ostringstream out;
        out << "CapacityResult(capacity_bits=" << r.capacity_bits
            << ", terms_used=" << r.terms_used << ", tail_bound_bits=" << r.tail_bound_bits
            << ", closed_form_bits=" << r.closed_form_bits << ")";
        return out.str();
      });

  m.def("matching_capacity", &matching_capacity, py::arg("params"), py::arg("delta"),
        py::arg("tolerance") = 1e-10,
        "Matching capacity in bits per column for deletion probability delta, with a "
        "certified truncation bound and an independent closed-form cross-check.");
  m.def("iid_capacity", &iid_capacity, py::arg("p_x"), py::arg("delta"),
        "Memoryless special case (1 - delta) * H(p_x).");

  // Databases and the channel.
  py::class_<Database>(m, "Database")
      .def_readonly("rows", &Database::rows)
      .def_readonly("cols", &Database::cols)
      .def_readonly("alphabet_size", &Database::alphabet_size)
      .def("to_numpy",
           [](const Database& db) { return cells_to_numpy(db.rows, db.cols, db.cells); },
           "Cell matrix as a (rows, cols) uint8 array copy.")
      .def("__eq__", [](const Database& a, const Database& b) { return a == b; })
      .def("__repr__", [](const Database& db) {
        std::ostringstream out;
        out << "Database(rows=" << db.rows << ", cols=" << db.cols
            << ", alphabet_size=" << int(db.alphabet_size) << ")";
        return out.str();
      });

  m.def(
      "database_from_array",
      [](const py::array_t<std::uint8_t, py::array::c_style>& a, int alphabet_size) {
        Database db;
        if (alphabet_size < 2 || alphabet_size > 255)
          throw InvalidDistribution("alphabet_size: must be in [2, 255]");
        db.alphabet_size = static_cast<std::uint8_t>(alphabet_size);
        db.cells = cells_from_numpy(a, alphabet_size, false, &db.rows, &db.cols);
        return db;
      },
      py::arg("array"), py::arg("alphabet_size"),
      "Wrap a (rows, cols) uint8 array with 1-based symbols as a Database.");

  m.def("generate_database", &generate_database, py::arg("params"), py::arg("m"), py::arg("n"),
        py::arg("seed"), py::arg("memory_budget") = kDefaultMemoryBudget,
        py::call_guard<py::gil_scoped_release>(),
        "m x n database of independent stationary Markov rows.");

  py::class_<Permutation>(m, "Permutation")
      .def(py::init(&permutation_from_list), py::arg("map"))
      .def_readonly("map", &Permutation::map)
      .def("__len__", &Permutation::size)
      .def("inverse", &Permutation::inverse)
      .def("__repr__", [](const Permutation& p) {
        return "Permutation(map=" + vec_preview(p.map) + ")";
      });

  m.def("sample_permutation", &sample_permutation, py::arg("m"), py::arg("seed"),
        "Uniform row shuffle of m rows.");
  m.def("apply_permutation", &apply_permutation, py::arg("db"), py::arg("perm"),
        "Output row perm.map[i] equals input row i.");
  m.def("save_database", &save_database, py::arg("db"), py::arg("path"),
        "Binary serialization (magic DBM1).");
  m.def("load_database", &load_database, py::arg("path"));

  py::class_<RepetitionDistribution>(m, "RepetitionDistribution")
      .def_readonly("probs", &RepetitionDistribution::probs)
      .def_property_readonly("s_max", &RepetitionDistribution::s_max)
      .def_property_readonly("delta", &RepetitionDistribution::delta)
      .def("__repr__", [](const RepetitionDistribution& d) {
        return "RepetitionDistribution(probs=" + vec_preview(d.probs) + ")";
      });

  m.def("validate_repetition", &validate_repetition, py::arg("probs"),
        "Validated per-column repetition-count distribution; probs[0] is the deletion "
        "probability delta.");

  py::class_<RepetitionPattern>(m, "RepetitionPattern")
      .def(py::init([](std::vector<std::uint32_t> s) {
             RepetitionPattern p;
             p.s = std::move(s);
             return p;
           }),
           py::arg("s"))
      .def_readonly("s", &RepetitionPattern::s)
      .def_property_readonly("total_width", &RepetitionPattern::total_width)
      .def("__eq__",
           [](const RepetitionPattern& a, const RepetitionPattern& b) { return a == b; })
      .def("__repr__", [](const RepetitionPattern& p) {
        return "RepetitionPattern(s=" + vec_preview(p.s) + ")";
      });

  m.def("sample_pattern", &sample_pattern, py::arg("dist"), py::arg("n"), py::arg("seed"),
        "n i.i.d. repetition counts.");
  m.def("apply_repetitions", &apply_repetitions, py::arg("db"), py::arg("pattern"),
        py::arg("memory_budget") = kDefaultMemoryBudget,
        py::call_guard<py::gil_scoped_release>(),
        "Column j of db appears pattern.s[j] times contiguously.");
  m.def("pattern_to_json", &pattern_to_json, py::arg("pattern"));
  m.def("pattern_from_json", &pattern_from_json, py::arg("text"));

  // Pattern detection.
  py::enum_<DetectionStatus>(m, "DetectionStatus")
      .value("RECOVERED", DetectionStatus::kRecovered)
      .value("DETECTION_ERROR", DetectionStatus::kDetectionError);

  py::class_<HistogramVector>(m, "HistogramVector")
      .def_readonly("counts", &HistogramVector::counts)
      .def_readonly("row_count", &HistogramVector::row_count)
      .def("__repr__", [](const HistogramVector& h) {
        std::ostringstream out;
        out << "HistogramVector(counts=" << vec_preview(h.counts) << ", row_count=" << h.row_count
            << ")";
        return out.str();
      });

  py::class_<DetectedPattern>(m, "DetectedPattern")
      .def(py::init<>())
      .def(py::init([](std::vector<std::uint32_t> s_hat, DetectionStatus status) {
             DetectedPattern p;
             p.s_hat = std::move(s_hat);
             p.status = status;
             return p;
           }),
           py::arg("s_hat"), py::arg("status") = DetectionStatus::kRecovered)
      .def_readonly("s_hat", &DetectedPattern::s_hat)
      .def_readonly("status", &DetectedPattern::status)
      .def("__repr__", [](const DetectedPattern& p) {
        std::ostringstream out;
        out << "DetectedPattern(s_hat=" << vec_preview(p.s_hat) << ", status="
            << (p.status == DetectionStatus::kRecovered ? "RECOVERED" : "DETECTION_ERROR") << ")";
        return out.str();
      });

  m.def("collapse", &collapse, py::arg("db"), py::arg("marked_symbol"),
        "Binary view: marked symbol -> 1, everything else -> 2.");
  m.def("column_histograms", &column_histograms, py::arg("collapsed"),
        "Per-column tallies of the symbol 2 in a collapsed database.");
  m.def("has_duplicate_counts", &has_duplicate_counts, py::arg("histogram"));
  m.def("detect_pattern", &detect_pattern, py::arg("source"), py::arg("output"),
        "Recover the repetition pattern from source and channel-output histograms.");

  // Matching.
  py::class_<ReducedDatabase>(m, "ReducedDatabase")
      .def_readonly("rows", &ReducedDatabase::rows)
      .def_readonly("cols", &ReducedDatabase::cols)
      .def_readonly("alphabet_size", &ReducedDatabase::alphabet_size)
      .def("to_numpy",
           [](const ReducedDatabase& db) { return cells_to_numpy(db.rows, db.cols, db.cells); },
           "Cell matrix as a (rows, cols) uint8 array copy; 0 marks erased columns.")
      .def("__eq__", [](const ReducedDatabase& a, const ReducedDatabase& b) { return a == b; })
      .def("__repr__", [](const ReducedDatabase& db) {
        std::ostringstream out;
        out << "ReducedDatabase(rows=" << db.rows << ", cols=" << db.cols
            << ", alphabet_size=" << int(db.alphabet_size) << ")";
        return out.str();
      });

  m.def(
      "reduced_from_array",
      [](const py::array_t<std::uint8_t, py::array::c_style>& a, int alphabet_size) {
        ReducedDatabase db;
        if (alphabet_size < 2 || alphabet_size > 255)
          throw InvalidDistribution("alphabet_size: must be in [2, 255]");
        db.alphabet_size = static_cast<std::uint8_t>(alphabet_size);
        db.cells = cells_from_numpy(a, alphabet_size, true, &db.rows, &db.cols);
        return db;
      },
      py::arg("array"), py::arg("alphabet_size"),
      "Wrap a (rows, cols) uint8 array as a ReducedDatabase; 0 cells are erasures.");

  m.def("reduce", &reduce, py::arg("repeated"), py::arg("pattern"),
        "Fold a recovered pattern back onto channel output: replicas collapse to their "
        "first column, deletions become all-erased columns.");

  py::enum_<MatcherConfig::Method>(m, "MatchMethod")
      .value("CONSISTENCY", MatcherConfig::Method::kConsistency)
      .value("TYPICALITY", MatcherConfig::Method::kTypicality);

  py::class_<MatcherConfig>(m, "MatcherConfig")
      .def(py::init([](MatcherConfig::Method method, double epsilon, double delta_for_typicality) {
             MatcherConfig c;
             c.method = method;
             c.epsilon = epsilon;
             c.delta_for_typicality = delta_for_typicality;
             return c;
           }),
           py::arg("method") = MatcherConfig::Method::kConsistency, py::arg("epsilon") = 0.0,
           py::arg("delta_for_typicality") = 0.0)
      .def_readwrite("method", &MatcherConfig::method)
      .def_readwrite("epsilon", &MatcherConfig::epsilon)
      .def_readwrite("delta_for_typicality", &MatcherConfig::delta_for_typicality);

  py::class_<MatchResult>(m, "MatchResult")
      .def_property_readonly("assignment",
                             [](const MatchResult& r) {
                               py::array_t<std::uint32_t> out(
                                   static_cast<py::ssize_t>(r.assignment.size()));
                               if (!r.assignment.empty())
                                 std::memcpy(out.mutable_data(), r.assignment.data(),
                                             r.assignment.size() * sizeof(std::uint32_t));
                               return out;
                             },
                             "assignment[l] = source row matched to reduced row l, or UNMATCHED.")
      .def_readonly("collisions", &MatchResult::collisions)
      .def_readonly("misses", &MatchResult::misses)
      .def("__repr__", [](const MatchResult& r) {
        std::ostringstream out;
        out << "MatchResult(rows=" << r.assignment.size() << ", collisions=" << r.collisions
            << ", misses=" << r.misses << ")";
        return out.str();
      });

  m.def("match_consistency", &match_consistency, py::arg("db1"), py::arg("reduced"),
        py::call_guard<py::gil_scoped_release>(),
        "Assign each reduced row its unique consistent source row; ties are unmatched.");
  m.def("match_typicality", &match_typicality, py::arg("db1"), py::arg("reduced"),
        py::arg("params"), py::arg("config"), py::call_guard<py::gil_scoped_release>(),
        "Consistency plus per-row and joint empirical-entropy windows of width epsilon.");
  m.def("evaluate_errors", &evaluate_errors, py::arg("result"), py::arg("truth"),
        "Number of source rows not mapped back to themselves.");
  m.def("evaluate", &evaluate, py::arg("result"), py::arg("truth"),
        "Fraction of source rows not mapped back to themselves.");

  // Harness.
  py::enum_<PatternSource>(m, "PatternSource")
      .value("HISTOGRAM", PatternSource::kHistogram)
      .value("ORACLE", PatternSource::kOracle);

  py::class_<OutputPaths>(m, "OutputPaths")
      .def_readonly("summary_csv", &OutputPaths::summary_csv)
      .def_readonly("trials_jsonl", &OutputPaths::trials_jsonl);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("markov", &ExperimentConfig::markov)
      .def_readonly("repetition", &ExperimentConfig::repetition)
      .def_readonly("n", &ExperimentConfig::n)
      .def_readonly("growth_rates", &ExperimentConfig::growth_rates)
      .def_readonly("m_list", &ExperimentConfig::m_list)
      .def_readonly("trials", &ExperimentConfig::trials)
      .def_readonly("master_seed", &ExperimentConfig::master_seed)
      .def_readonly("matcher", &ExperimentConfig::matcher)
      .def_readonly("marked_symbol", &ExperimentConfig::marked_symbol)
      .def_readonly("pattern_source", &ExperimentConfig::pattern_source)
      .def_readonly("outputs", &ExperimentConfig::outputs)
      .def_readonly("memory_budget", &ExperimentConfig::memory_budget)
      .def("cell_sizes", &ExperimentConfig::cell_sizes)
      .def("__repr__", [](const ExperimentConfig& c) {
        std::ostringstream out;
        out << "ExperimentConfig(n=" << c.n << ", cells=" << c.cell_sizes().size()
            << ", trials=" << c.trials << ", master_seed=" << c.master_seed << ")";
        return out.str();
      });

  m.def("parse_config", &parse_config, py::arg("json_text"),
        "Parse and validate an experiment config from JSON text.");
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("trial_index", &TrialRecord::trial_index)
      .def_readonly("m", &TrialRecord::m)
      .def_readonly("seed_database", &TrialRecord::seed_database)
      .def_readonly("seed_permutation", &TrialRecord::seed_permutation)
      .def_readonly("seed_pattern", &TrialRecord::seed_pattern)
      .def_readonly("true_s", &TrialRecord::true_s)
      .def_readonly("detection_duplicate", &TrialRecord::detection_duplicate)
      .def_readonly("detection", &TrialRecord::detection)
      .def_readonly("row_errors", &TrialRecord::row_errors)
      .def_readonly("row_error_rate", &TrialRecord::row_error_rate)
      .def_readonly("collisions", &TrialRecord::collisions)
      .def_readonly("misses", &TrialRecord::misses)
      .def_readonly("wall_time_ms", &TrialRecord::wall_time_ms);

  m.def("run_trial", &run_trial, py::arg("config"), py::arg("m"), py::arg("trial_index"),
        py::call_guard<py::gil_scoped_release>(),
        "One full pipeline pass; deterministic except wall_time_ms.");

  py::class_<CellSummary>(m, "CellSummary")
      .def_readonly("n", &CellSummary::n)
      .def_readonly("m", &CellSummary::m)
      .def_readonly("r_realized", &CellSummary::r_realized)
      .def_readonly("delta", &CellSummary::delta)
      .def_readonly("gamma", &CellSummary::gamma)
      .def_readonly("capacity_bits", &CellSummary::capacity_bits)
      .def_readonly("trials", &CellSummary::trials)
      .def_readonly("detection_error_rate", &CellSummary::detection_error_rate)
      .def_readonly("row_error_rate_mean", &CellSummary::row_error_rate_mean)
      .def_readonly("row_error_rate_ci_lo", &CellSummary::row_error_rate_ci_lo)
      .def_readonly("row_error_rate_ci_hi", &CellSummary::row_error_rate_ci_hi)
      .def("__repr__", [](const CellSummary& c) {
        std::ostringstream out;
        out << "CellSummary(n=" << c.n << ", m=" << c.m
            << ", row_error_rate_mean=" << c.row_error_rate_mean << ")";
        return out.str();
      });

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("cells", &ExperimentResult::cells)
      .def_readonly("trials", &ExperimentResult::trials);

  m.def("run_experiment", &run_experiment, py::arg("config"), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>(),
        "Run every sweep cell; byte-identical output across runs and worker counts "
        "(wall_time_ms aside).");
  m.def("summary_csv_text", &summary_csv_text, py::arg("result"));
  m.def("trials_jsonl_text", &trials_jsonl_text, py::arg("result"));
  m.def("write_outputs", &write_outputs, py::arg("result"), py::arg("config"),
        py::arg("out_dir"));

  py::class_<WilsonInterval>(m, "WilsonInterval")
      .def_readonly("lo", &WilsonInterval::lo)
      .def_readonly("hi", &WilsonInterval::hi)
      .def("__repr__", [](const WilsonInterval& w) {
        std::ostringstream out;
        out << "WilsonInterval(lo=" << w.lo << ", hi=" << w.hi << ")";
        return out.str();
      });

  m.def("wilson_interval", &wilson_interval, py::arg("successes"), py::arg("total"),
        "95% Wilson score interval for a proportion.");

  py::class_<CollisionCell>(m, "CollisionCell")
      .def_readonly("n", &CollisionCell::n)
      .def_readonly("m", &CollisionCell::m)
      .def_readonly("trials", &CollisionCell::trials)
      .def_readonly("mu_hat", &CollisionCell::mu_hat)
      .def("__repr__", [](const CollisionCell& c) {
        std::ostringstream out;
        out << "CollisionCell(n=" << c.n << ", m=" << c.m << ", mu_hat=" << c.mu_hat << ")";
        return out.str();
      });

  m.def("collision_probe", &collision_probe, py::arg("markov"), py::arg("n_list"),
        py::arg("m_list"), py::arg("trials"), py::arg("seed"), py::arg("marked_symbol") = 1,
        py::call_guard<py::gil_scoped_release>(),
        "Empirical probability of duplicate column histogram counts per (n, m) cell.");

  py::class_<CapacityRow>(m, "CapacityRow")
      .def_readonly("delta", &CapacityRow::delta)
      .def_readonly("result", &CapacityRow::result)
      .def_readonly("cross_check_ok", &CapacityRow::cross_check_ok);

  m.def("capacity_table", &capacity_table, py::arg("markov"), py::arg("delta_list"),
        py::arg("tolerance") = 1e-10,
        "Capacity per delta with the series/closed-form cross-check verdict.");
}
