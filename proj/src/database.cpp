#include "dbmatch/database.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dbmatch/errors.hpp"

namespace dbmatch {

namespace {

// Per-state cumulative transition rows; sampling walks the row once. Works for
// any gamma in the admissible range (including negative values, where the
// "stay with probability gamma" shortcut would not).
struct SamplingTables {
  int k;
  std::vector<double> init_cdf;   // cumulative stationary law
  std::vector<double> trans_cdf;  // k rows of cumulative P
};

SamplingTables build_tables(const MarkovParams& params) {
  SamplingTables t;
  t.k = params.alphabet_size;
  t.init_cdf.resize(t.k);
  double acc = 0.0;
  for (int j = 0; j < t.k; ++j) {
    acc += params.u[j];
    t.init_cdf[j] = acc;
  }
  t.init_cdf[t.k - 1] = 1.0;
  const TransitionMatrix p = transition_power(params, 1);
  t.trans_cdf.resize(static_cast<std::size_t>(t.k) * t.k);
  for (int i = 0; i < t.k; ++i) {
    acc = 0.0;
    for (int j = 0; j < t.k; ++j) {
      acc += p(i, j);
      t.trans_cdf[static_cast<std::size_t>(i) * t.k + j] = acc;
    }
    t.trans_cdf[static_cast<std::size_t>(i) * t.k + t.k - 1] = 1.0;
  }
  return t;
}

std::uint8_t pick(const double* cdf, int k, double x) {
  int j = 0;
  while (j + 1 < k && x >= cdf[j]) ++j;
  return static_cast<std::uint8_t>(j + 1);  // symbols are 1-based
}

template <typename T>
void write_le(std::ostream& out, T v) {
  for (unsigned i = 0; i < sizeof(T); ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
T read_le(std::istream& in) {
  T v = 0;
  for (unsigned i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == EOF) throw ParseError("unexpected end of database file");
    v |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

Database generate_database(const MarkovParams& params, std::uint32_t m, std::uint32_t n,
                           std::uint64_t seed, std::uint64_t memory_budget) {
  const std::uint64_t bytes = static_cast<std::uint64_t>(m) * n;
  if (bytes > memory_budget) {
    std::ostringstream msg;
    msg << "database of " << m << "x" << n << " cells exceeds the memory budget of "
        << memory_budget << " bytes";
    throw DimensionOverflow(msg.str());
  }
  Database db;
  db.rows = m;
  db.cols = n;
  db.alphabet_size = static_cast<std::uint8_t>(params.alphabet_size);
  db.cells.resize(bytes);
  if (n == 0) return db;

  const SamplingTables tables = build_tables(params);
  for (std::uint32_t i = 0; i < m; ++i) {
    SplitMix64 rng(derive_seed(seed, i));
    std::uint8_t* row = db.cells.data() + static_cast<std::size_t>(i) * n;
    row[0] = pick(tables.init_cdf.data(), tables.k, rng.next_double());
    for (std::uint32_t j = 1; j < n; ++j) {
      const double* cdf = tables.trans_cdf.data() + static_cast<std::size_t>(row[j - 1] - 1) * tables.k;
      row[j] = pick(cdf, tables.k, rng.next_double());
    }
  }
  return db;
}

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.map.resize(map.size());
  for (std::uint32_t i = 0; i < map.size(); ++i) inv.map[map[i]] = i;
  return inv;
}

Permutation sample_permutation(std::uint32_t m, std::uint64_t seed) {
  Permutation p;
  p.map.resize(m);
  for (std::uint32_t i = 0; i < m; ++i) p.map[i] = i;
  SplitMix64 rng(seed);
  for (std::uint32_t i = m; i > 1; --i) {
    const std::uint32_t j = static_cast<std::uint32_t>(rng.next_below(i));
    std::swap(p.map[i - 1], p.map[j]);
  }
  return p;
}

Database apply_permutation(const Database& db, const Permutation& perm) {
  if (perm.map.size() != db.rows)
    throw SizeMismatch("permutation length does not match the row count");
  Database out;
  out.rows = db.rows;
  out.cols = db.cols;
  out.alphabet_size = db.alphabet_size;
  out.cells.resize(db.cells.size());
  for (std::uint32_t i = 0; i < db.rows; ++i)
    std::copy_n(db.cells.data() + static_cast<std::size_t>(i) * db.cols, db.cols,
                out.cells.data() + static_cast<std::size_t>(perm.map[i]) * db.cols);
  return out;
}

void save_database(const Database& db, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write("DBM1", 4);
  write_le(out, db.rows);
  write_le(out, db.cols);
  out.put(static_cast<char>(db.alphabet_size));
  out.write(reinterpret_cast<const char*>(db.cells.data()),
            static_cast<std::streamsize>(db.cells.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

Database load_database(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string_view(magic, 4) != "DBM1")
    throw ParseError("not a DBM1 database file: " + path.string());
  Database db;
  db.rows = read_le<std::uint32_t>(in);
  db.cols = read_le<std::uint32_t>(in);
  const int alpha = in.get();
  if (alpha == EOF) throw ParseError("unexpected end of database file");
  db.alphabet_size = static_cast<std::uint8_t>(alpha);
  const std::uint64_t bytes = static_cast<std::uint64_t>(db.rows) * db.cols;
  if (bytes > kDefaultMemoryBudget) throw DimensionOverflow("database file exceeds the memory budget");
  db.cells.resize(bytes);
  in.read(reinterpret_cast<char*>(db.cells.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::uint64_t>(in.gcount()) != bytes)
    throw ParseError("truncated database file: " + path.string());
  for (const std::uint8_t v : db.cells)
    if (v < 1 || v > db.alphabet_size) throw ParseError("cell value outside the alphabet");
  return db;
}

void write_database_csv(const Database& db, std::ostream& out) {
  for (std::uint32_t i = 0; i < db.rows; ++i) {
    for (std::uint32_t j = 0; j < db.cols; ++j) {
      if (j) out.put(',');
      out << static_cast<int>(db.at(i, j));
    }
    out.put('\n');
  }
}

}  // namespace dbmatch
