#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "dbmatch/markov.hpp"
#include "dbmatch/rng.hpp"

namespace dbmatch {

// Default cap on the cell buffer of a single database (2 GiB). Generation and
// repetition both refuse to allocate past it.
inline constexpr std::uint64_t kDefaultMemoryBudget = 2ull << 30;

// Dense row-major symbol matrix. Symbols are 1-based (1..alphabet_size) so 0
// stays free as the erasure marker used after reduction. The same structure
// holds generated databases and their channel outputs (whose column count is
// the repetition pattern's total width).
struct Database {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint8_t alphabet_size = 0;
  std::vector<std::uint8_t> cells;

  std::uint8_t at(std::uint32_t r, std::uint32_t c) const {
    return cells[static_cast<std::size_t>(r) * cols + c];
  }
  std::uint8_t& at(std::uint32_t r, std::uint32_t c) {
    return cells[static_cast<std::size_t>(r) * cols + c];
  }
  std::span<const std::uint8_t> row(std::uint32_t r) const {
    return {cells.data() + static_cast<std::size_t>(r) * cols, cols};
  }

  bool operator==(const Database&) const = default;
};

// m x n database of independent rows, each a stationary Markov chain under
// params. Row i consumes its own SplitMix64 stream seeded derive_seed(seed, i),
// so any row can be regenerated without the others and the result does not
// depend on generation order. Throws DimensionOverflow if m*n exceeds the
// budget.
Database generate_database(const MarkovParams& params, std::uint32_t m, std::uint32_t n,
                           std::uint64_t seed, std::uint64_t memory_budget = kDefaultMemoryBudget);

// Row shuffle. map[i] is the output position of input row i (0-based).
struct Permutation {
  std::vector<std::uint32_t> map;

  std::size_t size() const { return map.size(); }
  Permutation inverse() const;
};

// Uniformly random permutation of m rows via Fisher-Yates. m >= 1.
Permutation sample_permutation(std::uint32_t m, std::uint64_t seed);

// Output row perm.map[i] equals input row i. Throws SizeMismatch if the
// permutation length differs from the row count.
Database apply_permutation(const Database& db, const Permutation& perm);

// Binary serialization: magic "DBM1", then little-endian u32 rows, u32 cols,
// u8 alphabet_size, then the row-major cell bytes.
void save_database(const Database& db, const std::filesystem::path& path);
Database load_database(const std::filesystem::path& path);

// Plain comma-separated dump (one row per line), intended for eyeballing small
// instances.
void write_database_csv(const Database& db, std::ostream& out);

}  // namespace dbmatch
