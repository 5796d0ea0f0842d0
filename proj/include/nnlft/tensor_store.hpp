// SPDX-License-Identifier: Apache-2.0

// Coordinate-form storage for a high-dimensional incomplete 3-way tensor.
// Only the known entries are stored; every other cell is unobserved.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nnlft {

using Index = std::uint32_t;

struct TensorShape {
  std::size_t dim_i = 1;
  std::size_t dim_j = 1;
  std::size_t dim_k = 1;

  double volume() const noexcept {
    return static_cast<double>(dim_i) * static_cast<double>(dim_j) * static_cast<double>(dim_k);
  }

  bool contains(Index i, Index j, Index k) const noexcept {
    return i < dim_i && j < dim_j && k < dim_k;
  }

  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

struct Entry {
  Index i = 0;
  Index j = 0;
  Index k = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

enum class DuplicatePolicy { Mean, LastWins };

const char* to_string(DuplicatePolicy policy) noexcept;
/// Accepts "mean" and "last-wins"; throws ConfigError otherwise.
DuplicatePolicy parse_duplicate_policy(std::string_view text);

/// Known-entry set of a tensor. No two entries share an (i, j, k) triple.
class SparseTensor {
 public:
  explicit SparseTensor(TensorShape shape);

  const TensorShape& shape() const noexcept { return shape_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const Entry& operator[](std::size_t n) const { return entries_[n]; }

  /// Appends `candidate`, or merges it into the existing entry at the same
  /// triple. Throws BoundsError when the triple lies outside the shape.
  void insert_or_merge(const Entry& candidate, DuplicatePolicy policy = DuplicatePolicy::Mean);

  bool contains(Index i, Index j, Index k) const;

 private:
  static std::uint64_t key(const TensorShape& shape, Index i, Index j, Index k) noexcept;

  TensorShape shape_;
  std::vector<Entry> entries_;
  std::unordered_map<std::uint64_t, std::size_t> slot_;
  // Number of observations merged into each entry; drives the running mean.
  std::vector<std::uint32_t> merged_;
};

/// |known entries| / (dim_i * dim_j * dim_k).
double density(const SparseTensor& tensor) noexcept;
double density(const TensorShape& shape, std::size_t entry_count) noexcept;

struct SplitRatios {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

/// Partition of entry positions into train/validation/test.
struct SplitAssignment {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Block sizes for `n` items by largest-remainder rounding; they sum to n.
/// Ties on the fractional part go to the earlier block.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

/// Seeded uniform permutation of [0, |entries|) cut into contiguous blocks.
SplitAssignment split(const SparseTensor& tensor, const SplitRatios& ratios, std::uint64_t seed);

/// Copies the entries selected by `positions`.
std::vector<Entry> gather(const SparseTensor& tensor, std::span<const std::size_t> positions);

// Text form: "#shape\tI\tJ\tK" header, then one "i\tj\tk\tvalue" line per entry.
void write_tensor(std::ostream& out, const SparseTensor& tensor);
SparseTensor read_tensor(std::istream& in);
void save_tensor(const std::filesystem::path& path, const SparseTensor& tensor);
SparseTensor load_tensor(const std::filesystem::path& path);

}  // namespace nnlft
