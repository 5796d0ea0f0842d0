// SPDX-License-Identifier: Apache-2.0

#include "nnlft/tensor_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "nnlft/error.hpp"
#include "nnlft/random.hpp"
#include "nnlft/text_format.hpp"

namespace nnlft {

const char* to_string(DuplicatePolicy policy) noexcept {
  return policy == DuplicatePolicy::Mean ? "mean" : "last-wins";
}

DuplicatePolicy parse_duplicate_policy(std::string_view text) {
  if (text == "mean") return DuplicatePolicy::Mean;
  if (text == "last-wins") return DuplicatePolicy::LastWins;
  throw ConfigError("unknown duplicate policy '" + std::string(text) + "' (expected mean or last-wins)");
}

SparseTensor::SparseTensor(TensorShape shape) : shape_(shape) {
  if (shape.dim_i == 0 || shape.dim_j == 0 || shape.dim_k == 0) {
    throw ConfigError("tensor dimensions must all be >= 1");
  }
  constexpr auto index_max = static_cast<std::size_t>(std::numeric_limits<Index>::max());
  if (shape.dim_i > index_max || shape.dim_j > index_max || shape.dim_k > index_max ||
      shape.volume() >= 0x1.0p64) {
    throw ConfigError("tensor dimensions too large for 64-bit cell keys");
  }
}

std::uint64_t SparseTensor::key(const TensorShape& shape, Index i, Index j, Index k) noexcept {
  return (static_cast<std::uint64_t>(i) * shape.dim_j + j) * shape.dim_k + k;
}

bool SparseTensor::contains(Index i, Index j, Index k) const {
  return shape_.contains(i, j, k) && slot_.contains(key(shape_, i, j, k));
}

void SparseTensor::insert_or_merge(const Entry& candidate, DuplicatePolicy policy) {
  if (!shape_.contains(candidate.i, candidate.j, candidate.k)) {
    throw BoundsError("entry (" + std::to_string(candidate.i) + "," + std::to_string(candidate.j) + "," +
                      std::to_string(candidate.k) + ") outside tensor shape");
  }
  const auto [it, inserted] = slot_.try_emplace(key(shape_, candidate.i, candidate.j, candidate.k), entries_.size());
  if (inserted) {
    entries_.push_back(candidate);
    merged_.push_back(1);
    return;
  }
  Entry& existing = entries_[it->second];
  auto& count = merged_[it->second];
  if (policy == DuplicatePolicy::LastWins) {
    existing.value = candidate.value;
    count = 1;
  } else {
    existing.value = (existing.value * count + candidate.value) / (count + 1);
    ++count;
  }
}

double density(const TensorShape& shape, std::size_t entry_count) noexcept {
  return static_cast<double>(entry_count) / shape.volume();
}

double density(const SparseTensor& tensor) noexcept { return density(tensor.shape(), tensor.size()); }

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  const std::array<double, 3> r{ratios.train, ratios.validation, ratios.test};
  for (double x : r) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("split ratios must be positive");
  }
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");

  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = static_cast<double>(n) * r[s];
    sizes[s] = static_cast<std::size_t>(std::floor(exact));
    remainder[s] = exact - static_cast<double>(sizes[s]);
    assigned += sizes[s];
  }
  // Rounding can push the floors past n when a product lands just above an integer.
  while (assigned > n) {
    const auto s = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    --sizes[s];
    --assigned;
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t t = 0; assigned < n; t = (t + 1) % 3, ++assigned) ++sizes[order[t]];

  if (n >= 3 && (sizes[0] == 0 || sizes[1] == 0 || sizes[2] == 0)) {
    throw ConfigError("split ratios leave an empty subset for " + std::to_string(n) + " entries");
  }
  return sizes;
}

SplitAssignment split(const SparseTensor& tensor, const SplitRatios& ratios, std::uint64_t seed) {
  const auto sizes = split_sizes(tensor.size(), ratios);
  std::vector<std::size_t> order(tensor.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0x5b117));
  rng.shuffle(std::span<std::size_t>(order));

  SplitAssignment out;
  out.seed = seed;
  const auto first = order.begin();
  out.train.assign(first, first + sizes[0]);
  out.validation.assign(first + sizes[0], first + sizes[0] + sizes[1]);
  out.test.assign(first + sizes[0] + sizes[1], order.end());
  return out;
}

std::vector<Entry> gather(const SparseTensor& tensor, std::span<const std::size_t> positions) {
  std::vector<Entry> out;
  out.reserve(positions.size());
  for (auto p : positions) out.push_back(tensor[p]);
  return out;
}

void write_tensor(std::ostream& out, const SparseTensor& tensor) {
  const auto& shape = tensor.shape();
  out << "#shape\t" << shape.dim_i << '\t' << shape.dim_j << '\t' << shape.dim_k << '\n';
  for (const auto& e : tensor.entries()) {
    out << e.i << '\t' << e.j << '\t' << e.k << '\t' << text::format_double(e.value) << '\n';
  }
}

SparseTensor read_tensor(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<SparseTensor> tensor;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = text::trim(line);
    if (view.empty()) continue;
    const auto fields = text::split_fields(view, '\t');
    if (!tensor) {
      std::uint64_t d[3];
      if (fields.size() != 4 || fields[0] != "#shape" || !text::parse_uint(fields[1], d[0]) ||
          !text::parse_uint(fields[2], d[1]) || !text::parse_uint(fields[3], d[2])) {
        throw ParseError("expected '#shape<TAB>I<TAB>J<TAB>K' header", line_no);
      }
      try {
        tensor.emplace(TensorShape{d[0], d[1], d[2]});
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), line_no);
      }
      continue;
    }
    if (view.front() == '#') continue;
    std::uint64_t i, j, k;
    double value;
    if (fields.size() != 4 || !text::parse_uint(fields[0], i) || !text::parse_uint(fields[1], j) ||
        !text::parse_uint(fields[2], k) || !text::parse_double(fields[3], value) || !std::isfinite(value)) {
      throw ParseError("expected 'i<TAB>j<TAB>k<TAB>value'", line_no);
    }
    if (!tensor->shape().contains(static_cast<Index>(i), static_cast<Index>(j), static_cast<Index>(k)) ||
        i > UINT32_MAX || j > UINT32_MAX || k > UINT32_MAX) {
      throw ParseError("entry index outside declared shape", line_no);
    }
    if (tensor->contains(static_cast<Index>(i), static_cast<Index>(j), static_cast<Index>(k))) {
      throw ParseError("duplicate (i,j,k) triple", line_no);
    }
    tensor->insert_or_merge({static_cast<Index>(i), static_cast<Index>(j), static_cast<Index>(k), value});
  }
  if (!tensor) throw ParseError("missing '#shape' header", line_no + 1);
  return std::move(*tensor);
}

void save_tensor(const std::filesystem::path& path, const SparseTensor& tensor) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_tensor(out, tensor);
  if (!out) throw DataError("failed writing " + path.string());
}

SparseTensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_tensor(in);
}

}  // namespace nnlft
