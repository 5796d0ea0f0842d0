// SPDX-License-Identifier: Apache-2.0

// Timestamped weighted edge lists -> normalized sparse tensor.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "nnlft/tensor_store.hpp"

namespace nnlft {

struct RawRecord {
  std::string source_id;
  std::string target_id;
  double weight = 0.0;
  double timestamp = 0.0;
};

/// Token -> dense index, with the tokens kept in index order.
class IdMap {
 public:
  Index intern(const std::string& token);
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& token(Index index) const { return tokens_.at(index); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::unordered_map<std::string, Index> index_;
  std::vector<std::string> tokens_;
};

struct IngestManifest {
  IdMap id_map_i;
  IdMap id_map_j;
  std::size_t k_slots = 165;
  double t_min = 0.0;
  double t_max = 0.0;
  double w_min = 0.0;
  double w_max = 0.0;
  DuplicatePolicy duplicate_policy = DuplicatePolicy::Mean;
  std::size_t record_count = 0;
};

/// Four delimited fields per line: source, target, weight, timestamp. Lines
/// starting with '#' and blank lines are skipped. Throws ParseError with the
/// 1-based line number.
std::vector<RawRecord> parse_edge_list(std::istream& in, char delimiter);

/// floor((t - t_min) / (t_max - t_min) * k_slots), with t_max in the last slot.
Index bin_time(double timestamp, double t_min, double t_max, std::size_t k_slots);

/// Min-max map of [w_min, w_max] onto [0, 1].
double normalize_weight(double weight, double w_min, double w_max);
double denormalize_weight(double value, double w_min, double w_max) noexcept;

struct IngestResult {
  SparseTensor tensor;
  IngestManifest manifest;
};

IngestResult build_tensor(const std::vector<RawRecord>& records, std::size_t k_slots,
                          DuplicatePolicy policy = DuplicatePolicy::Mean);

/// Writes manifest.tsv, id_map_i.tsv and id_map_j.tsv into `dir`.
void save_manifest(const std::filesystem::path& dir, const IngestManifest& manifest);

}  // namespace nnlft
