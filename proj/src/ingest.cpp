// SPDX-License-Identifier: Apache-2.0

#include "nnlft/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "nnlft/error.hpp"
#include "nnlft/text_format.hpp"

namespace nnlft {

Index IdMap::intern(const std::string& token) {
  const auto [it, inserted] = index_.try_emplace(token, static_cast<Index>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::vector<RawRecord> parse_edge_list(std::istream& in, char delimiter) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = text::trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = text::split_fields(view, delimiter);
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields (source, target, weight, timestamp), got " + std::to_string(fields.size()),
                       line_no);
    }
    RawRecord rec{std::string(text::trim(fields[0])), std::string(text::trim(fields[1])), 0.0, 0.0};
    if (rec.source_id.empty() || rec.target_id.empty()) throw ParseError("empty node id", line_no);
    if (!text::parse_double(fields[2], rec.weight) || !std::isfinite(rec.weight)) {
      throw ParseError("non-numeric weight '" + std::string(fields[2]) + "'", line_no);
    }
    if (!text::parse_double(fields[3], rec.timestamp) || !std::isfinite(rec.timestamp)) {
      throw ParseError("non-numeric timestamp '" + std::string(fields[3]) + "'", line_no);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

Index bin_time(double timestamp, double t_min, double t_max, std::size_t k_slots) {
  if (k_slots < 1) throw ConfigError("k_slots must be >= 1");
  if (!(t_min <= timestamp && timestamp <= t_max)) {
    throw RangeError("timestamp " + text::format_double(timestamp) + " outside [" + text::format_double(t_min) +
                     ", " + text::format_double(t_max) + "]");
  }
  const auto last = static_cast<Index>(k_slots - 1);
  if (timestamp == t_max) return last;
  const double slot = std::floor((timestamp - t_min) / (t_max - t_min) * static_cast<double>(k_slots));
  return std::min(static_cast<Index>(slot), last);
}

double normalize_weight(double weight, double w_min, double w_max) {
  if (!(w_min < w_max)) throw ConfigError("weight range is degenerate (w_min >= w_max)");
  if (!(w_min <= weight && weight <= w_max)) {
    throw RangeError("weight " + text::format_double(weight) + " outside [" + text::format_double(w_min) + ", " +
                     text::format_double(w_max) + "]");
  }
  return (weight - w_min) / (w_max - w_min);
}

double denormalize_weight(double value, double w_min, double w_max) noexcept {
  return w_min + value * (w_max - w_min);
}

IngestResult build_tensor(const std::vector<RawRecord>& records, std::size_t k_slots, DuplicatePolicy policy) {
  if (records.empty()) throw DataError("edge list has no records");
  if (k_slots < 1) throw ConfigError("k_slots must be >= 1");

  IngestManifest manifest;
  manifest.k_slots = k_slots;
  manifest.duplicate_policy = policy;
  manifest.record_count = records.size();
  manifest.t_min = manifest.t_max = records.front().timestamp;
  manifest.w_min = manifest.w_max = records.front().weight;
  std::vector<std::pair<Index, Index>> ids;
  ids.reserve(records.size());
  for (const auto& rec : records) {
    manifest.t_min = std::min(manifest.t_min, rec.timestamp);
    manifest.t_max = std::max(manifest.t_max, rec.timestamp);
    manifest.w_min = std::min(manifest.w_min, rec.weight);
    manifest.w_max = std::max(manifest.w_max, rec.weight);
    const Index i = manifest.id_map_i.intern(rec.source_id);
    ids.emplace_back(i, manifest.id_map_j.intern(rec.target_id));
  }

  SparseTensor tensor(TensorShape{manifest.id_map_i.size(), manifest.id_map_j.size(), k_slots});
  for (std::size_t n = 0; n < records.size(); ++n) {
    const auto& rec = records[n];
    const Index k = bin_time(rec.timestamp, manifest.t_min, manifest.t_max, k_slots);
    const double value = normalize_weight(rec.weight, manifest.w_min, manifest.w_max);
    tensor.insert_or_merge({ids[n].first, ids[n].second, k, value}, policy);
  }
  return {std::move(tensor), std::move(manifest)};
}

namespace {

void write_id_map(const std::filesystem::path& path, const IdMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  for (std::size_t n = 0; n < map.size(); ++n) out << map.token(static_cast<Index>(n)) << '\t' << n << '\n';
}

}  // namespace

void save_manifest(const std::filesystem::path& dir, const IngestManifest& manifest) {
  write_id_map(dir / "id_map_i.tsv", manifest.id_map_i);
  write_id_map(dir / "id_map_j.tsv", manifest.id_map_j);
  std::ofstream out(dir / "manifest.tsv", std::ios::binary);
  if (!out) throw DataError("cannot open " + (dir / "manifest.tsv").string() + " for writing");
  out << "k_slots\t" << manifest.k_slots << '\n'
      << "t_min\t" << text::format_double(manifest.t_min) << '\n'
      << "t_max\t" << text::format_double(manifest.t_max) << '\n'
      << "w_min\t" << text::format_double(manifest.w_min) << '\n'
      << "w_max\t" << text::format_double(manifest.w_max) << '\n'
      << "duplicate_policy\t" << to_string(manifest.duplicate_policy) << '\n'
      << "records\t" << manifest.record_count << '\n'
      << "dim_i\t" << manifest.id_map_i.size() << '\n'
      << "dim_j\t" << manifest.id_map_j.size() << '\n'
      << "id_map_i\tid_map_i.tsv\n"
      << "id_map_j\tid_map_j.tsv\n";
}

}  // namespace nnlft
