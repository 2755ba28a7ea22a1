/*
 * Copyright 2026 The SCT Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sct/signal_model.hpp"

namespace sct {

enum class Field { Rss, TrueDistance, Timestamp, Elapsed, TxName, Payload, Mac };

std::string_view to_string(Field f);

// A source column, by zero-based index or by header name.
using ColumnRef = std::variant<std::size_t, std::string>;

class ColumnMapping {
 public:
  // Guess at the published field order: distance, phone name, MAC,
  // payload, RSS, elapsed time, timestamp.
  static ColumnMapping default_mapping();
  // "field=column" lines; a numeric column is an index, anything else a
  // header name. Unlisted fields keep no mapping.
  static ColumnMapping parse(std::string_view text);
  static ColumnMapping load(const std::filesystem::path& path);

  void set(Field field, ColumnRef ref);
  const ColumnRef* find(Field field) const;
  bool uses_names() const;
  // Throws SchemaError unless rss and true_distance are mapped.
  void validate() const;

 private:
  std::map<Field, ColumnRef> columns_;
};

struct CaseDataset {
  BodyCase body_case = BodyCase::HH;
  std::vector<RssSample> samples;
  std::string source;
  std::size_t skipped_rows = 0;
};

// Published per-case sample counts.
std::size_t published_case_count(BodyCase c);
inline constexpr std::size_t kPublishedTotal = 123'718;

// Every well-formed row becomes a sample; malformed rows are skipped and
// counted. A header row is expected when the mapping uses names and is
// detected otherwise. Throws IoError, SchemaError or EmptyDatasetError.
CaseDataset load_case(const std::filesystem::path& path, const ColumnMapping& mapping,
                      BodyCase body_case);
CaseDataset load_case(std::istream& in, const ColumnMapping& mapping, BodyCase body_case,
                      std::string source = "<stream>");

// Count, mean and sample variance (n - 1) of RSS per distinct true
// distance, ascending by distance. Samples without a true distance are
// ignored. Throws EmptyDatasetError when nothing is left.
std::vector<DistanceStats> summarize(std::span<const RssSample> samples);
std::vector<DistanceStats> summarize(const CaseDataset& dataset);

void write_summary(std::ostream& out, std::span<const DistanceStats> stats);

struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  bool degenerate() const { return train.empty() || test.empty(); }
};

// Seeded shuffle of 0..n-1, then the first round(fraction * n) go to train.
IndexSplit split_indices(std::size_t n, double fraction, std::uint64_t seed);

struct DatasetSplit {
  std::vector<RssSample> train;
  std::vector<RssSample> test;
  bool degenerate() const { return train.empty() || test.empty(); }
};

// Throws DomainError for fewer than two samples or a fraction outside [0, 1].
DatasetSplit split_train_test(const CaseDataset& dataset, double fraction, std::uint64_t seed);

}  // namespace sct
