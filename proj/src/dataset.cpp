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

#include "sct/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "sct/errors.hpp"
#include "text_util.hpp"

namespace sct {

namespace {

constexpr std::pair<Field, std::string_view> kFieldNames[] = {
    {Field::Rss, "rss"},         {Field::TrueDistance, "true_distance"},
    {Field::Timestamp, "timestamp"}, {Field::Elapsed, "elapsed"},
    {Field::TxName, "tx_name"},  {Field::Payload, "payload"},
    {Field::Mac, "mac"},
};

Field parse_field(std::string_view s) {
  for (const auto& [f, name] : kFieldNames) {
    if (name == s) return f;
  }
  throw SchemaError(fmt::format("unknown mapping field '{}'", s));
}

// Resolved column index per mapped field, or npos.
struct ResolvedColumns {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::map<Field, std::size_t> index;

  std::size_t at(Field f) const {
    const auto it = index.find(f);
    return it == index.end() ? npos : it->second;
  }
};

ResolvedColumns resolve(const ColumnMapping& mapping, const std::vector<std::string>* header,
                        std::size_t width) {
  ResolvedColumns out;
  for (const auto& [field, name] : kFieldNames) {
    const auto* ref = mapping.find(field);
    if (!ref) continue;
    const bool mandatory = field == Field::Rss || field == Field::TrueDistance;
    std::size_t idx = ResolvedColumns::npos;
    if (const auto* i = std::get_if<std::size_t>(ref)) {
      idx = *i;
    } else {
      const auto& wanted = std::get<std::string>(*ref);
      if (header) {
        const auto it = std::find(header->begin(), header->end(), wanted);
        if (it != header->end()) idx = static_cast<std::size_t>(it - header->begin());
      }
      if (idx == ResolvedColumns::npos) {
        if (mandatory) throw SchemaError(fmt::format("column '{}' not found for {}", wanted, name));
        continue;
      }
    }
    if (idx >= width) {
      if (mandatory) {
        throw SchemaError(fmt::format("column {} for {} is beyond the {} columns present", idx,
                                      name, width));
      }
      continue;
    }
    out.index[field] = idx;
  }
  return out;
}

}  // namespace

std::string_view to_string(Field f) {
  for (const auto& [field, name] : kFieldNames) {
    if (field == f) return name;
  }
  return "?";
}

ColumnMapping ColumnMapping::default_mapping() {
  ColumnMapping m;
  m.set(Field::TrueDistance, std::size_t{0});
  m.set(Field::TxName, std::size_t{1});
  m.set(Field::Mac, std::size_t{2});
  m.set(Field::Payload, std::size_t{3});
  m.set(Field::Rss, std::size_t{4});
  m.set(Field::Elapsed, std::size_t{5});
  m.set(Field::Timestamp, std::size_t{6});
  return m;
}

ColumnMapping ColumnMapping::parse(std::string_view text) {
  ColumnMapping m;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (detail::is_blank_or_comment(line)) continue;
    const auto kv = detail::parse_key_value(line);
    if (!kv || kv->value.empty()) {
      throw SchemaError(fmt::format("mapping: expected field=column, got '{}'", line));
    }
    const auto field = parse_field(kv->key);
    if (const auto idx = detail::parse_int(kv->value); idx && *idx >= 0) {
      m.set(field, static_cast<std::size_t>(*idx));
    } else {
      m.set(field, kv->value);
    }
  }
  m.validate();
  return m;
}

ColumnMapping ColumnMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read mapping file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ColumnMapping::set(Field field, ColumnRef ref) { columns_[field] = std::move(ref); }

const ColumnRef* ColumnMapping::find(Field field) const {
  const auto it = columns_.find(field);
  return it == columns_.end() ? nullptr : &it->second;
}

bool ColumnMapping::uses_names() const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [](const auto& kv) { return std::holds_alternative<std::string>(kv.second); });
}

void ColumnMapping::validate() const {
  if (!find(Field::Rss)) throw SchemaError("mapping must define the rss column");
  if (!find(Field::TrueDistance)) throw SchemaError("mapping must define the true_distance column");
}

std::size_t published_case_count(BodyCase c) {
  switch (c) {
    case BodyCase::HH:
      return 19'903;
    case BodyCase::HP:
      return 16'081;
    case BodyCase::HB:
      return 10'330;
    case BodyCase::PB:
      return 19'161;
    case BodyCase::PP:
      return 24'151;
    case BodyCase::BB:
      return 34'092;
  }
  return 0;
}

CaseDataset load_case(const std::filesystem::path& path, const ColumnMapping& mapping,
                      BodyCase body_case) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open data file {}", path.string()));
  return load_case(in, mapping, body_case, path.string());
}

CaseDataset load_case(std::istream& in, const ColumnMapping& mapping, BodyCase body_case,
                      std::string source) {
  mapping.validate();
  CaseDataset ds;
  ds.body_case = body_case;
  ds.source = std::move(source);

  std::string line;
  std::optional<ResolvedColumns> cols;
  std::int64_t clock = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv(line);
    if (!cols) {
      // First row: a header when names are in use, or when its RSS cell is
      // not a number.
      bool header = mapping.uses_names();
      if (!header) {
        const auto idx = std::get<std::size_t>(*mapping.find(Field::Rss));
        header = idx < fields.size() && !detail::parse_double(fields[idx]);
      }
      cols = resolve(mapping, header ? &fields : nullptr, fields.size());
      if (header) continue;
    }

    const auto cell = [&](Field f) -> std::optional<std::string_view> {
      const auto idx = cols->at(f);
      if (idx == ResolvedColumns::npos || idx >= fields.size()) return std::nullopt;
      return std::string_view(fields[idx]);
    };

    const auto rss_cell = cell(Field::Rss);
    const auto dist_cell = cell(Field::TrueDistance);
    const auto rss = rss_cell ? detail::parse_double(*rss_cell) : std::nullopt;
    const auto dist = dist_cell ? detail::parse_double(*dist_cell) : std::nullopt;
    if (!rss || !std::isfinite(*rss) || !dist || !(*dist > 0.0) || !std::isfinite(*dist)) {
      ++ds.skipped_rows;
      continue;
    }

    RssSample s;
    s.rss = *rss;
    s.true_distance = *dist;
    s.body_case = body_case;
    if (const auto e = cell(Field::Elapsed)) {
      if (const auto v = detail::parse_double(*e)) {
        if (!(*v >= 0.0)) {
          ++ds.skipped_rows;
          continue;
        }
        s.elapsed_ms = static_cast<std::int64_t>(std::llround(*v));
      }
    }
    // Without a numeric timestamp the clock advances by the elapsed time.
    std::optional<double> ts;
    if (const auto t = cell(Field::Timestamp)) ts = detail::parse_double(*t);
    s.timestamp_ms = ts ? static_cast<std::int64_t>(std::llround(*ts)) : clock + s.elapsed_ms;
    clock = s.timestamp_ms;
    if (const auto name = cell(Field::TxName); name && !name->empty()) {
      s.tx_id = std::string(*name);
    } else if (const auto mac = cell(Field::Mac)) {
      s.tx_id = std::string(*mac);
    }
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) {
    throw EmptyDatasetError(fmt::format("no valid rows in {} ({} skipped)", ds.source,
                                        ds.skipped_rows));
  }
  return ds;
}

std::vector<DistanceStats> summarize(std::span<const RssSample> samples) {
  std::map<double, std::vector<double>> bins;
  for (const auto& s : samples) {
    if (s.true_distance) bins[*s.true_distance].push_back(s.rss);
  }
  if (bins.empty()) throw EmptyDatasetError("no samples with a true distance to summarize");
  std::vector<DistanceStats> out;
  for (auto& [distance, values] : bins) {
    // Sorting first makes the result independent of row order.
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (const auto v : values) ss += (v - mean) * (v - mean);
    out.push_back({distance, values.size(), mean, values.size() > 1 ? ss / (n - 1.0) : 0.0});
  }
  return out;
}

std::vector<DistanceStats> summarize(const CaseDataset& dataset) {
  return summarize(std::span<const RssSample>(dataset.samples));
}

void write_summary(std::ostream& out, std::span<const DistanceStats> stats) {
  out << "distance_m,count,mean_rss,var_rss\n";
  for (const auto& s : stats) {
    out << fmt::format("{},{},{:.4f},{:.4f}\n", s.distance, s.count, s.mean_rss, s.var_rss);
  }
}

IndexSplit split_indices(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw DomainError(fmt::format("split fraction {} outside [0, 1]", fraction));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  IndexSplit split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  return split;
}

DatasetSplit split_train_test(const CaseDataset& dataset, double fraction, std::uint64_t seed) {
  if (dataset.samples.size() < 2) throw DomainError("splitting needs at least two samples");
  const auto idx = split_indices(dataset.samples.size(), fraction, seed);
  DatasetSplit out;
  for (const auto i : idx.train) out.train.push_back(dataset.samples[i]);
  for (const auto i : idx.test) out.test.push_back(dataset.samples[i]);
  return out;
}

}  // namespace sct
