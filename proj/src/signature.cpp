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

#include "sct/signature.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "sct/errors.hpp"
#include "text_util.hpp"

namespace sct {

namespace {

int hex_value(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
  if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
  return -1;
}

}  // namespace

Dictionary Dictionary::generate(std::size_t m, std::uint64_t seed) {
  if (m == 0) throw EmptyEnvironmentError("cannot build a dictionary for zero ambient devices");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(kSignatureLength),
                         static_cast<Eigen::Index>(m));
  // Column-major fill so a column depends only on the seed and its index.
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) matrix(i, j) = entry(rng);
  }
  return Dictionary(std::move(matrix), seed);
}

Dictionary Dictionary::from_matrix(Eigen::MatrixXd matrix, std::uint64_t seed) {
  if (matrix.rows() != static_cast<Eigen::Index>(kSignatureLength)) {
    throw DimensionError(fmt::format("dictionary must have {} rows, got {}", kSignatureLength,
                                     matrix.rows()));
  }
  if (matrix.cols() == 0) throw EmptyEnvironmentError("dictionary has no columns");
  return Dictionary(std::move(matrix), seed);
}

std::string SignaturePayload::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * kSignatureLength);
  for (const auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

SignaturePayload SignaturePayload::from_hex(std::string_view hex) {
  hex = detail::trim(hex);
  if (hex.size() != 2 * kSignatureLength) {
    throw ParseError(fmt::format("payload must be {} hex digits, got {}", 2 * kSignatureLength,
                                 hex.size()));
  }
  SignaturePayload p;
  for (std::size_t i = 0; i < kSignatureLength; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw ParseError(fmt::format("bad hex payload '{}'", hex));
    p.bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return p;
}

std::string_view to_string(RecordKind kind) {
  return kind == RecordKind::Broadcast ? "broadcast" : "observed";
}

SignatureRecord SignatureRecord::broadcast(const SignaturePayload& payload, std::int64_t tau_ms) {
  return {payload, tau_ms, RecordKind::Broadcast, std::nullopt};
}

SignatureRecord SignatureRecord::observed(const SignaturePayload& payload, std::int64_t tau_ms,
                                          double rss) {
  return {payload, tau_ms, RecordKind::Observed, rss};
}

void SignatureRecord::validate() const {
  if ((kind == RecordKind::Observed) != rss.has_value()) {
    throw ValidationError("observed records carry an RSS value and broadcast records do not");
  }
  if (rss && !std::isfinite(*rss)) throw ValidationError("record RSS must be finite");
}

void SignatureLog::append(SignatureRecord record) {
  record.validate();
  const auto pos = std::upper_bound(
      records_.begin(), records_.end(), record.tau_ms,
      [](std::int64_t tau, const SignatureRecord& r) { return tau < r.tau_ms; });
  records_.insert(pos, std::move(record));
}

std::size_t SignatureLog::expire(std::int64_t now_ms, std::int64_t period_ms) {
  if (period_ms <= 0) throw DomainError("expiration period must be positive");
  const auto before = records_.size();
  std::erase_if(records_,
                [&](const SignatureRecord& r) { return now_ms - r.tau_ms > period_ms; });
  return before - records_.size();
}

std::vector<SignatureRecord> SignatureLog::observed() const {
  std::vector<SignatureRecord> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [](const SignatureRecord& r) { return r.kind == RecordKind::Observed; });
  return out;
}

std::vector<SignatureRecord> SignatureLog::broadcast() const {
  std::vector<SignatureRecord> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [](const SignatureRecord& r) { return r.kind == RecordKind::Broadcast; });
  return out;
}

SignatureVector generate_signature(const Dictionary& dict, const ObservedVector& obs) {
  if (obs.values.size() != dict.columns()) {
    throw DimensionError(fmt::format("dictionary has {} columns but the observation has {} values",
                                     dict.columns(), obs.values.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> o(obs.values.data(),
                                            static_cast<Eigen::Index>(obs.values.size()));
  const Eigen::VectorXd s = dict.matrix() * o;
  SignatureVector out;
  out.t_ms = obs.t_ms;
  for (std::size_t i = 0; i < kSignatureLength; ++i) {
    out.components[i] = s(static_cast<Eigen::Index>(i));
  }
  return out;
}

SignaturePayload quantize_signature(const SignatureVector& sig, QuantizationBounds bounds) {
  if (!(bounds.lo < bounds.hi)) throw DomainError("quantization bounds need lo < hi");
  SignaturePayload p;
  const double span = bounds.hi - bounds.lo;
  for (std::size_t i = 0; i < kSignatureLength; ++i) {
    const double x = sig.components[i];
    if (!std::isfinite(x)) {
      throw EncodingError(fmt::format("signature component {} is not finite", i));
    }
    // nearbyint honours the default round-to-nearest-even mode.
    const double level = std::clamp(std::nearbyint((x - bounds.lo) * 255.0 / span), 0.0, 255.0);
    p.bytes[i] = static_cast<std::uint8_t>(level);
  }
  return p;
}

void log_record(SignatureLog& log, SignatureRecord record) { log.append(std::move(record)); }

std::size_t expire_signatures(SignatureLog& log, std::int64_t now_ms, std::int64_t period_ms) {
  return log.expire(now_ms, period_ms);
}

std::vector<SignatureMatch> match_signatures(std::span<const SignatureRecord> observed_log,
                                             const std::set<SignaturePayload>& uploaded) {
  std::vector<SignatureMatch> out;
  for (const auto& r : observed_log) {
    if (r.kind != RecordKind::Observed) {
      throw ValidationError("matching runs on observed records only");
    }
    if (uploaded.contains(r.payload)) out.push_back({r, r.payload});
  }
  std::stable_sort(out.begin(), out.end(), [](const SignatureMatch& a, const SignatureMatch& b) {
    return a.record.tau_ms < b.record.tau_ms;
  });
  return out;
}

void write_log(std::ostream& out, const SignatureLog& log) {
  for (const auto& r : log.records()) {
    out << r.tau_ms << ',' << to_string(r.kind) << ',';
    if (r.rss) out << fmt::format("{}", *r.rss);
    out << ',' << r.payload.to_hex() << '\n';
  }
}

SignatureLog read_log(std::istream& in) {
  SignatureLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != 4) {
      throw ParseError(fmt::format("log line {}: expected 4 fields", line_no));
    }
    const auto tau = detail::parse_int(fields[0]);
    if (!tau) throw ParseError(fmt::format("log line {}: bad tau", line_no));
    const auto payload = SignaturePayload::from_hex(fields[3]);
    if (fields[1] == "broadcast") {
      if (!fields[2].empty()) {
        throw ParseError(fmt::format("log line {}: broadcast rows have no rss", line_no));
      }
      log.append(SignatureRecord::broadcast(payload, *tau));
    } else if (fields[1] == "observed") {
      const auto rss = detail::parse_double(fields[2]);
      if (!rss) throw ParseError(fmt::format("log line {}: bad rss", line_no));
      log.append(SignatureRecord::observed(payload, *tau, *rss));
    } else {
      throw ParseError(fmt::format("log line {}: unknown kind '{}'", line_no, fields[1]));
    }
  }
  return log;
}

void write_payloads(std::ostream& out, const std::set<SignaturePayload>& payloads) {
  for (const auto& p : payloads) out << p.to_hex() << '\n';
}

std::set<SignaturePayload> read_payloads(std::istream& in) {
  std::set<SignaturePayload> out;
  std::string line;
  while (std::getline(in, line)) {
    if (detail::is_blank_or_comment(line)) continue;
    out.insert(SignaturePayload::from_hex(line));
  }
  return out;
}

}  // namespace sct
