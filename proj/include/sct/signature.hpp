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

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace sct {

// Bytes left for user data in a legacy BLE advertising packet.
inline constexpr std::size_t kSignatureLength = 31;

inline constexpr std::int64_t kMillisPerDay = 24LL * 60 * 60 * 1000;
inline constexpr std::int64_t kDefaultExpirationMs = 14 * kMillisPerDay;
inline constexpr std::int64_t kDefaultSignatureIntervalMs = 5LL * 60 * 1000;

// Time-averaged RSS of each ambient BLE device seen by one phone.
struct ObservedVector {
  std::vector<double> values;  // dBm
  std::vector<std::string> device_ids;
  std::int64_t t_ms = 0;
};

// The per-device secret 31 x m transform. The seed stands in for the secret.
class Dictionary {
 public:
  // Entries uniform in [-1, 1]. Throws EmptyEnvironmentError for m == 0.
  static Dictionary generate(std::size_t m, std::uint64_t seed);
  // Throws DimensionError unless the matrix has 31 rows.
  static Dictionary from_matrix(Eigen::MatrixXd matrix, std::uint64_t seed = 0);

  std::size_t columns() const { return static_cast<std::size_t>(matrix_.cols()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Dictionary(Eigen::MatrixXd matrix, std::uint64_t seed)
      : matrix_(std::move(matrix)), seed_(seed) {}

  Eigen::MatrixXd matrix_;
  std::uint64_t seed_;
};

struct SignatureVector {
  std::array<double, kSignatureLength> components{};
  std::int64_t t_ms = 0;
};

struct SignaturePayload {
  std::array<std::uint8_t, kSignatureLength> bytes{};

  std::string to_hex() const;
  // Exactly 62 hex digits, either case. Throws ParseError otherwise.
  static SignaturePayload from_hex(std::string_view hex);

  friend auto operator<=>(const SignaturePayload&, const SignaturePayload&) = default;
};

enum class RecordKind { Broadcast, Observed };

std::string_view to_string(RecordKind kind);

struct SignatureRecord {
  SignaturePayload payload;
  std::int64_t tau_ms = 0;
  RecordKind kind = RecordKind::Broadcast;
  std::optional<double> rss;  // present iff kind == Observed

  static SignatureRecord broadcast(const SignaturePayload& payload, std::int64_t tau_ms);
  static SignatureRecord observed(const SignaturePayload& payload, std::int64_t tau_ms,
                                  double rss);

  // Throws ValidationError when the rss presence does not match the kind.
  void validate() const;

  friend bool operator==(const SignatureRecord&, const SignatureRecord&) = default;
};

// Local store of broadcast and observed signatures, kept in tau order.
// Records with equal tau keep their insertion order.
class SignatureLog {
 public:
  void append(SignatureRecord record);
  // Drops every record older than `period` at time `now`; returns how many.
  std::size_t expire(std::int64_t now_ms, std::int64_t period_ms);

  const std::vector<SignatureRecord>& records() const { return records_; }
  std::vector<SignatureRecord> observed() const;
  std::vector<SignatureRecord> broadcast() const;
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

 private:
  std::vector<SignatureRecord> records_;
};

// s = sum_j Psi_j * o_j. Throws DimensionError on a column/length mismatch.
SignatureVector generate_signature(const Dictionary& dict, const ObservedVector& obs);

struct QuantizationBounds {
  double lo = -10000.0;
  double hi = 10000.0;
};

// Affine map of [lo, hi] onto [0, 255], clamped, rounded half to even.
// Throws EncodingError for non-finite components.
SignaturePayload quantize_signature(const SignatureVector& sig, QuantizationBounds bounds = {});

void log_record(SignatureLog& log, SignatureRecord record);
std::size_t expire_signatures(SignatureLog& log, std::int64_t now_ms,
                              std::int64_t period_ms = kDefaultExpirationMs);

struct SignatureMatch {
  SignatureRecord record;
  SignaturePayload payload;
};

// Observed records whose payload equals an uploaded payload, ordered by tau.
// Throws ValidationError if the log contains broadcast records.
std::vector<SignatureMatch> match_signatures(std::span<const SignatureRecord> observed_log,
                                             const std::set<SignaturePayload>& uploaded);

// Line format "tau,kind,rss,payload_hex"; rss is empty for broadcast rows.
void write_log(std::ostream& out, const SignatureLog& log);
SignatureLog read_log(std::istream& in);

// One 62-hex-digit payload per line.
void write_payloads(std::ostream& out, const std::set<SignaturePayload>& payloads);
std::set<SignaturePayload> read_payloads(std::istream& in);

}  // namespace sct
