// Copyright 2026 The dpnego Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpnego/contract.hpp"
#include "dpnego/explain.hpp"
#include "dpnego/json.hpp"

namespace dpnego {

struct AuditRecord {
  std::uint64_t seq = 0;
  std::string timestamp;  // ISO-8601 UTC, supplied by the caller
  std::string request_digest;
  Json outcome;
  std::string explanation_digest;
  std::string prev_hash;
  std::string hash;

  // Canonical single-line form, hash field included.
  std::string serialize() const;
  // Hash over every field except `hash` itself.
  std::string compute_hash() const;

  bool operator==(const AuditRecord&) const = default;
};

// Parses one canonical line. Throws ParseError when it is not a record.
AuditRecord parse_audit_record(const std::string& line);

struct ChainReport {
  std::size_t records = 0;
  // 1-based sequence position of the first record that fails verification.
  std::optional<std::size_t> first_corrupt;

  bool ok() const { return !first_corrupt; }
};

// Verifies raw JSON lines. A line that does not re-serialize byte-for-byte,
// breaks the sequence, or breaks the hash link is reported as corrupt.
ChainReport verify_chain(const std::vector<std::string>& lines);
ChainReport verify_chain_file(const std::filesystem::path& path);

// Append-only hash-chained log held in memory and optionally mirrored to a
// JSON-lines file. Single writer.
class AuditLog {
 public:
  AuditLog() = default;
  // Opens (or creates) a file-backed log. Throws ChainCorrupt if the existing
  // file fails verification.
  static AuditLog open(const std::filesystem::path& path);

  const AuditRecord& append(const ContractRequest& request,
                            const NegotiationOutcome& outcome,
                            const Explanation& explanation,
                            std::string timestamp);

  const std::vector<AuditRecord>& records() const { return records_; }
  std::string head() const;
  ChainReport verify() const;

  void write(std::ostream& os) const;

 private:
  std::vector<AuditRecord> records_;
  std::optional<std::filesystem::path> path_;
};

}  // namespace dpnego
