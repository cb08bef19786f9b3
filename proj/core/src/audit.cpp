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

#include "dpnego/audit.hpp"

#include <fstream>
#include <ostream>

#include "dpnego/digest.hpp"
#include "dpnego/error.hpp"

namespace dpnego {

namespace {

Json body_json(const AuditRecord& r) {
  return Json{{"seq", r.seq},
              {"timestamp", r.timestamp},
              {"request_digest", r.request_digest},
              {"outcome", r.outcome},
              {"explanation_digest", r.explanation_digest},
              {"prev_hash", r.prev_hash}};
}

}  // namespace

std::string AuditRecord::compute_hash() const {
  return sha256_hex(body_json(*this).dump());
}

std::string AuditRecord::serialize() const {
  Json j = body_json(*this);
  j["hash"] = hash;
  return j.dump();
}

AuditRecord parse_audit_record(const std::string& line) {
  try {
    const Json j = Json::parse(line);
    AuditRecord r;
    r.seq = j.at("seq").get<std::uint64_t>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.request_digest = j.at("request_digest").get<std::string>();
    r.outcome = j.at("outcome");
    r.explanation_digest = j.at("explanation_digest").get<std::string>();
    r.prev_hash = j.at("prev_hash").get<std::string>();
    r.hash = j.at("hash").get<std::string>();
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

ChainReport verify_chain(const std::vector<std::string>& lines) {
  ChainReport report;
  std::string prev(kGenesisHash);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    ++report.records;
    const std::size_t position = i + 1;
    AuditRecord r;
    try {
      r = parse_audit_record(lines[i]);
    } catch (const Error&) {
      report.first_corrupt = position;
      return report;
    }
    if (r.serialize() != lines[i] || r.seq != position || r.prev_hash != prev ||
        r.compute_hash() != r.hash) {
      report.first_corrupt = position;
      return report;
    }
    prev = r.hash;
  }
  return report;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

ChainReport verify_chain_file(const std::filesystem::path& path) {
  return verify_chain(read_lines(path));
}

AuditLog AuditLog::open(const std::filesystem::path& path) {
  AuditLog log;
  log.path_ = path;
  if (std::filesystem::exists(path)) {
    const auto lines = read_lines(path);
    const auto report = verify_chain(lines);
    if (!report.ok()) {
      throw Error(ErrorCode::ChainCorrupt,
                  "record " + std::to_string(*report.first_corrupt) +
                      " of " + path.string() + " fails verification");
    }
    for (const auto& l : lines) log.records_.push_back(parse_audit_record(l));
  }
  return log;
}

std::string AuditLog::head() const {
  return records_.empty() ? std::string(kGenesisHash) : records_.back().hash;
}

const AuditRecord& AuditLog::append(const ContractRequest& request,
                                    const NegotiationOutcome& outcome,
                                    const Explanation& explanation,
                                    std::string timestamp) {
  if (!records_.empty() &&
      records_.back().compute_hash() != records_.back().hash) {
    throw Error(ErrorCode::ChainCorrupt, "log tail fails verification");
  }
  AuditRecord r;
  r.seq = records_.size() + 1;
  r.timestamp = std::move(timestamp);
  r.request_digest = sha256_hex(Json(request).dump());
  r.outcome = Json(outcome);
  r.explanation_digest = sha256_hex(Json(explanation).dump());
  r.prev_hash = head();
  r.hash = r.compute_hash();
  if (path_) {
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::Io, "cannot append to " + path_->string());
    out << r.serialize() << '\n';
  }
  records_.push_back(std::move(r));
  return records_.back();
}

ChainReport AuditLog::verify() const {
  std::vector<std::string> lines;
  lines.reserve(records_.size());
  for (const auto& r : records_) lines.push_back(r.serialize());
  return verify_chain(lines);
}

void AuditLog::write(std::ostream& os) const {
  for (const auto& r : records_) os << r.serialize() << '\n';
}

}  // namespace dpnego
