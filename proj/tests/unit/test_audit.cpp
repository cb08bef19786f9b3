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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpnego/audit.hpp"
#include "dpnego/digest.hpp"
#include "dpnego/error.hpp"
#include "dpnego/explain.hpp"

namespace dpnego {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "dpnego_audit_tests";
  fs::create_directories(dir);
  auto p = dir / name;
  fs::remove(p);
  return p;
}

AuditLog build_log(int n) {
  const DataCatalog cat = DataCatalog::defaults();
  const Engine engine(EngineConfig{}, cat);
  AuditLog log;
  for (int i = 0; i < n; ++i) {
    ContractRequest r;
    r.requester_id = "req-" + std::to_string(i);
    r.owner_id = "h1";
    r.features = {i % 2 ? Feature::Aggregate : Feature::LoadCurve};
    const double h = 8.0 - i;
    const auto t = engine.negotiate_traced(validate_request(r, cat), h, 0.5);
    const auto ex = explain(r, t.outcome, t.factors, EngineConfig{}, {});
    log.append(r, t.outcome, ex, "2024-01-0" + std::to_string(1 + i) + "T00:00:00Z");
  }
  return log;
}

std::vector<std::string> lines_of(const AuditLog& log) {
  std::vector<std::string> out;
  for (const auto& r : log.records()) out.push_back(r.serialize());
  return out;
}

TEST(Audit, GenesisRecord) {
  const auto log = build_log(1);
  ASSERT_EQ(log.records().size(), 1u);
  EXPECT_EQ(log.records()[0].prev_hash, kGenesisHash);
  EXPECT_EQ(log.records()[0].seq, 1u);
  EXPECT_TRUE(log.verify().ok());
  EXPECT_EQ(log.head(), log.records()[0].hash);
}

TEST(Audit, EmptyChainVerifies) {
  const auto r = verify_chain({});
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.records, 0u);
}

TEST(Audit, DeterministicHashes) {
  EXPECT_EQ(lines_of(build_log(4)), lines_of(build_log(4)));
}

TEST(Audit, RecordRoundTrip) {
  for (const auto& line : lines_of(build_log(3))) {
    EXPECT_EQ(parse_audit_record(line).serialize(), line);
  }
}

TEST(Audit, EverySingleByteMutationDetected) {
  const auto lines = lines_of(build_log(5));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t b = 0; b < lines[i].size(); ++b) {
      auto mutated = lines;
      mutated[i][b] = static_cast<char>(mutated[i][b] ^ 0x01);
      const auto r = verify_chain(mutated);
      ASSERT_FALSE(r.ok()) << "record " << i << " byte " << b;
      EXPECT_EQ(*r.first_corrupt, i + 1);
    }
  }
}

TEST(Audit, FileBackedAppendAndReopen) {
  const auto path = scratch("chain.jsonl");
  {
    auto log = AuditLog::open(path);
    EXPECT_TRUE(log.records().empty());
  }
  const auto reference = build_log(3);
  {
    std::ofstream out(path, std::ios::binary);
    reference.write(out);
  }
  EXPECT_TRUE(verify_chain_file(path).ok());
  auto reopened = AuditLog::open(path);
  EXPECT_EQ(reopened.head(), reference.head());

  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  text[text.size() / 2] ^= 0x01;
  {
    std::ofstream out(path, std::ios::binary);
    out << text;
  }
  EXPECT_FALSE(verify_chain_file(path).ok());
  try {
    AuditLog::open(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChainCorrupt);
  }
}

TEST(Audit, ReorderedRecordsDetected) {
  auto lines = lines_of(build_log(4));
  std::swap(lines[1], lines[2]);
  const auto r = verify_chain(lines);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(*r.first_corrupt, 2u);
}

}  // namespace
}  // namespace dpnego
