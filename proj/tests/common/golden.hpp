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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dpnego/json.hpp"

namespace dpnego::testing {

inline bool regen_golden() {
  const char* v = std::getenv("DPNEGO_REGEN_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

inline std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(DPNEGO_GOLDEN_DIR) / (name + ".json");
}

// Compares against the checked-in file, or rewrites it when regeneration is
// requested. Returns an empty string on success, else a diagnostic.
inline std::string check_golden(const std::string& name, const Json& actual) {
  const auto path = golden_path(name);
  if (regen_golden()) {
    std::ofstream out(path, std::ios::binary);
    out << actual.dump(2) << '\n';
    return out ? "" : "cannot write " + path.string();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing golden file " + path.string();
  std::stringstream ss;
  ss << in.rdbuf();
  const Json expected = Json::parse(ss.str());
  if (expected == actual) return "";
  return "golden mismatch for " + name + ": " +
         Json::diff(expected, actual).dump();
}

}  // namespace dpnego::testing
