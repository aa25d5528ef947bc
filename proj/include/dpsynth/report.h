//
// Copyright 2026 The dpsynth Authors
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

#ifndef DPSYNTH_REPORT_H_
#define DPSYNTH_REPORT_H_

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpsynth {

// Nine significant digits, the rendering used for every real in reports.
inline std::string FormatReal(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", v);
  return buffer;
}

// Ordered `key=value` lines. Keys keep insertion order; setting an existing
// key overwrites it in place.
class Report {
 public:
  void Set(const std::string& key, std::string value) {
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = std::move(value);
        return;
      }
    }
    entries_.emplace_back(key, std::move(value));
  }
  void Set(const std::string& key, const char* value) {
    Set(key, std::string(value));
  }
  void Set(const std::string& key, double value) {
    Set(key, FormatReal(value));
  }
  void Set(const std::string& key, bool value) {
    Set(key, std::string(value ? "true" : "false"));
  }
  void Set(const std::string& key, std::uint64_t value) {
    Set(key, std::to_string(value));
  }
  void Set(const std::string& key, int value) {
    Set(key, std::to_string(value));
  }

  std::optional<std::string> Get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  void Merge(const Report& other) {
    for (const auto& [k, v] : other.entries_) Set(k, v);
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  std::string Render() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace dpsynth

#endif  // DPSYNTH_REPORT_H_
