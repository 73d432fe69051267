// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace benchkit {

using Json = nlohmann::json;

/// Current schema version written into every line-delimited record.
inline constexpr int kSchemaVersion = 1;

/// Calls fn(record, line_number) for every non-blank line of a line-delimited
/// JSON file. Malformed lines raise ParseError carrying the line number.
void ForEachJsonLine(const std::string& path,
                     const std::function<void(const Json&, std::size_t)>& fn);

std::vector<Json> ReadJsonLines(const std::string& path);

/// Serialises records one per line. Keys are emitted in sorted order, so
/// equal records always produce identical bytes.
std::string DumpJsonLines(const std::vector<Json>& records);

void WriteJsonLines(const std::string& path, const std::vector<Json>& records);

/// Append-only journal of JSON records. Each append writes one complete line
/// and flushes it under a lock, so concurrent writers never interleave and a
/// crash leaves at most one torn trailing line (ignored on reload).
class Journal {
 public:
  Journal() = default;
  explicit Journal(std::string path);

  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  void Append(const Json& record);

  /// Records present when the journal was opened plus everything appended since.
  std::vector<Json> Records() const;

  const std::string& path() const { return path_; }
  bool is_open() const { return out_.is_open(); }

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::ofstream out_;
  std::vector<Json> records_;
};

}  // namespace benchkit
