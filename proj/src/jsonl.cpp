// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "benchkit/jsonl.hpp"

#include <filesystem>

#include "benchkit/error.hpp"

namespace benchkit {

void ForEachJsonLine(const std::string& path,
                     const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(path, line_no, std::string("malformed record: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(path, line_no, "record is not an object");
    fn(record, line_no);
  }
}

std::vector<Json> ReadJsonLines(const std::string& path) {
  std::vector<Json> out;
  ForEachJsonLine(path, [&](const Json& j, std::size_t) { out.push_back(j); });
  return out;
}

std::string DumpJsonLines(const std::vector<Json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

void WriteJsonLines(const std::string& path, const std::vector<Json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << DumpJsonLines(records);
  if (!out) throw IoError("write failed for '" + path + "'");
}

Journal::Journal(std::string path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      // A torn final line from an interrupted append is dropped.
      auto parsed = Json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (parsed.is_object()) records_.push_back(std::move(parsed));
    }
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw IoError("cannot open journal '" + path_ + "'");
  // Terminate a torn trailing line so the next append starts cleanly.
  const auto size = std::filesystem::file_size(path_);
  if (size > 0) {
    std::ifstream tail(path_, std::ios::binary);
    tail.seekg(static_cast<std::streamoff>(size) - 1);
    if (tail.get() != '\n') out_ << '\n' << std::flush;
  }
}

void Journal::Append(const Json& record) {
  const std::string line = record.dump() + "\n";
  std::lock_guard lock(mu_);
  if (out_.is_open()) {
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) throw IoError("journal append failed for '" + path_ + "'");
  }
  records_.push_back(record);
}

std::vector<Json> Journal::Records() const {
  std::lock_guard lock(mu_);
  return records_;
}

}  // namespace benchkit
