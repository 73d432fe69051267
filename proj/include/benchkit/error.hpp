// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace benchkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string id, const std::string& what)
      : Error("record '" + id + "': " + what), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(const std::string& id)
      : Error("duplicate id '" + id + "'") {}
};

class UnknownIdError : public Error {
 public:
  explicit UnknownIdError(const std::string& id) : Error("unknown id '" + id + "'") {}
};

/// An external service (tagger, judge, generator, ...) could not be reached
/// or returned a transport-level failure.
class AdapterError : public Error {
 public:
  using Error::Error;
};

/// Structured output from a judge/tagger could not be parsed after retries.
class JudgeParseError : public Error {
 public:
  using Error::Error;
};

class NoCandidateError : public Error {
 public:
  using Error::Error;
};

class InsufficientPoolError : public Error {
 public:
  using Error::Error;
};

class DuplicateVoteError : public Error {
 public:
  using Error::Error;
};

class UnknownTaskError : public Error {
 public:
  using Error::Error;
};

class TaskClosedError : public Error {
 public:
  using Error::Error;
};

class NoOpenTasksError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace benchkit
