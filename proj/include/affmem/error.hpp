#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace affmem {

// Every error raised by the library derives from Error and carries a kind
// that the CLI maps onto an exit code.
enum class ErrorKind {
  Data,
  Io,
  NotFound,
  EmptyTranscript,
  InvalidDimension,
  NotAvailable,
  InvalidK,
  DimensionMismatch,
  NoLexicalSentences,
  InvalidN,
  UnknownChannel,
  NoChannels,
  EmptyRange,
  Syntax,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& what) : Error(ErrorKind::NotFound, what) {}
};

class UnknownChannel : public Error {
 public:
  explicit UnknownChannel(std::string name)
      : Error(ErrorKind::UnknownChannel, "unknown channel \"" + name + "\""),
        name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

// Query parse failure. offset is a byte offset into the query text.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// Collects non-fatal warnings (dropped frames, unmatched markers, clamped n).
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag) diag->warn(std::move(message));
}

}  // namespace affmem
