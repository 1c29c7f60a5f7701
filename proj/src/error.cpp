#include "affmem/error.hpp"

namespace affmem {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Data: return "DataError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::EmptyTranscript: return "EmptyTranscript";
    case ErrorKind::InvalidDimension: return "InvalidDimension";
    case ErrorKind::NotAvailable: return "NotAvailable";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoLexicalSentences: return "NoLexicalSentences";
    case ErrorKind::InvalidN: return "InvalidN";
    case ErrorKind::UnknownChannel: return "UnknownChannel";
    case ErrorKind::NoChannels: return "NoChannels";
    case ErrorKind::EmptyRange: return "EmptyRange";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

namespace {

std::string describe_syntax(std::size_t offset, const std::vector<std::string>& expected,
                            const std::string& found) {
  std::string msg = "syntax error at byte " + std::to_string(offset) + ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) msg += i + 1 == expected.size() ? " or " : ", ";
    msg += expected[i];
  }
  msg += ", found " + found;
  return msg;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& found)
    : Error(ErrorKind::Syntax, describe_syntax(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)) {}

}  // namespace affmem
