// ============================================================================
// error.hpp -- error taxonomy shared by every sradiag module
// ============================================================================
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sradiag {

enum class ErrorKind {
  parse,
  ordering,
  insufficient_data,
  duplicate_tick,
  bounds,
  divergence,
  domain,
  parameter,
  model_mismatch,
  shape,
  convergence,
  config,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
  : std::runtime_error(msg), kind_{kind} {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Malformed token or truncated record; offset is the byte position in the
/// input stream where decoding failed.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t byte_offset)
  : Error(ErrorKind::parse, msg + " (byte offset " + std::to_string(byte_offset) + ")"),
    byte_offset_{byte_offset} {}

  [[nodiscard]] std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
  std::size_t byte_offset_;
};

/// A tick smaller than its predecessor; index is the offending position.
class OrderingError : public Error {
public:
  OrderingError(const std::string& msg, std::size_t index)
  : Error(ErrorKind::ordering, msg + " (index " + std::to_string(index) + ")"),
    index_{index} {}

  [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

}  // namespace sradiag
