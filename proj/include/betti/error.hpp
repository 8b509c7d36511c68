#pragma once

#include <stdexcept>
#include <string>

namespace betti {

enum class ErrorCode {
  syntax,
  unknown_generator,
  empty_generators,
  invalid_argument,
  precondition,
  validation,
  cap_exceeded,
  undecidable,
  route_disagreement,
  io,
  internal,
};

const char* to_string(ErrorCode code);

// All library failures surface as betti::Error. The code decides the CLI
// exit status: cap_exceeded and undecidable map to 3, everything else to 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string witness = {})
      : std::runtime_error(message), code_(code), witness_(std::move(witness)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& witness() const noexcept { return witness_; }

 private:
  ErrorCode code_;
  std::string witness_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(ErrorCode::syntax,
              "syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                  message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class CapExceeded : public Error {
 public:
  explicit CapExceeded(std::size_t cap)
      : Error(ErrorCode::cap_exceeded,
              "coset enumeration exceeded the cap of " + std::to_string(cap) +
                  " live cosets (index possibly infinite)"),
        cap_(cap) {}

  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

}  // namespace betti
