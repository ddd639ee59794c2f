#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace meshlines {

/// Failure category. The CLI maps these onto its exit codes.
enum class ErrorKind { parse, geometry, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input text or bytes. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(ErrorKind::parse, line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input that parses but violates mesh invariants (range, degeneracy, manifoldness).
class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error(ErrorKind::geometry, what) {}
};

/// Singular systems, vanishing weights, undefined frames.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

/// Non-fatal notes collected while running an operator.
struct Diagnostics {
  std::vector<std::string> notes;

  void add(std::string note) { notes.push_back(std::move(note)); }
  bool empty() const { return notes.empty(); }
};

inline void note(Diagnostics* diag, std::string msg) {
  if (diag) diag->add(std::move(msg));
}

}  // namespace meshlines
