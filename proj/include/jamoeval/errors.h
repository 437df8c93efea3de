#ifndef JAMOEVAL_ERRORS_H_
#define JAMOEVAL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jamoeval {

// Base class for every error raised on invalid input data (as opposed to
// programming errors). The CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a jamo sequence cannot be assembled into syllable blocks.
class CompositionError : public DomainError {
 public:
  CompositionError(const std::string& what, std::size_t offset)
      : DomainError(what + " (at token " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Syntax or content error in a text input, carrying a 1-based line number
// (0 when the error is not attributable to a single line).
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DomainError(line > 0 ? "line " + std::to_string(line) + ": " + what
                             : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Malformed binary file.
class FormatError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace jamoeval

#endif  // JAMOEVAL_ERRORS_H_
