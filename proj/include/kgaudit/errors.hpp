#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgaudit {

// Exit-code families used by the CLI: 2 validation, 3 sampling, 4 I/O.
enum class ErrorKind { kInternal = 1, kValidation = 2, kSampling = 3, kIo = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct EmptyGraphError : Error {
  explicit EmptyGraphError(const std::string& m = "empty triple set")
      : Error(ErrorKind::kValidation, m) {}
};

struct ParseError : Error {
  ParseError(std::size_t line_no, const std::string& m)
      : Error(ErrorKind::kValidation,
              "parse error at line " + std::to_string(line_no) + ": " + m),
        line(line_no) {}
  std::size_t line;
};

struct IoError : Error {
  explicit IoError(const std::string& m) : Error(ErrorKind::kIo, m) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& m)
      : Error(ErrorKind::kValidation, m) {}
};

struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& m)
      : Error(ErrorKind::kInternal, m) {}
};

struct InvalidQueryError : Error {
  explicit InvalidQueryError(const std::string& m)
      : Error(ErrorKind::kValidation, m) {}
};

struct EmptyEvaluationError : Error {
  explicit EmptyEvaluationError(const std::string& m = "no test queries")
      : Error(ErrorKind::kValidation, m) {}
};

struct DegenerateReportError : Error {
  explicit DegenerateReportError(const std::string& m)
      : Error(ErrorKind::kValidation, m) {}
};

struct UndefinedCorrelationError : Error {
  explicit UndefinedCorrelationError(const std::string& m)
      : Error(ErrorKind::kValidation, m) {}
};

struct UndefinedModularityError : Error {
  explicit UndefinedModularityError(const std::string& m = "graph has no edges")
      : Error(ErrorKind::kValidation, m) {}
};

struct SamplingFailedError : Error {
  explicit SamplingFailedError(const std::string& m)
      : Error(ErrorKind::kSampling, m) {}
};

struct InsufficientPartitionsError : Error {
  explicit InsufficientPartitionsError(const std::string& m)
      : Error(ErrorKind::kSampling, m) {}
};

struct SplitFailedError : Error {
  explicit SplitFailedError(const std::string& m)
      : Error(ErrorKind::kSampling, m) {}
};

}  // namespace kgaudit
